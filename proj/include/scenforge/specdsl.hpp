#pragma once

// Line-oriented specification dialects: network topology files (.topo) and
// architectural style files (.style). One declaration per line, "//" line
// comments, case-sensitive identifiers.

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scenforge/capability.hpp"
#include "scenforge/errors.hpp"

namespace scenforge {

enum class NetworkKind { FlatNet, CollapsedCore };

inline const char* network_kind_name(NetworkKind k) {
  return k == NetworkKind::FlatNet ? "FlatNet" : "CollapsedCore";
}

enum class Multiplicity {
  OneToOne,
  OneToSome,
  OneToAll,
  SomeToOne,
  SomeToSome,
  SomeToAll,
  AllToOne,
  AllToSome,
  AllToAll,
};

inline const char* multiplicity_name(Multiplicity m) {
  switch (m) {
    case Multiplicity::OneToOne: return "OneToOne";
    case Multiplicity::OneToSome: return "OneToSome";
    case Multiplicity::OneToAll: return "OneToAll";
    case Multiplicity::SomeToOne: return "SomeToOne";
    case Multiplicity::SomeToSome: return "SomeToSome";
    case Multiplicity::SomeToAll: return "SomeToAll";
    case Multiplicity::AllToOne: return "AllToOne";
    case Multiplicity::AllToSome: return "AllToSome";
    case Multiplicity::AllToAll: return "AllToAll";
  }
  return "?";
}

inline std::optional<Multiplicity> parse_multiplicity(const std::string& w) {
  static const std::map<std::string, Multiplicity> table = {
      {"OneToOne", Multiplicity::OneToOne},
      {"OneToSome", Multiplicity::OneToSome},
      {"OneToAll", Multiplicity::OneToAll},
      {"SomeToOne", Multiplicity::SomeToOne},
      {"SomeToSome", Multiplicity::SomeToSome},
      {"SomeToAll", Multiplicity::SomeToAll},
      {"AllToOne", Multiplicity::AllToOne},
      {"AllToSome", Multiplicity::AllToSome},
      {"AllToAll", Multiplicity::AllToAll},
  };
  auto it = table.find(w);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

struct SubsystemDecl {
  std::string style;
  int count = 1;
  bool operator==(const SubsystemDecl&) const = default;
};

struct ConstraintDecl {
  enum class Kind { Requires, AllowRouting, Custom };
  Kind kind = Kind::Custom;
  std::vector<std::string> args;
  std::string raw_text; // original text for Custom constraints
  bool operator==(const ConstraintDecl&) const = default;
};

struct TopologySpec {
  NetworkKind network_kind = NetworkKind::FlatNet;
  std::vector<SubsystemDecl> subsystems;
  std::vector<ConstraintDecl> constraints;

  int total_subsystems() const {
    int n = 0;
    for (const auto& s : subsystems) n += s.count;
    return n;
  }
  bool declares_style(const std::string& name) const {
    for (const auto& s : subsystems)
      if (s.style == name) return true;
    return false;
  }
  bool operator==(const TopologySpec&) const = default;
};

struct RoleDecl {
  std::string name;
  int count = 1;
  bool operator==(const RoleDecl&) const = default;
};

struct FeatureDecl {
  std::string name;
  std::vector<std::string> owning_roles;
  bool operator==(const FeatureDecl&) const = default;
};

struct InterfaceDecl {
  std::string name;
  std::string feature;
  CapabilitySet interaction_req;
  bool operator==(const InterfaceDecl&) const = default;
};

struct MapDecl {
  std::string left_role;
  std::string right_role;
  Multiplicity multiplicity = Multiplicity::OneToOne;
  bool operator==(const MapDecl&) const = default;
};

struct StyleConstraint {
  enum class Kind { UniqueFeature, UniqueRole };
  Kind kind = Kind::UniqueRole;
  std::string role;
  std::string feature; // UniqueFeature only
  bool operator==(const StyleConstraint&) const = default;
};

struct VulnerabilityDecl {
  std::string name;
  std::string interface_name;
  CapabilitySet exploit_req;
  CapabilitySet exploit_gain;
  bool operator==(const VulnerabilityDecl&) const = default;
};

struct ArchStyleSpec {
  std::string name;
  std::vector<RoleDecl> roles;
  std::vector<FeatureDecl> features;
  std::vector<InterfaceDecl> interfaces;
  std::vector<MapDecl> maps;
  std::vector<StyleConstraint> constraints;
  std::vector<VulnerabilityDecl> vulnerabilities;
  std::vector<std::string> entrypoints;

  const RoleDecl* find_role(const std::string& n) const {
    for (const auto& r : roles)
      if (r.name == n) return &r;
    return nullptr;
  }
  const FeatureDecl* find_feature(const std::string& n) const {
    for (const auto& f : features)
      if (f.name == n) return &f;
    return nullptr;
  }
  const InterfaceDecl* find_interface(const std::string& n) const {
    for (const auto& i : interfaces)
      if (i.name == n) return &i;
    return nullptr;
  }
  std::vector<const FeatureDecl*> features_of_role(const std::string& role) const {
    std::vector<const FeatureDecl*> out;
    for (const auto& f : features)
      for (const auto& r : f.owning_roles)
        if (r == role) { out.push_back(&f); break; }
    return out;
  }
  std::vector<const InterfaceDecl*> interfaces_of_feature(const std::string& feature) const {
    std::vector<const InterfaceDecl*> out;
    for (const auto& i : interfaces)
      if (i.feature == feature) out.push_back(&i);
    return out;
  }
  bool has_constraint(StyleConstraint::Kind kind, const std::string& role,
                      const std::string& feature = "") const {
    for (const auto& c : constraints)
      if (c.kind == kind && c.role == role &&
          (kind == StyleConstraint::Kind::UniqueRole || c.feature == feature))
        return true;
    return false;
  }
  bool is_entrypoint_role(const std::string& role) const {
    for (const auto& e : entrypoints)
      if (e == role) return true;
    return false;
  }
  bool operator==(const ArchStyleSpec&) const = default;
};

struct Diagnostic {
  enum class Code {
    MissingStyle,
    RoleWithoutFeature,
    FeatureWithoutInterface,
    NoEntrypoint,
    DanglingReference,
  };
  Code code;
  std::string subject;
  std::string message;
  bool operator==(const Diagnostic&) const = default;
};

namespace dsl_detail {

struct Line {
  std::size_t number = 0;
  std::vector<std::string> words;
};

inline std::vector<Line> split_lines(const std::string& text) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::size_t first = raw.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (raw.compare(first, 2, "//") == 0) continue;
    Line line;
    line.number = number;
    std::istringstream ws(raw);
    std::string word;
    while (ws >> word) line.words.push_back(word);
    out.push_back(std::move(line));
  }
  return out;
}

inline std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    out.push_back(s.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

// "Name:count" with count a positive integer.
inline std::pair<std::string, int> parse_counted(const std::string& word,
                                                 std::size_t line) {
  std::size_t colon = word.find(':');
  if (colon == std::string::npos || colon + 1 >= word.size())
    throw SyntaxError(line, "expected Name:count, got '" + word + "'");
  std::string name = word.substr(0, colon);
  std::string digits = word.substr(colon + 1);
  if (!is_identifier(name))
    throw SyntaxError(line, "bad identifier '" + name + "'");
  int count = 0;
  for (char c : digits) {
    if (c < '0' || c > '9')
      throw SyntaxError(line, "bad count '" + digits + "'");
    count = count * 10 + (c - '0');
    if (count > 1000000) throw SyntaxError(line, "count out of range");
  }
  if (count < 1) throw SyntaxError(line, "count must be >= 1");
  return {name, count};
}

inline std::string expect_identifier(const std::string& word,
                                     std::size_t line) {
  if (!is_identifier(word))
    throw SyntaxError(line, "bad identifier '" + word + "'");
  return word;
}

inline std::string join(const std::vector<std::string>& words,
                        std::size_t from) {
  std::string out;
  for (std::size_t i = from; i < words.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += words[i];
  }
  return out;
}

} // namespace dsl_detail

inline TopologySpec parse_topology(const std::string& text) {
  using namespace dsl_detail;
  auto lines = split_lines(text);
  if (lines.empty()) throw SyntaxError(0, "empty topology specification");
  if (lines.front().words[0] != "Topology")
    throw SyntaxError(lines.front().number,
                      "topology specification must begin with Topology");

  TopologySpec spec;
  bool seen_topology = false;
  std::vector<std::pair<std::size_t, std::size_t>> pending_checks; // (constraint idx, line)

  for (const auto& line : lines) {
    const auto& w = line.words;
    if (w[0] == "Topology") {
      if (seen_topology)
        throw SyntaxError(line.number, "duplicate Topology line");
      if (w.size() != 2)
        throw SyntaxError(line.number, "expected: Topology <FlatNet|CollapsedCore>");
      if (w[1] == "FlatNet") spec.network_kind = NetworkKind::FlatNet;
      else if (w[1] == "CollapsedCore") spec.network_kind = NetworkKind::CollapsedCore;
      else throw SyntaxError(line.number, "unknown network kind '" + w[1] + "'");
      seen_topology = true;
    } else if (w[0] == "Subsystem") {
      if (w.size() != 2)
        throw SyntaxError(line.number, "expected: Subsystem Name:count");
      auto [name, count] = parse_counted(w[1], line.number);
      if (spec.declares_style(name))
        throw DuplicateDeclaration(line.number, name);
      spec.subsystems.push_back({name, count});
    } else if (w[0] == "Constraint") {
      if (w.size() < 2)
        throw SyntaxError(line.number, "empty constraint");
      ConstraintDecl c;
      if (w[1] == "requires" || w[1] == "allowRouting") {
        if (w.size() != 4)
          throw SyntaxError(line.number,
                            "expected: Constraint " + w[1] + " StyleA StyleB");
        c.kind = w[1] == "requires" ? ConstraintDecl::Kind::Requires
                                    : ConstraintDecl::Kind::AllowRouting;
        c.args = {expect_identifier(w[2], line.number),
                  expect_identifier(w[3], line.number)};
      } else {
        c.kind = ConstraintDecl::Kind::Custom;
        c.raw_text = join(w, 1);
      }
      pending_checks.emplace_back(spec.constraints.size(), line.number);
      spec.constraints.push_back(std::move(c));
    } else {
      throw SyntaxError(line.number, "unknown keyword '" + w[0] + "'");
    }
  }

  // Constraint arguments may reference subsystems declared on any line.
  for (auto [idx, line_no] : pending_checks)
    for (const auto& arg : spec.constraints[idx].args)
      if (!spec.declares_style(arg))
        throw UnknownReference(line_no, arg, "subsystem style");
  return spec;
}

inline ArchStyleSpec parse_archstyle(const std::string& text) {
  using namespace dsl_detail;
  auto lines = split_lines(text);
  if (lines.empty()) throw SyntaxError(0, "empty style specification");
  if (lines.front().words[0] != "ArchStyle")
    throw SyntaxError(lines.front().number,
                      "style specification must begin with ArchStyle");

  ArchStyleSpec spec;
  bool seen_header = false;
  std::vector<std::pair<std::string, std::size_t>> role_refs;
  std::vector<std::pair<std::string, std::size_t>> feature_refs;
  std::vector<std::pair<std::string, std::size_t>> interface_refs;

  for (const auto& line : lines) {
    const auto& w = line.words;
    if (w[0] == "ArchStyle") {
      if (seen_header) throw SyntaxError(line.number, "duplicate ArchStyle line");
      if (w.size() != 2) throw SyntaxError(line.number, "expected: ArchStyle Name");
      spec.name = expect_identifier(w[1], line.number);
      seen_header = true;
    } else if (w[0] == "Role") {
      if (w.size() != 2) throw SyntaxError(line.number, "expected: Role Name:count");
      auto [name, count] = parse_counted(w[1], line.number);
      if (spec.find_role(name)) throw DuplicateDeclaration(line.number, name);
      spec.roles.push_back({name, count});
    } else if (w[0] == "Feature") {
      if (w.size() != 2)
        throw SyntaxError(line.number, "expected: Feature Name:Role[,Role...]");
      std::size_t colon = w[1].find(':');
      if (colon == std::string::npos || colon + 1 >= w[1].size())
        throw SyntaxError(line.number, "expected: Feature Name:Role[,Role...]");
      FeatureDecl f;
      f.name = expect_identifier(w[1].substr(0, colon), line.number);
      if (spec.find_feature(f.name)) throw DuplicateDeclaration(line.number, f.name);
      for (const auto& role : split_commas(w[1].substr(colon + 1)))
        f.owning_roles.push_back(expect_identifier(role, line.number));
      for (const auto& r : f.owning_roles)
        role_refs.emplace_back(r, line.number);
      spec.features.push_back(std::move(f));
    } else if (w[0] == "Interface") {
      if (w.size() != 3)
        throw SyntaxError(line.number, "expected: Interface Name:Feature Caps");
      std::size_t colon = w[1].find(':');
      if (colon == std::string::npos || colon + 1 >= w[1].size())
        throw SyntaxError(line.number, "expected: Interface Name:Feature Caps");
      InterfaceDecl i;
      i.name = expect_identifier(w[1].substr(0, colon), line.number);
      if (spec.find_interface(i.name)) throw DuplicateDeclaration(line.number, i.name);
      i.feature = expect_identifier(w[1].substr(colon + 1), line.number);
      i.interaction_req = parse_capability_set(w[2], line.number);
      feature_refs.emplace_back(i.feature, line.number);
      spec.interfaces.push_back(std::move(i));
    } else if (w[0] == "Map") {
      if (w.size() != 4)
        throw SyntaxError(line.number, "expected: Map LeftRole RightRole Multiplicity");
      MapDecl m;
      m.left_role = expect_identifier(w[1], line.number);
      m.right_role = expect_identifier(w[2], line.number);
      auto mult = parse_multiplicity(w[3]);
      if (!mult) throw SyntaxError(line.number, "unknown multiplicity '" + w[3] + "'");
      m.multiplicity = *mult;
      role_refs.emplace_back(m.left_role, line.number);
      role_refs.emplace_back(m.right_role, line.number);
      spec.maps.push_back(m);
    } else if (w[0] == "Constraint") {
      if (w.size() >= 2 && w[1] == "unique_feature") {
        if (w.size() != 4)
          throw SyntaxError(line.number, "expected: Constraint unique_feature Role Feature");
        StyleConstraint c;
        c.kind = StyleConstraint::Kind::UniqueFeature;
        c.role = expect_identifier(w[2], line.number);
        c.feature = expect_identifier(w[3], line.number);
        role_refs.emplace_back(c.role, line.number);
        feature_refs.emplace_back(c.feature, line.number);
        spec.constraints.push_back(std::move(c));
      } else if (w.size() >= 2 && w[1] == "unique_role") {
        if (w.size() != 3)
          throw SyntaxError(line.number, "expected: Constraint unique_role Role");
        StyleConstraint c;
        c.kind = StyleConstraint::Kind::UniqueRole;
        c.role = expect_identifier(w[2], line.number);
        role_refs.emplace_back(c.role, line.number);
        spec.constraints.push_back(std::move(c));
      } else {
        throw SyntaxError(line.number,
                          "unknown style constraint '" + join(w, 1) + "'");
      }
    } else if (w[0] == "Vulnerability") {
      if (w.size() != 5)
        throw SyntaxError(line.number,
                          "expected: Vulnerability Name Interface ReqCaps GainCaps");
      VulnerabilityDecl v;
      v.name = expect_identifier(w[1], line.number);
      for (const auto& existing : spec.vulnerabilities)
        if (existing.name == v.name) throw DuplicateDeclaration(line.number, v.name);
      v.interface_name = expect_identifier(w[2], line.number);
      v.exploit_req = parse_capability_set(w[3], line.number);
      v.exploit_gain = parse_capability_set(w[4], line.number);
      interface_refs.emplace_back(v.interface_name, line.number);
      spec.vulnerabilities.push_back(std::move(v));
    } else if (w[0] == "Entrypoint") {
      if (w.size() != 2) throw SyntaxError(line.number, "expected: Entrypoint Role[,Role...]");
      for (const auto& role : split_commas(w[1])) {
        spec.entrypoints.push_back(expect_identifier(role, line.number));
        role_refs.emplace_back(spec.entrypoints.back(), line.number);
      }
    } else {
      throw SyntaxError(line.number, "unknown keyword '" + w[0] + "'");
    }
  }

  for (const auto& [name, line_no] : role_refs)
    if (!spec.find_role(name)) throw UnknownReference(line_no, name, "role");
  for (const auto& [name, line_no] : feature_refs)
    if (!spec.find_feature(name)) throw UnknownReference(line_no, name, "feature");
  for (const auto& [name, line_no] : interface_refs)
    if (!spec.find_interface(name)) throw UnknownReference(line_no, name, "interface");
  return spec;
}

inline std::string pretty_print(const TopologySpec& spec) {
  std::string out = std::string("Topology ") + network_kind_name(spec.network_kind) + "\n";
  for (const auto& s : spec.subsystems)
    out += "Subsystem " + s.style + ":" + std::to_string(s.count) + "\n";
  for (const auto& c : spec.constraints) {
    switch (c.kind) {
      case ConstraintDecl::Kind::Requires:
        out += "Constraint requires " + c.args[0] + " " + c.args[1] + "\n";
        break;
      case ConstraintDecl::Kind::AllowRouting:
        out += "Constraint allowRouting " + c.args[0] + " " + c.args[1] + "\n";
        break;
      case ConstraintDecl::Kind::Custom:
        out += "Constraint " + c.raw_text + "\n";
        break;
    }
  }
  return out;
}

inline std::string pretty_print(const ArchStyleSpec& spec) {
  std::string out = "ArchStyle " + spec.name + "\n";
  for (const auto& r : spec.roles)
    out += "Role " + r.name + ":" + std::to_string(r.count) + "\n";
  for (const auto& f : spec.features) {
    out += "Feature " + f.name + ":";
    for (std::size_t i = 0; i < f.owning_roles.size(); ++i)
      out += (i ? "," : "") + f.owning_roles[i];
    out += "\n";
  }
  for (const auto& i : spec.interfaces)
    out += "Interface " + i.name + ":" + i.feature + " " +
           i.interaction_req.to_string() + "\n";
  for (const auto& m : spec.maps)
    out += "Map " + m.left_role + " " + m.right_role + " " +
           multiplicity_name(m.multiplicity) + "\n";
  for (const auto& c : spec.constraints) {
    if (c.kind == StyleConstraint::Kind::UniqueFeature)
      out += "Constraint unique_feature " + c.role + " " + c.feature + "\n";
    else
      out += "Constraint unique_role " + c.role + "\n";
  }
  for (const auto& v : spec.vulnerabilities)
    out += "Vulnerability " + v.name + " " + v.interface_name + " " +
           v.exploit_req.to_string() + " " + v.exploit_gain.to_string() + "\n";
  for (const auto& e : spec.entrypoints) out += "Entrypoint " + e + "\n";
  return out;
}

// Structural checks beyond reference resolution (which parsing enforces).
inline std::vector<Diagnostic> style_diagnostics(const ArchStyleSpec& style) {
  std::vector<Diagnostic> out;
  for (const auto& r : style.roles)
    if (style.features_of_role(r.name).empty())
      out.push_back({Diagnostic::Code::RoleWithoutFeature, r.name,
                     "role '" + r.name + "' of style '" + style.name +
                         "' declares no feature"});
  for (const auto& f : style.features)
    if (style.interfaces_of_feature(f.name).empty())
      out.push_back({Diagnostic::Code::FeatureWithoutInterface, f.name,
                     "feature '" + f.name + "' of style '" + style.name +
                         "' has no implementing interface"});
  if (style.entrypoints.empty())
    out.push_back({Diagnostic::Code::NoEntrypoint, style.name,
                   "style '" + style.name + "' declares no entrypoint"});
  return out;
}

inline std::vector<Diagnostic> validate_repertoire(
    const TopologySpec& topology,
    const std::map<std::string, ArchStyleSpec>& styles) {
  std::vector<Diagnostic> out;
  for (const auto& s : topology.subsystems) {
    auto it = styles.find(s.style);
    if (it == styles.end()) {
      out.push_back({Diagnostic::Code::MissingStyle, s.style,
                     "no style specification for '" + s.style + "'"});
      continue;
    }
    auto inner = style_diagnostics(it->second);
    out.insert(out.end(), inner.begin(), inner.end());
  }
  return out;
}

} // namespace scenforge
