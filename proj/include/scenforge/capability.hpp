#pragma once

#include <set>
#include <string>

#include "scenforge/errors.hpp"

namespace scenforge {

// A set of capability tokens. The literal token "0" denotes the empty set
// in specification files, so it is never a member.
struct CapabilitySet {
  std::set<std::string> tokens;

  bool empty() const { return tokens.empty(); }
  bool contains(const std::string& t) const { return tokens.count(t) > 0; }
  void insert(const std::string& t) { tokens.insert(t); }

  bool subset_of(const CapabilitySet& other) const {
    for (const auto& t : tokens)
      if (!other.contains(t)) return false;
    return true;
  }

  CapabilitySet& merge(const CapabilitySet& other) {
    tokens.insert(other.tokens.begin(), other.tokens.end());
    return *this;
  }

  std::string to_string() const {
    if (tokens.empty()) return "0";
    std::string out;
    for (const auto& t : tokens) {
      if (!out.empty()) out += ',';
      out += t;
    }
    return out;
  }

  bool operator==(const CapabilitySet&) const = default;
};

inline bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return s != "0";
}

// "0" is the empty set; otherwise a comma-separated token list (no spaces).
inline CapabilitySet parse_capability_set(const std::string& word,
                                          std::size_t line) {
  CapabilitySet out;
  if (word == "0") return out;
  std::size_t pos = 0;
  while (pos <= word.size()) {
    std::size_t comma = word.find(',', pos);
    std::string tok = word.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!is_identifier(tok))
      throw SyntaxError(line, "bad capability token '" + tok + "'");
    out.insert(tok);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

// Capabilities are scoped to a component instance at materialization time,
// e.g. InitialAccess on Component2 becomes InitialAccess_Component2.
inline std::string scoped_token(const std::string& base,
                                const std::string& component) {
  return base + "_" + component;
}

} // namespace scenforge
