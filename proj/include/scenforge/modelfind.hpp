#pragma once

// Bounded enumeration of network topologies and subsystem instantiations.
// The enumerators do a backtracking-style search with symmetry reduction;
// check_topology / check_subsystem re-verify every constraint from the AST
// alone and are kept independent of the search code paths.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "scenforge/errors.hpp"
#include "scenforge/rng.hpp"
#include "scenforge/specdsl.hpp"

namespace scenforge {

struct Bounds {
  int max_connectors = 4;
  std::uint64_t max_models = 0; // 0 = unbounded
  std::uint64_t seed = 0;       // permutes emission order; 0 = canonical order
};

struct TopologyModel {
  std::vector<std::string> connectors;                    // "c0", "c1", ...
  std::set<std::pair<std::string, std::string>> links;    // normalized pairs
  std::vector<std::string> subsystems;                    // "s0", "s1", ...
  std::map<std::string, std::string> subsystem_router;    // subsystem -> connector
  std::map<std::string, std::string> subsystem_style;     // subsystem -> style
  std::set<std::pair<std::string, std::string>> routing_policy; // style pairs

  bool operator==(const TopologyModel&) const = default;
};

struct SubsystemModel {
  std::vector<std::pair<std::string, std::string>> components; // (id, role)
  // (component, feature) -> chosen interface products, always non-empty
  std::map<std::pair<std::string, std::string>, std::set<std::string>>
      interface_choice;
  // ordered (invoker, invokee) pairs induced by the style's mappings
  std::set<std::pair<std::string, std::string>> interaction_edges;

  const std::string* role_of(const std::string& component) const {
    for (const auto& [id, role] : components)
      if (id == component) return &role;
    return nullptr;
  }
  bool operator==(const SubsystemModel&) const = default;
};

struct CheckResult {
  bool ok = true;
  std::vector<std::string> violations;

  void fail(std::string v) {
    ok = false;
    violations.push_back(std::move(v));
  }
};

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

inline std::set<std::pair<std::string, std::string>> derive_routing_policy(
    const TopologySpec& spec) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& c : spec.constraints) {
    if (c.kind == ConstraintDecl::Kind::Requires ||
        c.kind == ConstraintDecl::Kind::AllowRouting) {
      auto a = c.args[0], b = c.args[1];
      if (b < a) std::swap(a, b);
      out.insert({a, b});
    }
  }
  return out;
}

namespace modelfind_detail {

inline bool connected_on(int n, const std::vector<std::pair<int, int>>& links) {
  if (n <= 0) return false;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : links) {
    int ra = find(a), rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  for (int i = 1; i < n; ++i)
    if (find(i) != find(0)) return false;
  return true;
}

// Candidate topology in index form: routers[k] = connector of subsystem k,
// where subsystems are laid out style-major in declaration order.
struct TopoCandidate {
  int n_connectors = 0;
  std::vector<std::pair<int, int>> links;
  std::vector<int> routers;
};

inline std::string encode_topology(const TopoCandidate& cand,
                                   const std::vector<int>& perm,
                                   const std::vector<int>& group_sizes) {
  std::vector<std::pair<int, int>> links;
  links.reserve(cand.links.size());
  for (auto [a, b] : cand.links) {
    int pa = perm[a], pb = perm[b];
    links.emplace_back(std::min(pa, pb), std::max(pa, pb));
  }
  std::sort(links.begin(), links.end());
  std::string out = std::to_string(cand.n_connectors) + "|";
  for (auto [a, b] : links) out += std::to_string(a) + "-" + std::to_string(b) + ",";
  out += "|";
  std::size_t base = 0;
  for (int size : group_sizes) {
    std::vector<int> routers;
    for (int i = 0; i < size; ++i)
      routers.push_back(perm[cand.routers[base + i]]);
    std::sort(routers.begin(), routers.end());
    for (int r : routers) out += std::to_string(r) + ".";
    out += ";";
    base += static_cast<std::size_t>(size);
  }
  return out;
}

// Lexicographically minimal encoding over connector relabelings; subsystem
// relabeling within a style is absorbed by the per-style sorted router list.
inline std::pair<std::string, std::vector<int>> canonical_topology(
    const TopoCandidate& cand, const std::vector<int>& group_sizes) {
  std::vector<int> perm(cand.n_connectors);
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  std::vector<int> best_perm = perm;
  do {
    std::string enc = encode_topology(cand, perm, group_sizes);
    if (best.empty() || enc < best) {
      best = enc;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best, best_perm};
}

inline TopologyModel materialize_topology(const TopoCandidate& cand,
                                          const std::vector<int>& perm,
                                          const TopologySpec& spec) {
  TopologyModel model;
  for (int i = 0; i < cand.n_connectors; ++i)
    model.connectors.push_back("c" + std::to_string(i));
  for (auto [a, b] : cand.links) {
    int pa = perm[a], pb = perm[b];
    if (pb < pa) std::swap(pa, pb);
    model.links.insert({"c" + std::to_string(pa), "c" + std::to_string(pb)});
  }
  // Subsystem ids stay style-major; within a style they are ordered by the
  // relabeled router index so equal models get identical ids.
  std::size_t base = 0;
  std::size_t sub_index = 0;
  for (const auto& decl : spec.subsystems) {
    std::vector<int> routers;
    for (int i = 0; i < decl.count; ++i)
      routers.push_back(perm[cand.routers[base + static_cast<std::size_t>(i)]]);
    std::sort(routers.begin(), routers.end());
    for (int r : routers) {
      std::string sid = "s" + std::to_string(sub_index++);
      model.subsystems.push_back(sid);
      model.subsystem_router[sid] = "c" + std::to_string(r);
      model.subsystem_style[sid] = decl.style;
    }
    base += static_cast<std::size_t>(decl.count);
  }
  model.routing_policy = derive_routing_policy(spec);
  return model;
}

// Nondecreasing router assignments for one style group (within-style
// symmetry reduction; the canonical form finishes the job).
inline void assignments_rec(int slots, int n_conn, int min_value,
                            std::vector<int>& current,
                            std::vector<std::vector<int>>& out) {
  if (slots == 0) {
    out.push_back(current);
    return;
  }
  for (int v = min_value; v < n_conn; ++v) {
    current.push_back(v);
    assignments_rec(slots - 1, n_conn, v, current, out);
    current.pop_back();
  }
}

inline std::vector<std::vector<int>> group_assignments(int slots, int n_conn) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  assignments_rec(slots, n_conn, 0, current, out);
  return out;
}

} // namespace modelfind_detail

// ---------------------------------------------------------------------------
// check_topology — independent verifier
// ---------------------------------------------------------------------------

inline CheckResult check_topology(const TopologyModel& model,
                                  const TopologySpec& spec) {
  CheckResult res;
  std::set<std::string> connector_set(model.connectors.begin(),
                                      model.connectors.end());
  if (connector_set.size() != model.connectors.size())
    res.fail("duplicate connector ids");
  if (model.connectors.empty()) res.fail("no connectors");

  for (const auto& [a, b] : model.links) {
    if (a == b) res.fail("link joins a connector to itself: " + a);
    if (!connector_set.count(a) || !connector_set.count(b))
      res.fail("link endpoint is not a connector: " + a + "-" + b);
  }

  // Router relation: every subsystem maps to exactly one existing connector.
  std::map<std::string, int> bridged; // connector -> subsystem count
  for (const auto& c : model.connectors) bridged[c] = 0;
  for (const auto& sid : model.subsystems) {
    auto it = model.subsystem_router.find(sid);
    if (it == model.subsystem_router.end()) {
      res.fail("subsystem without router: " + sid);
      continue;
    }
    if (!connector_set.count(it->second))
      res.fail("subsystem " + sid + " routed to unknown connector");
    else
      bridged[it->second] += 1;
    if (!model.subsystem_style.count(sid))
      res.fail("subsystem without style: " + sid);
  }

  // Style census must match the specification.
  std::map<std::string, int> census;
  for (const auto& [sid, style] : model.subsystem_style) census[style] += 1;
  for (const auto& decl : spec.subsystems) {
    if (census[decl.style] != decl.count)
      res.fail("style " + decl.style + " has " +
               std::to_string(census[decl.style]) + " subsystems, expected " +
               std::to_string(decl.count));
    census.erase(decl.style);
  }
  for (const auto& [style, n] : census)
    if (n != 0) res.fail("undeclared style in model: " + style);

  // Network-kind cardinalities.
  if (spec.network_kind == NetworkKind::FlatNet) {
    if (model.connectors.size() != 1 || model.subsystems.size() != 1)
      res.fail("FlatNet requires exactly 1 connector and 1 subsystem");
  } else {
    if (model.connectors.size() <= 1)
      res.fail("CollapsedCore requires more than 1 connector");
    for (const auto& [c, n] : bridged)
      if (n < 1) res.fail("connector bridges no subsystem: " + c);
  }

  // Connector graph connectivity.
  {
    std::map<std::string, int> idx;
    for (const auto& c : model.connectors)
      idx[c] = static_cast<int>(idx.size());
    std::vector<std::pair<int, int>> links;
    for (const auto& [a, b] : model.links)
      if (idx.count(a) && idx.count(b)) links.emplace_back(idx[a], idx[b]);
    if (!modelfind_detail::connected_on(static_cast<int>(model.connectors.size()),
                                        links))
      res.fail("connector graph is not connected");
  }

  // Requires(A, B): every subsystem of A directly reaches every subsystem of
  // B — their routers are joined by a link or are the same connector.
  auto linked = [&](const std::string& a, const std::string& b) {
    if (a == b) return true;
    auto p = std::minmax(a, b);
    return model.links.count({p.first, p.second}) > 0;
  };
  for (const auto& c : spec.constraints) {
    if (c.kind != ConstraintDecl::Kind::Requires) continue;
    for (const auto& sa : model.subsystems) {
      if (model.subsystem_style.at(sa) != c.args[0]) continue;
      for (const auto& sb : model.subsystems) {
        if (sb == sa || model.subsystem_style.at(sb) != c.args[1]) continue;
        if (!linked(model.subsystem_router.at(sa), model.subsystem_router.at(sb)))
          res.fail("Requires(" + c.args[0] + "," + c.args[1] + ") violated by " +
                   sa + " and " + sb);
      }
    }
  }

  if (model.routing_policy != derive_routing_policy(spec))
    res.fail("routing policy does not match constraints");
  return res;
}

// ---------------------------------------------------------------------------
// enumerate_topologies
// ---------------------------------------------------------------------------

namespace modelfind_detail {

inline std::vector<TopologyModel> enumerate_topologies_at(
    const TopologySpec& spec, int max_connectors, std::uint64_t stop_after) {
  std::vector<int> group_sizes;
  for (const auto& decl : spec.subsystems) group_sizes.push_back(decl.count);
  int n_sub = spec.total_subsystems();

  std::map<std::string, TopologyModel> found; // canonical encoding -> model

  auto consider = [&](const TopoCandidate& cand) {
    auto [enc, perm] = canonical_topology(cand, group_sizes);
    if (found.count(enc)) return;
    found.emplace(enc, materialize_topology(cand, perm, spec));
  };

  if (spec.network_kind == NetworkKind::FlatNet) {
    if (n_sub == 1 && max_connectors >= 1) {
      TopoCandidate cand;
      cand.n_connectors = 1;
      cand.routers = {0};
      consider(cand);
    }
  } else {
    // Styles with a Requires constraint must appear together; enumerating
    // components per connector count, links, then routers.
    for (int n = 2; n <= max_connectors && n <= n_sub; ++n) {
      std::vector<std::pair<int, int>> all_pairs;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) all_pairs.emplace_back(a, b);
      std::uint64_t pair_count = all_pairs.size();
      detail::require(pair_count < 63, "connector bound within word size");

      // Group offsets into the style-major subsystem layout.
      std::vector<std::pair<std::size_t, int>> groups; // (offset, size)
      std::size_t off = 0;
      for (int size : group_sizes) {
        groups.emplace_back(off, size);
        off += static_cast<std::size_t>(size);
      }

      for (std::uint64_t mask = 0; mask < (1ULL << pair_count); ++mask) {
        TopoCandidate cand;
        cand.n_connectors = n;
        for (std::uint64_t bit = 0; bit < pair_count; ++bit)
          if (mask & (1ULL << bit)) cand.links.push_back(all_pairs[bit]);
        if (!connected_on(n, cand.links)) continue;

        std::set<std::pair<int, int>> link_set(cand.links.begin(),
                                               cand.links.end());
        auto reachable = [&](int a, int b) {
          if (a == b) return true;
          return link_set.count({std::min(a, b), std::max(a, b)}) > 0;
        };

        // Per-style nondecreasing assignments, combined recursively.
        std::vector<std::vector<std::vector<int>>> per_group;
        for (int size : group_sizes)
          per_group.push_back(group_assignments(size, n));

        std::vector<std::size_t> pick(per_group.size(), 0);
        while (true) {
          cand.routers.clear();
          for (std::size_t g = 0; g < per_group.size(); ++g)
            for (int r : per_group[g][pick[g]]) cand.routers.push_back(r);

          bool ok = true;
          std::vector<int> bridged(n, 0);
          for (int r : cand.routers) bridged[r] += 1;
          for (int c = 0; c < n && ok; ++c)
            if (bridged[c] < 1) ok = false;

          if (ok) {
            for (const auto& c : spec.constraints) {
              if (c.kind != ConstraintDecl::Kind::Requires) continue;
              std::size_t ga = 0, gb = 0;
              for (std::size_t g = 0; g < spec.subsystems.size(); ++g) {
                if (spec.subsystems[g].style == c.args[0]) ga = g;
                if (spec.subsystems[g].style == c.args[1]) gb = g;
              }
              for (int i = 0; i < groups[ga].second && ok; ++i)
                for (int j = 0; j < groups[gb].second && ok; ++j) {
                  std::size_t ia = groups[ga].first + static_cast<std::size_t>(i);
                  std::size_t ib = groups[gb].first + static_cast<std::size_t>(j);
                  if (ia == ib) continue;
                  if (!reachable(cand.routers[ia], cand.routers[ib])) ok = false;
                }
              if (!ok) break;
            }
          }

          if (ok) {
            consider(cand);
            if (stop_after != 0 && found.size() >= stop_after) {
              std::vector<TopologyModel> out;
              for (auto& [enc, m] : found) out.push_back(std::move(m));
              return out;
            }
          }

          std::size_t g = 0;
          for (; g < pick.size(); ++g) {
            if (++pick[g] < per_group[g].size()) break;
            pick[g] = 0;
          }
          if (g == pick.size()) break;
        }
      }
    }
  }

  std::vector<TopologyModel> out;
  for (auto& [enc, m] : found) out.push_back(std::move(m));
  return out;
}

} // namespace modelfind_detail

inline std::vector<TopologyModel> enumerate_topologies(const TopologySpec& spec,
                                                       const Bounds& bounds) {
  if (bounds.max_connectors < 1)
    throw ConfigError("max_connectors must be >= 1");
  auto models =
      modelfind_detail::enumerate_topologies_at(spec, bounds.max_connectors, 0);
  if (models.empty()) {
    auto probe = modelfind_detail::enumerate_topologies_at(
        spec, bounds.max_connectors + 1, 1);
    if (!probe.empty())
      throw Unsatisfiable(
          "no topology model within max_connectors=" +
              std::to_string(bounds.max_connectors) +
              "; raising the connector bound would admit models",
          /*bound_too_small=*/true);
    throw Unsatisfiable("no topology model satisfies the specification");
  }
  if (bounds.seed != 0) {
    Rng rng(bounds.seed);
    rng.shuffle(models);
  }
  if (bounds.max_models != 0 && models.size() > bounds.max_models)
    models.resize(bounds.max_models);
  return models;
}

// ---------------------------------------------------------------------------
// check_subsystem — independent verifier
// ---------------------------------------------------------------------------

namespace modelfind_detail {

struct Quantifier {
  enum Kind { One, Some, All } left, right;
};

inline Quantifier quantifiers(Multiplicity m) {
  using K = Quantifier::Kind;
  switch (m) {
    case Multiplicity::OneToOne: return {K::One, K::One};
    case Multiplicity::OneToSome: return {K::One, K::Some};
    case Multiplicity::OneToAll: return {K::One, K::All};
    case Multiplicity::SomeToOne: return {K::Some, K::One};
    case Multiplicity::SomeToSome: return {K::Some, K::Some};
    case Multiplicity::SomeToAll: return {K::Some, K::All};
    case Multiplicity::AllToOne: return {K::All, K::One};
    case Multiplicity::AllToSome: return {K::All, K::Some};
    case Multiplicity::AllToAll: return {K::All, K::All};
  }
  return {K::Some, K::Some};
}

inline bool quantifier_holds(Quantifier::Kind q, std::size_t used,
                             std::size_t all) {
  switch (q) {
    case Quantifier::Kind::One: return used == 1;
    case Quantifier::Kind::Some: return used >= 1;
    case Quantifier::Kind::All: return used == all;
  }
  return false;
}

} // namespace modelfind_detail

inline CheckResult check_subsystem(const SubsystemModel& model,
                                   const ArchStyleSpec& style) {
  CheckResult res;

  // Role census.
  std::map<std::string, std::vector<std::string>> by_role;
  std::set<std::string> ids;
  for (const auto& [id, role] : model.components) {
    if (!ids.insert(id).second) res.fail("duplicate component id: " + id);
    if (!style.find_role(role)) res.fail("component with undeclared role: " + role);
    else by_role[role].push_back(id);
  }
  for (const auto& r : style.roles)
    if (static_cast<int>(by_role[r.name].size()) != r.count)
      res.fail("role " + r.name + " has " +
               std::to_string(by_role[r.name].size()) + " components, expected " +
               std::to_string(r.count));

  // Interface coverage: each (component, feature-of-its-role) pair carries a
  // non-empty choice of implementing products, and nothing else.
  std::size_t expected_pairs = 0;
  for (const auto& [id, role] : model.components) {
    for (const auto* f : style.features_of_role(role)) {
      ++expected_pairs;
      auto it = model.interface_choice.find({id, f->name});
      if (it == model.interface_choice.end() || it->second.empty()) {
        res.fail("component " + id + " lacks an interface for feature " + f->name);
        continue;
      }
      for (const auto& product : it->second) {
        const auto* decl = style.find_interface(product);
        if (!decl || decl->feature != f->name)
          res.fail("interface " + product + " does not implement " + f->name);
      }
      if (style.has_constraint(StyleConstraint::Kind::UniqueFeature, role,
                               f->name) &&
          it->second.size() > 1)
        res.fail("unique_feature(" + role + "," + f->name + ") violated by " + id);
    }
  }
  if (model.interface_choice.size() != expected_pairs)
    res.fail("interface choice map has stray entries");

  for (const auto& c : style.constraints)
    if (c.kind == StyleConstraint::Kind::UniqueRole &&
        by_role[c.role].size() > 1)
      res.fail("unique_role(" + c.role + ") violated");

  // Mapping predicates, evaluated on the interaction edges.
  std::set<std::pair<std::string, std::string>> justified;
  for (const auto& [a, b] : model.interaction_edges) {
    const auto* ra = model.role_of(a);
    const auto* rb = model.role_of(b);
    if (!ra || !rb) {
      res.fail("edge endpoint is not a component: " + a + "->" + b);
      continue;
    }
    bool found = false;
    for (const auto& m : style.maps)
      if (m.left_role == *ra && m.right_role == *rb) found = true;
    if (!found)
      res.fail("edge " + a + "->" + b + " is not justified by any Map");
  }

  std::set<std::pair<std::string, std::string>> seen_pairs;
  for (const auto& m : style.maps) {
    const auto& left_all = by_role[m.left_role];
    const auto& right_all = by_role[m.right_role];
    std::set<std::string> left_used, right_used;
    std::set<std::pair<std::string, std::string>> pair_edges;
    for (const auto& [a, b] : model.interaction_edges) {
      const auto* ra = model.role_of(a);
      const auto* rb = model.role_of(b);
      if (ra && rb && *ra == m.left_role && *rb == m.right_role) {
        left_used.insert(a);
        right_used.insert(b);
        pair_edges.insert({a, b});
      }
    }
    std::string tag = m.left_role + "->" + m.right_role;
    if (pair_edges.empty()) {
      res.fail("Map " + tag + " induces no interaction edge");
      continue;
    }
    // The mapping atom relates a left set to a right set, so the induced
    // edges must form a complete bipartite block (diagonal excluded).
    for (const auto& a : left_used)
      for (const auto& b : right_used)
        if (a != b && !pair_edges.count({a, b}))
          res.fail("Map " + tag + " edges are not a complete block: missing " +
                   a + "->" + b);
    auto q = modelfind_detail::quantifiers(m.multiplicity);
    if (!modelfind_detail::quantifier_holds(q.left, left_used.size(),
                                            left_all.size()))
      res.fail("Map " + tag + " " + multiplicity_name(m.multiplicity) +
               " violated on the left side");
    if (!modelfind_detail::quantifier_holds(q.right, right_used.size(),
                                            right_all.size()))
      res.fail("Map " + tag + " " + multiplicity_name(m.multiplicity) +
               " violated on the right side");
  }

  // Every component participates in at least one mapping.
  for (const auto& [id, role] : model.components) {
    bool in_edge = false;
    for (const auto& [a, b] : model.interaction_edges)
      if (a == id || b == id) in_edge = true;
    if (!in_edge) res.fail("component " + id + " participates in no mapping");
  }
  return res;
}

// ---------------------------------------------------------------------------
// enumerate_subsystems
// ---------------------------------------------------------------------------

namespace modelfind_detail {

struct SubsystemSearch {
  const ArchStyleSpec& style;
  std::vector<std::string> comp_roles;              // component index -> role
  std::vector<std::pair<std::size_t, int>> role_blocks; // (offset, size) per role
  // slot = (component index, feature index into style.features)
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  std::vector<std::vector<std::set<std::string>>> slot_options;
  std::vector<std::vector<std::pair<std::set<int>, std::set<int>>>> map_options;

  explicit SubsystemSearch(const ArchStyleSpec& s) : style(s) {}
};

inline void subsets_rec(const std::vector<int>& pool, bool full_only,
                        bool single_only,
                        std::vector<std::set<int>>& out) {
  if (full_only) {
    out.emplace_back(pool.begin(), pool.end());
    return;
  }
  std::uint64_t n = pool.size();
  detail::require(n < 63, "role size within word size");
  for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
    if (single_only && (mask & (mask - 1)) != 0) continue;
    std::set<int> s;
    for (std::uint64_t bit = 0; bit < n; ++bit)
      if (mask & (1ULL << bit)) s.insert(pool[bit]);
    out.push_back(std::move(s));
  }
}

inline std::string encode_subsystem(
    const SubsystemSearch& search,
    const std::vector<std::vector<const std::set<std::string>*>>& comp_ifaces,
    const std::set<std::pair<int, int>>& edges, const std::vector<int>& perm) {
  // perm maps component index -> relabeled index (within its role block).
  std::string out;
  std::vector<int> inverse(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i)
    inverse[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
  for (std::size_t newi = 0; newi < perm.size(); ++newi) {
    std::size_t old = static_cast<std::size_t>(inverse[newi]);
    out += search.comp_roles[old] + "{";
    for (const auto* s : comp_ifaces[old]) {
      for (const auto& name : *s) out += name + ",";
      out += "/";
    }
    out += "}";
  }
  std::vector<std::pair<int, int>> relabeled;
  for (auto [a, b] : edges) relabeled.emplace_back(perm[a], perm[b]);
  std::sort(relabeled.begin(), relabeled.end());
  for (auto [a, b] : relabeled)
    out += std::to_string(a) + ">" + std::to_string(b) + ";";
  return out;
}

inline void role_perms_rec(const SubsystemSearch& search, std::size_t block,
                           std::vector<int>& perm,
                           const std::function<void(const std::vector<int>&)>& fn) {
  if (block == search.role_blocks.size()) {
    fn(perm);
    return;
  }
  auto [offset, size] = search.role_blocks[block];
  std::vector<int> local(static_cast<std::size_t>(size));
  std::iota(local.begin(), local.end(), 0);
  do {
    for (int i = 0; i < size; ++i)
      perm[offset + static_cast<std::size_t>(i)] =
          static_cast<int>(offset) + local[static_cast<std::size_t>(i)];
    role_perms_rec(search, block + 1, perm, fn);
  } while (std::next_permutation(local.begin(), local.end()));
}

inline std::string canonical_subsystem(
    const SubsystemSearch& search,
    const std::vector<std::vector<const std::set<std::string>*>>& comp_ifaces,
    const std::set<std::pair<int, int>>& edges) {
  std::vector<int> perm(search.comp_roles.size());
  std::string best;
  role_perms_rec(search, 0, perm, [&](const std::vector<int>& p) {
    std::string enc = encode_subsystem(search, comp_ifaces, edges, p);
    if (best.empty() || enc < best) best = enc;
  });
  return best;
}

} // namespace modelfind_detail

inline std::vector<SubsystemModel> enumerate_subsystems(
    const ArchStyleSpec& style, const Bounds& bounds) {
  using namespace modelfind_detail;

  if (!style_diagnostics(style).empty())
    throw ConfigError("style '" + style.name +
                      "' is not internally valid; run validate first");

  // unique_role with a declared count above one can never be satisfied.
  for (const auto& c : style.constraints)
    if (c.kind == StyleConstraint::Kind::UniqueRole) {
      const auto* r = style.find_role(c.role);
      if (r && r->count > 1)
        throw Unsatisfiable("unique_role(" + c.role +
                            ") contradicts declared count " +
                            std::to_string(r->count));
    }

  SubsystemSearch search(style);
  for (const auto& r : style.roles) {
    search.role_blocks.emplace_back(search.comp_roles.size(), r.count);
    for (int i = 0; i < r.count; ++i) search.comp_roles.push_back(r.name);
  }
  std::size_t n_comp = search.comp_roles.size();

  // Interface choice options per (component, feature) slot.
  for (std::size_t ci = 0; ci < n_comp; ++ci) {
    const auto& role = search.comp_roles[ci];
    for (std::size_t fi = 0; fi < style.features.size(); ++fi) {
      const auto& f = style.features[fi];
      bool owns = false;
      for (const auto& r : f.owning_roles)
        if (r == role) owns = true;
      if (!owns) continue;
      auto products = style.interfaces_of_feature(f.name);
      if (products.empty())
        throw Unsatisfiable("feature " + f.name + " has no interface");
      bool unique = style.has_constraint(StyleConstraint::Kind::UniqueFeature,
                                         role, f.name);
      std::vector<std::set<std::string>> options;
      std::uint64_t n = products.size();
      detail::require(n < 63, "interface count within word size");
      for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
        if (unique && (mask & (mask - 1)) != 0) continue;
        std::set<std::string> s;
        for (std::uint64_t bit = 0; bit < n; ++bit)
          if (mask & (1ULL << bit)) s.insert(products[bit]->name);
        options.push_back(std::move(s));
      }
      search.slots.emplace_back(ci, fi);
      search.slot_options.push_back(std::move(options));
    }
  }

  // Mapping options: (left set, right set) choices per declared Map.
  for (const auto& m : style.maps) {
    std::vector<int> left_pool, right_pool;
    for (std::size_t ci = 0; ci < n_comp; ++ci) {
      if (search.comp_roles[ci] == m.left_role)
        left_pool.push_back(static_cast<int>(ci));
      if (search.comp_roles[ci] == m.right_role)
        right_pool.push_back(static_cast<int>(ci));
    }
    auto q = quantifiers(m.multiplicity);
    std::vector<std::set<int>> lefts, rights;
    subsets_rec(left_pool, q.left == Quantifier::Kind::All,
                q.left == Quantifier::Kind::One, lefts);
    subsets_rec(right_pool, q.right == Quantifier::Kind::All,
                q.right == Quantifier::Kind::One, rights);
    std::vector<std::pair<std::set<int>, std::set<int>>> options;
    for (const auto& l : lefts)
      for (const auto& r : rights) options.emplace_back(l, r);
    if (options.empty())
      throw Unsatisfiable("Map " + m.left_role + " " + m.right_role +
                          " cannot be instantiated");
    search.map_options.push_back(std::move(options));
  }

  std::map<std::string, SubsystemModel> found;

  // Walk the cross product of slot choices and map choices.
  std::vector<std::size_t> slot_pick(search.slots.size(), 0);
  std::vector<std::size_t> map_pick(search.map_options.size(), 0);

  auto build_and_consider = [&]() {
    // Interaction edges from the chosen map sets.
    std::set<std::pair<int, int>> edges;
    for (std::size_t mi = 0; mi < style.maps.size(); ++mi) {
      const auto& [l, r] = search.map_options[mi][map_pick[mi]];
      for (int a : l)
        for (int b : r)
          if (a != b) edges.insert({a, b});
    }

    // Edge-level re-validation keeps multiple maps over one role pair
    // consistent with the checker's complete-block reading.
    for (std::size_t mi = 0; mi < style.maps.size(); ++mi) {
      const auto& m = style.maps[mi];
      std::set<int> left_used, right_used, left_all, right_all;
      for (std::size_t ci = 0; ci < n_comp; ++ci) {
        if (search.comp_roles[ci] == m.left_role)
          left_all.insert(static_cast<int>(ci));
        if (search.comp_roles[ci] == m.right_role)
          right_all.insert(static_cast<int>(ci));
      }
      std::set<std::pair<int, int>> pair_edges;
      for (auto [a, b] : edges)
        if (left_all.count(a) && right_all.count(b)) {
          left_used.insert(a);
          right_used.insert(b);
          pair_edges.insert({a, b});
        }
      if (pair_edges.empty()) return;
      for (int a : left_used)
        for (int b : right_used)
          if (a != b && !pair_edges.count({a, b})) return;
      auto q = quantifiers(m.multiplicity);
      if (!quantifier_holds(q.left, left_used.size(), left_all.size())) return;
      if (!quantifier_holds(q.right, right_used.size(), right_all.size()))
        return;
    }

    // Every component participates in some mapping.
    std::vector<bool> participates(n_comp, false);
    for (auto [a, b] : edges) {
      participates[static_cast<std::size_t>(a)] = true;
      participates[static_cast<std::size_t>(b)] = true;
    }
    for (bool p : participates)
      if (!p) return;

    // Gather per-component interface choices (feature declaration order).
    std::vector<std::vector<const std::set<std::string>*>> comp_ifaces(n_comp);
    for (std::size_t si = 0; si < search.slots.size(); ++si) {
      auto [ci, fi] = search.slots[si];
      (void)fi;
      comp_ifaces[ci].push_back(&search.slot_options[si][slot_pick[si]]);
    }

    std::string enc = canonical_subsystem(search, comp_ifaces, edges);
    if (found.count(enc)) return;

    SubsystemModel model;
    for (std::size_t ci = 0; ci < n_comp; ++ci)
      model.components.emplace_back("Component" + std::to_string(ci),
                                    search.comp_roles[ci]);
    for (std::size_t si = 0; si < search.slots.size(); ++si) {
      auto [ci, fi] = search.slots[si];
      model.interface_choice[{model.components[ci].first,
                              style.features[fi].name}] =
          search.slot_options[si][slot_pick[si]];
    }
    for (auto [a, b] : edges)
      model.interaction_edges.insert(
          {model.components[static_cast<std::size_t>(a)].first,
           model.components[static_cast<std::size_t>(b)].first});
    found.emplace(std::move(enc), std::move(model));
  };

  while (true) {
    build_and_consider();
    std::size_t i = 0;
    for (; i < slot_pick.size(); ++i) {
      if (++slot_pick[i] < search.slot_options[i].size()) break;
      slot_pick[i] = 0;
    }
    if (i < slot_pick.size()) continue;
    std::size_t j = 0;
    for (; j < map_pick.size(); ++j) {
      if (++map_pick[j] < search.map_options[j].size()) break;
      map_pick[j] = 0;
    }
    if (j == map_pick.size()) break;
  }

  if (found.empty())
    throw Unsatisfiable("no subsystem model satisfies style '" + style.name + "'");

  std::vector<SubsystemModel> out;
  for (auto& [enc, m] : found) out.push_back(std::move(m));
  if (bounds.seed != 0) {
    Rng rng(bounds.seed);
    rng.shuffle(out);
  }
  if (bounds.max_models != 0 && out.size() > bounds.max_models)
    out.resize(bounds.max_models);
  return out;
}

} // namespace scenforge
