#pragma once

// Test-only oracles, written independently of the library code paths they
// check: brute-force model enumeration, permutation-sweep capability
// closure, a Jacobi eigensolver, naive NetSimile features, and a
// capability-state BFS for minimal task counts.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "scenforge/modelfind.hpp"
#include "scenforge/quests.hpp"
#include "scenforge/rng.hpp"
#include "scenforge/scenario.hpp"
#include "scenforge/specdsl.hpp"

namespace oracles {

using namespace scenforge;

// --------------------------------------------------------------------------
// Capability closure by sweeping tasks in many different orders. Confluence
// of the fixpoint means every order must agree; the sweep result is the
// reference value.
// --------------------------------------------------------------------------

inline std::set<std::string> closure_by_order(const std::vector<Task>& tasks,
                                              const std::set<std::string>& k0,
                                              const std::vector<std::size_t>& order) {
  std::set<std::string> have = k0;
  std::vector<bool> used(tasks.size(), false);
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t idx : order) {
      if (used[idx]) continue;
      bool ready = true;
      for (const auto& tok : tasks[idx].prereq.tokens)
        if (!have.count(tok)) ready = false;
      if (!ready) continue;
      for (const auto& tok : tasks[idx].reward.tokens) have.insert(tok);
      used[idx] = true;
      progress = true;
    }
  }
  return have;
}

// All orders for small universes, a seeded sample of orders otherwise.
// Returns the agreed closure and asserts agreement via the bool flag.
inline std::pair<std::set<std::string>, bool> brute_closure(
    const std::vector<Task>& tasks, const std::set<std::string>& k0,
    std::uint64_t seed = 1) {
  std::vector<std::size_t> order(tasks.size());
  std::iota(order.begin(), order.end(), 0);
  std::set<std::string> reference;
  bool first = true, agreed = true;
  if (tasks.size() <= 6) {
    std::sort(order.begin(), order.end());
    do {
      auto got = closure_by_order(tasks, k0, order);
      if (first) reference = got;
      else if (got != reference) agreed = false;
      first = false;
    } while (std::next_permutation(order.begin(), order.end()));
  } else {
    Rng rng(seed);
    for (int trial = 0; trial < 200; ++trial) {
      rng.shuffle(order);
      auto got = closure_by_order(tasks, k0, order);
      if (first) reference = got;
      else if (got != reference) agreed = false;
      first = false;
    }
  }
  return {reference, agreed};
}

// --------------------------------------------------------------------------
// Brute-force topology enumeration: every labeled structure, filtered by a
// from-scratch predicate check, then counted up to isomorphism with an
// independent canonical form.
// --------------------------------------------------------------------------

struct RawTopology {
  int n_connectors;
  std::set<std::pair<int, int>> links;
  std::vector<int> routers; // per subsystem, style-major layout
};

inline bool raw_topology_valid(const RawTopology& t, const TopologySpec& spec) {
  std::vector<std::string> sub_styles;
  for (const auto& d : spec.subsystems)
    for (int i = 0; i < d.count; ++i) sub_styles.push_back(d.style);

  if (spec.network_kind == NetworkKind::FlatNet) {
    if (t.n_connectors != 1 || sub_styles.size() != 1) return false;
  } else {
    if (t.n_connectors <= 1) return false;
    std::vector<int> bridged(t.n_connectors, 0);
    for (int r : t.routers) bridged[r]++;
    for (int b : bridged)
      if (b < 1) return false;
  }
  // connectivity by BFS
  std::vector<std::set<int>> adj(t.n_connectors);
  for (auto [a, b] : t.links) {
    adj[a].insert(b);
    adj[b].insert(a);
  }
  std::set<int> seen = {0};
  std::vector<int> stack = {0};
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    for (int nb : adj[cur])
      if (seen.insert(nb).second) stack.push_back(nb);
  }
  if (static_cast<int>(seen.size()) != t.n_connectors) return false;

  for (const auto& c : spec.constraints) {
    if (c.kind != ConstraintDecl::Kind::Requires) continue;
    for (std::size_t i = 0; i < sub_styles.size(); ++i)
      for (std::size_t j = 0; j < sub_styles.size(); ++j) {
        if (i == j) continue;
        if (sub_styles[i] != c.args[0] || sub_styles[j] != c.args[1]) continue;
        int a = t.routers[i], b = t.routers[j];
        if (a == b) continue;
        if (!t.links.count({std::min(a, b), std::max(a, b)})) return false;
      }
  }
  return true;
}

inline std::string raw_topology_canon(const RawTopology& t,
                                      const TopologySpec& spec) {
  std::vector<std::pair<std::size_t, int>> groups;
  std::size_t off = 0;
  for (const auto& d : spec.subsystems) {
    groups.emplace_back(off, d.count);
    off += static_cast<std::size_t>(d.count);
  }
  std::vector<int> perm(t.n_connectors);
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  do {
    std::string enc;
    std::vector<std::pair<int, int>> links;
    for (auto [a, b] : t.links)
      links.emplace_back(std::min(perm[a], perm[b]), std::max(perm[a], perm[b]));
    std::sort(links.begin(), links.end());
    for (auto [a, b] : links)
      enc += std::to_string(a) + "-" + std::to_string(b) + ",";
    enc += "|";
    for (auto [o, size] : groups) {
      std::vector<int> rs;
      for (int i = 0; i < size; ++i) rs.push_back(perm[t.routers[o + i]]);
      std::sort(rs.begin(), rs.end());
      for (int r : rs) enc += std::to_string(r) + ".";
      enc += ";";
    }
    if (best.empty() || enc < best) best = enc;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::to_string(t.n_connectors) + "#" + best;
}

inline std::set<std::string> brute_topologies(const TopologySpec& spec,
                                              int max_connectors) {
  std::set<std::string> canon;
  int n_sub = spec.total_subsystems();
  int lo = spec.network_kind == NetworkKind::FlatNet ? 1 : 2;
  for (int n = lo; n <= max_connectors; ++n) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    for (std::uint64_t mask = 0; mask < (1ULL << pairs.size()); ++mask) {
      RawTopology t;
      t.n_connectors = n;
      for (std::size_t bit = 0; bit < pairs.size(); ++bit)
        if (mask & (1ULL << bit)) t.links.insert(pairs[bit]);
      // all labeled router assignments
      std::vector<int> routers(n_sub, 0);
      while (true) {
        t.routers = routers;
        if (raw_topology_valid(t, spec)) canon.insert(raw_topology_canon(t, spec));
        int i = 0;
        for (; i < n_sub; ++i) {
          if (++routers[i] < n) break;
          routers[i] = 0;
        }
        if (i == n_sub) break;
      }
      if (n_sub == 0) break;
    }
  }
  return canon;
}

// --------------------------------------------------------------------------
// Brute-force subsystem enumeration over every combination of interface
// subsets and mapping edge relations, checked from first principles.
// --------------------------------------------------------------------------

struct RawSubsystem {
  std::vector<std::string> roles; // component index -> role
  // per component: feature name -> set of product names
  std::vector<std::map<std::string, std::set<std::string>>> ifaces;
  std::set<std::pair<int, int>> edges;
};

inline bool raw_subsystem_valid(const RawSubsystem& m, const ArchStyleSpec& style) {
  // interface sets: non-empty, implement the feature, unique_feature holds
  for (std::size_t c = 0; c < m.roles.size(); ++c) {
    auto features = style.features_of_role(m.roles[c]);
    if (m.ifaces[c].size() != features.size()) return false;
    for (const auto* f : features) {
      auto it = m.ifaces[c].find(f->name);
      if (it == m.ifaces[c].end() || it->second.empty()) return false;
      for (const auto& p : it->second) {
        const auto* decl = style.find_interface(p);
        if (!decl || decl->feature != f->name) return false;
      }
      if (style.has_constraint(StyleConstraint::Kind::UniqueFeature, m.roles[c],
                               f->name) &&
          it->second.size() > 1)
        return false;
    }
  }
  for (const auto& c : style.constraints)
    if (c.kind == StyleConstraint::Kind::UniqueRole) {
      int count = 0;
      for (const auto& r : m.roles)
        if (r == c.role) ++count;
      if (count > 1) return false;
    }
  // mapping predicates per declared map
  for (const auto& map : style.maps) {
    std::set<int> left_all, right_all, left_used, right_used;
    for (std::size_t c = 0; c < m.roles.size(); ++c) {
      if (m.roles[c] == map.left_role) left_all.insert(static_cast<int>(c));
      if (m.roles[c] == map.right_role) right_all.insert(static_cast<int>(c));
    }
    std::set<std::pair<int, int>> pair_edges;
    for (auto [a, b] : m.edges)
      if (left_all.count(a) && right_all.count(b)) {
        left_used.insert(a);
        right_used.insert(b);
        pair_edges.insert({a, b});
      }
    if (pair_edges.empty()) return false;
    for (int a : left_used)
      for (int b : right_used)
        if (a != b && !pair_edges.count({a, b})) return false;
    auto holds = [](char q, std::size_t used, std::size_t all) {
      if (q == '1') return used == 1;
      if (q == 'S') return used >= 1;
      return used == all;
    };
    char lq, rq;
    switch (map.multiplicity) {
      case Multiplicity::OneToOne: lq = '1'; rq = '1'; break;
      case Multiplicity::OneToSome: lq = '1'; rq = 'S'; break;
      case Multiplicity::OneToAll: lq = '1'; rq = 'A'; break;
      case Multiplicity::SomeToOne: lq = 'S'; rq = '1'; break;
      case Multiplicity::SomeToSome: lq = 'S'; rq = 'S'; break;
      case Multiplicity::SomeToAll: lq = 'S'; rq = 'A'; break;
      case Multiplicity::AllToOne: lq = 'A'; rq = '1'; break;
      case Multiplicity::AllToSome: lq = 'A'; rq = 'S'; break;
      default: lq = 'A'; rq = 'A'; break;
    }
    if (!holds(lq, left_used.size(), left_all.size())) return false;
    if (!holds(rq, right_used.size(), right_all.size())) return false;
  }
  // every edge justified by a map
  for (auto [a, b] : m.edges) {
    bool ok = false;
    for (const auto& map : style.maps)
      if (m.roles[a] == map.left_role && m.roles[b] == map.right_role) ok = true;
    if (!ok) return false;
  }
  // participation
  for (std::size_t c = 0; c < m.roles.size(); ++c) {
    bool in = false;
    for (auto [a, b] : m.edges)
      if (a == static_cast<int>(c) || b == static_cast<int>(c)) in = true;
    if (!in) return false;
  }
  return true;
}

inline std::string raw_subsystem_canon(const RawSubsystem& m) {
  // permutations within contiguous role blocks
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= m.roles.size(); ++i) {
    if (i == m.roles.size() || m.roles[i] != m.roles[start]) {
      blocks.emplace_back(start, i - start);
      start = i;
    }
  }
  std::vector<int> perm(m.roles.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  // iterate the product of block permutations via odometer over factorials
  std::vector<std::vector<std::vector<int>>> block_perms;
  for (auto [off, len] : blocks) {
    std::vector<int> ids(len);
    std::iota(ids.begin(), ids.end(), static_cast<int>(off));
    std::vector<std::vector<int>> perms;
    std::sort(ids.begin(), ids.end());
    do perms.push_back(ids);
    while (std::next_permutation(ids.begin(), ids.end()));
    block_perms.push_back(std::move(perms));
  }
  std::vector<std::size_t> pick(block_perms.size(), 0);
  while (true) {
    for (std::size_t b = 0; b < blocks.size(); ++b)
      for (std::size_t k = 0; k < blocks[b].second; ++k)
        perm[blocks[b].first + k] = block_perms[b][pick[b]][k];
    // perm: new position -> old index; encode in new order
    std::string enc;
    for (std::size_t pos = 0; pos < perm.size(); ++pos) {
      int old = perm[pos];
      enc += m.roles[old] + "[";
      for (const auto& [f, products] : m.ifaces[old]) {
        enc += f + ":";
        for (const auto& p : products) enc += p + ",";
        enc += "/";
      }
      enc += "]";
    }
    std::vector<int> inv(perm.size());
    for (std::size_t pos = 0; pos < perm.size(); ++pos) inv[perm[pos]] = static_cast<int>(pos);
    std::vector<std::pair<int, int>> edges;
    for (auto [a, b] : m.edges) edges.emplace_back(inv[a], inv[b]);
    std::sort(edges.begin(), edges.end());
    for (auto [a, b] : edges) enc += std::to_string(a) + ">" + std::to_string(b) + ";";
    if (best.empty() || enc < best) best = enc;
    std::size_t b = 0;
    for (; b < pick.size(); ++b) {
      if (++pick[b] < block_perms[b].size()) break;
      pick[b] = 0;
    }
    if (b == pick.size()) break;
  }
  return best;
}

inline std::set<std::string> brute_subsystems(const ArchStyleSpec& style) {
  RawSubsystem base;
  for (const auto& r : style.roles)
    for (int i = 0; i < r.count; ++i) base.roles.push_back(r.name);
  std::size_t n = base.roles.size();

  // every (component, feature) subset choice
  struct Slot {
    std::size_t comp;
    std::string feature;
    std::vector<std::set<std::string>> options;
  };
  std::vector<Slot> slots;
  for (std::size_t c = 0; c < n; ++c)
    for (const auto* f : style.features_of_role(base.roles[c])) {
      Slot slot{c, f->name, {}};
      auto products = style.interfaces_of_feature(f->name);
      for (std::uint64_t mask = 1; mask < (1ULL << products.size()); ++mask) {
        std::set<std::string> s;
        for (std::size_t bit = 0; bit < products.size(); ++bit)
          if (mask & (1ULL << bit)) s.insert(products[bit]->name);
        slot.options.push_back(std::move(s));
      }
      slots.push_back(std::move(slot));
    }

  // every edge relation over ordered component pairs
  std::vector<std::pair<int, int>> all_pairs;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b) all_pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));

  std::set<std::string> canon;
  std::vector<std::size_t> pick(slots.size(), 0);
  while (true) {
    RawSubsystem m = base;
    m.ifaces.assign(n, {});
    for (std::size_t i = 0; i < slots.size(); ++i)
      m.ifaces[slots[i].comp][slots[i].feature] = slots[i].options[pick[i]];
    for (std::uint64_t mask = 0; mask < (1ULL << all_pairs.size()); ++mask) {
      m.edges.clear();
      for (std::size_t bit = 0; bit < all_pairs.size(); ++bit)
        if (mask & (1ULL << bit)) m.edges.insert(all_pairs[bit]);
      if (raw_subsystem_valid(m, style)) canon.insert(raw_subsystem_canon(m));
    }
    std::size_t i = 0;
    for (; i < pick.size(); ++i) {
      if (++pick[i] < slots[i].options.size()) break;
      pick[i] = 0;
    }
    if (i == pick.size()) break;
  }
  return canon;
}

// Library SubsystemModel -> oracle canonical form, for cross-checking that
// emitted models are pairwise non-isomorphic and brute-force-countable.
inline std::string canon_of_model(const SubsystemModel& model,
                                  const ArchStyleSpec&) {
  RawSubsystem raw;
  std::map<std::string, int> index;
  for (const auto& [id, role] : model.components) {
    index[id] = static_cast<int>(raw.roles.size());
    raw.roles.push_back(role);
  }
  raw.ifaces.assign(raw.roles.size(), {});
  for (const auto& [key, products] : model.interface_choice)
    raw.ifaces[static_cast<std::size_t>(index.at(key.first))][key.second] = products;
  for (const auto& [a, b] : model.interaction_edges)
    raw.edges.insert({index.at(a), index.at(b)});
  return raw_subsystem_canon(raw);
}

// --------------------------------------------------------------------------
// Jacobi eigensolver (symmetric), reference for pca2
// --------------------------------------------------------------------------

inline void jacobi_eigen(std::vector<std::vector<double>> a,
                         std::vector<double>& values,
                         std::vector<std::vector<double>>& vectors) {
  std::size_t d = a.size();
  vectors.assign(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) vectors[i][i] = 1.0;
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) {
        if (std::fabs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < d; ++k) {
          double vkp = vectors[k][p], vkq = vectors[k][q];
          vectors[k][p] = c * vkp - s * vkq;
          vectors[k][q] = s * vkp + c * vkq;
        }
      }
  }
  values.assign(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) values[i] = a[i][i];
}

// --------------------------------------------------------------------------
// Naive per-node NetSimile features, recomputed from first principles
// --------------------------------------------------------------------------

inline std::vector<std::array<double, 7>> naive_node_features(
    const std::vector<std::set<int>>& adj) {
  std::size_t n = adj.size();
  std::vector<std::array<double, 7>> out(n);
  auto clustering = [&](std::size_t i) {
    std::size_t d = adj[i].size();
    if (d < 2) return 0.0;
    long tri = 0;
    for (int a : adj[i])
      for (int b : adj[i])
        if (a < b && adj[a].count(b)) ++tri;
    return 2.0 * tri / (static_cast<double>(d) * (static_cast<double>(d) - 1));
  };
  for (std::size_t i = 0; i < n; ++i) {
    out[i][0] = static_cast<double>(adj[i].size());
    out[i][1] = clustering(i);
    double sd = 0, sc = 0;
    for (int a : adj[i]) {
      sd += static_cast<double>(adj[a].size());
      sc += clustering(static_cast<std::size_t>(a));
    }
    out[i][2] = adj[i].empty() ? 0 : sd / static_cast<double>(adj[i].size());
    out[i][3] = adj[i].empty() ? 0 : sc / static_cast<double>(adj[i].size());
    std::set<int> ego = adj[i];
    ego.insert(static_cast<int>(i));
    long internal = 0, outgoing = 0;
    std::set<int> beyond;
    for (int a : ego)
      for (int b : adj[a]) {
        if (ego.count(b)) {
          if (a < b) ++internal;
        } else {
          ++outgoing;
          beyond.insert(b);
        }
      }
    out[i][4] = static_cast<double>(internal);
    out[i][5] = static_cast<double>(outgoing);
    out[i][6] = static_cast<double>(beyond.size());
  }
  return out;
}

// --------------------------------------------------------------------------
// Minimal number of tasks to hold all goal tokens: BFS over capability
// states, honoring lock-gated subsystem reachability.
// --------------------------------------------------------------------------

inline long min_tasks_bfs(const Scenario& scenario) {
  std::vector<const Task*> tasks;
  for (const auto& t : scenario.tasks) tasks.push_back(&t);
  std::set<std::string> goals;
  for (const auto& o : scenario.high_level.objectives) goals.insert(o.capability);
  if (goals.empty()) return 0;

  std::map<std::string, std::string> key_token_to_lock;
  for (const auto& k : scenario.high_level.keys)
    key_token_to_lock[k.capability] = k.lock_id;

  auto reachable_subs = [&](const std::set<std::string>& caps) {
    const auto& g = scenario.high_level.graph;
    std::set<std::string> seen = {scenario.high_level.start_subsystem};
    std::vector<std::string> stack = {scenario.high_level.start_subsystem};
    while (!stack.empty()) {
      auto cur = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(cur)) {
        NodeKind kind = g.kind_of(nb);
        bool pass = kind == NodeKind::Connector || kind == NodeKind::Subsystem;
        if (kind == NodeKind::Lock) {
          const auto* key = scenario.high_level.key_of_lock(nb);
          pass = key && caps.count(key->capability);
        }
        if (pass && seen.insert(nb).second) stack.push_back(nb);
      }
    }
    return seen;
  };

  auto encode = [](const std::set<std::string>& caps) {
    std::string out;
    for (const auto& c : caps) out += c + "|";
    return out;
  };

  std::set<std::string> visited;
  std::vector<std::set<std::string>> frontier = {{}};
  visited.insert(encode({}));
  for (long depth = 0; depth <= static_cast<long>(tasks.size()); ++depth) {
    std::vector<std::set<std::string>> next;
    for (const auto& caps : frontier) {
      bool done = true;
      for (const auto& g : goals)
        if (!caps.count(g)) done = false;
      if (done) return depth;
      auto reach = reachable_subs(caps);
      for (const auto* t : tasks) {
        if (!t->subsystem.empty() && !reach.count(t->subsystem)) continue;
        bool ready = true;
        for (const auto& tok : t->prereq.tokens)
          if (!caps.count(tok)) ready = false;
        if (!ready) continue;
        auto grown = caps;
        for (const auto& tok : t->reward.tokens) grown.insert(tok);
        if (grown == caps) continue;
        if (visited.insert(encode(grown)).second) next.push_back(std::move(grown));
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return -1; // goals unreachable
}

// --------------------------------------------------------------------------
// Random inputs for property tests
// --------------------------------------------------------------------------

inline std::vector<Task> random_task_universe(Rng& rng, int max_tasks = 12) {
  int n_tasks = 1 + static_cast<int>(rng.uniform(static_cast<std::uint64_t>(max_tasks)));
  int n_tokens = 3 + static_cast<int>(rng.uniform(8));
  std::vector<std::string> tokens;
  for (int i = 0; i < n_tokens; ++i) tokens.push_back("cap" + std::to_string(i));
  std::vector<Task> tasks;
  for (int i = 0; i < n_tasks; ++i) {
    Task t;
    t.id = "rt" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    int n_pre = static_cast<int>(rng.uniform(3));
    for (int k = 0; k < n_pre; ++k)
      t.prereq.insert(tokens[rng.uniform(tokens.size())]);
    int n_rew = 1 + static_cast<int>(rng.uniform(2));
    for (int k = 0; k < n_rew; ++k) {
      auto tok = tokens[rng.uniform(tokens.size())];
      if (!t.prereq.contains(tok)) t.reward.insert(tok);
    }
    if (t.reward.empty()) t.reward.insert(tokens[0]);
    tasks.push_back(std::move(t));
  }
  return tasks;
}

inline std::vector<std::set<int>> random_graph(Rng& rng, int max_nodes = 12) {
  int n = 2 + static_cast<int>(rng.uniform(static_cast<std::uint64_t>(max_nodes - 1)));
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (rng.bernoulli(0.3)) {
        adj[static_cast<std::size_t>(a)].insert(b);
        adj[static_cast<std::size_t>(b)].insert(a);
      }
  return adj;
}

} // namespace oracles
