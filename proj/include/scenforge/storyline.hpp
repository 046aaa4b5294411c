#pragma once

// High-level storyline generation over the topology graph: lock placement,
// key placement with the start point, and objective placement. All three
// are deterministic given (input graph, parameters, seed).

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scenforge/envgen.hpp"
#include "scenforge/errors.hpp"
#include "scenforge/graph.hpp"

namespace scenforge {

struct LockInfo {
  std::string id;        // "lock0", ...
  std::string connector; // owning connector
  std::vector<std::string> redirected; // far endpoints moved onto the lock
  bool operator==(const LockInfo&) const = default;
};

struct KeyInfo {
  std::string id;         // "key0", ...
  std::string lock_id;    // the lock this key opens
  std::string subsystem;  // where the key is placed
  std::string capability; // fresh token, e.g. "Key0"
  bool operator==(const KeyInfo&) const = default;
};

struct ObjectiveInfo {
  std::string id;         // "obj0", ...
  std::string subsystem;
  std::string capability; // fresh token, e.g. "Objective0"
  bool operator==(const ObjectiveInfo&) const = default;
};

struct HighLevelStoryline {
  Graph graph; // topology graph extended with locks, keys, Start, objectives
  std::map<std::string, std::string> subsystem_style;
  std::vector<LockInfo> locks;
  std::vector<KeyInfo> keys;
  std::string start_subsystem;
  std::vector<ObjectiveInfo> objectives;

  const KeyInfo* key_of_lock(const std::string& lock_id) const {
    for (const auto& k : keys)
      if (k.lock_id == lock_id) return &k;
    return nullptr;
  }
  std::vector<std::string> subsystems() const {
    return graph.node_ids(NodeKind::Subsystem);
  }
  bool operator==(const HighLevelStoryline&) const = default;
};

// --------------------------------------------------------------------------
// Lock generation
// --------------------------------------------------------------------------

// Places up to n_locks locks. Each lock attaches to a distinct connector,
// drawn without replacement, and takes over a uniformly chosen non-empty
// subset of that connector's non-lock edges. The effective count is clamped
// to |connectors| - 1 (at least 1) so a lock-free connector region remains.
template <typename RngT>
HighLevelStoryline generate_locks(const TopologyGraph& base, int n_locks,
                                  RngT& rng) {
  HighLevelStoryline out;
  out.graph = base.graph;
  out.subsystem_style = base.subsystem_style;

  std::vector<std::string> candidates = base.connectors();
  if (candidates.empty() || n_locks <= 0) return out;

  int clamp = std::max<int>(1, static_cast<int>(candidates.size()) - 1);
  int effective = std::min(n_locks, clamp);

  for (int i = 0; i < effective; ++i) {
    std::size_t pick = static_cast<std::size_t>(rng.uniform(candidates.size()));
    std::string c = candidates[pick];
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));

    // Edges whose far endpoint is a lock stay put, so no lock-lock edge can
    // ever form.
    std::vector<std::string> eligible;
    for (const auto& far : out.graph.neighbors(c))
      if (out.graph.kind_of(far) != NodeKind::Lock) eligible.push_back(far);
    detail::require(!eligible.empty(), "connector retains a non-lock edge");

    detail::require(eligible.size() < 63, "incident edge count within word size");
    std::uint64_t mask =
        rng.uniform((1ULL << eligible.size()) - 1) + 1; // non-empty subset

    LockInfo lock;
    lock.id = "lock" + std::to_string(out.locks.size());
    lock.connector = c;
    out.graph.add_node(lock.id, NodeKind::Lock);
    out.graph.add_edge(lock.id, c);
    for (std::size_t bit = 0; bit < eligible.size(); ++bit) {
      if (!(mask & (1ULL << bit))) continue;
      const auto& far = eligible[bit];
      out.graph.remove_edge(c, far);
      out.graph.add_edge(lock.id, far);
      lock.redirected.push_back(far);
    }
    out.locks.push_back(std::move(lock));
  }
  return out;
}

// --------------------------------------------------------------------------
// Key generation
// --------------------------------------------------------------------------

namespace storyline_detail {

inline Graph without_locks(const Graph& g) {
  Graph out = g;
  for (const auto& n : g.nodes())
    if (n.kind == NodeKind::Lock) out.remove_node(n.id);
  return out;
}

inline std::vector<std::string> sorted_subsystems_in(
    const Graph& g, const std::set<std::string>& nodes) {
  std::vector<std::string> out;
  for (const auto& id : nodes)
    if (g.has_node(id) && g.kind_of(id) == NodeKind::Subsystem)
      out.push_back(id);
  return out; // already sorted: std::set iteration
}

} // namespace storyline_detail

// Phase 1 removes the locks, disconnecting the graph into regions. Phase 2
// places Start on a random subsystem of a random region. Phase 3 binds one
// key per lock: a frontier lock adjacent to the merged region is opened, its
// key is placed on a subsystem already merged, and the regions the lock
// bridges are merged in. The number of keys is always |locks|; a key per
// lock is what keeps every lock openable.
template <typename RngT>
HighLevelStoryline generate_keys(const HighLevelStoryline& tl, int /*n_keys*/,
                                 RngT& rng) {
  HighLevelStoryline out = tl;

  Graph stripped = storyline_detail::without_locks(out.graph);
  auto components = stripped.connected_components();

  std::vector<std::size_t> with_subsystems;
  for (std::size_t i = 0; i < components.size(); ++i)
    if (!storyline_detail::sorted_subsystems_in(stripped, components[i]).empty())
      with_subsystems.push_back(i);
  detail::require(!with_subsystems.empty(),
                  "some region contains a subsystem");

  std::size_t start_region =
      with_subsystems[rng.uniform(with_subsystems.size())];
  auto start_candidates = storyline_detail::sorted_subsystems_in(
      stripped, components[start_region]);
  out.start_subsystem = start_candidates[rng.uniform(start_candidates.size())];
  out.graph.add_node("start", NodeKind::Start);
  out.graph.add_edge("start", out.start_subsystem);

  std::set<std::string> merged = components[start_region];
  std::vector<std::set<std::string>> remaining;
  for (std::size_t i = 0; i < components.size(); ++i)
    if (i != start_region) remaining.push_back(components[i]);

  std::set<std::string> opened;
  for (std::size_t i = 0; i < out.locks.size(); ++i) {
    std::vector<std::string> frontier;
    for (const auto& lock : out.locks) {
      if (opened.count(lock.id)) continue;
      for (const auto& nb : out.graph.neighbors(lock.id))
        if (merged.count(nb)) {
          frontier.push_back(lock.id);
          break;
        }
    }
    detail::require(!frontier.empty(), "a frontier lock exists");
    const std::string lock_id = frontier[rng.uniform(frontier.size())];
    opened.insert(lock_id);
    merged.insert(lock_id);

    auto key_candidates =
        storyline_detail::sorted_subsystems_in(out.graph, merged);
    detail::require(!key_candidates.empty(), "merged region has a subsystem");
    KeyInfo key;
    key.id = "key" + std::to_string(out.keys.size());
    key.lock_id = lock_id;
    key.subsystem = key_candidates[rng.uniform(key_candidates.size())];
    key.capability = "Key" + std::to_string(out.keys.size());
    out.graph.add_node(key.id, NodeKind::Key);
    out.graph.add_edge(key.id, key.subsystem);
    out.keys.push_back(key);

    // Merge every region the lock bridges to.
    auto lock_neighbors = out.graph.neighbors(lock_id);
    for (auto it = remaining.begin(); it != remaining.end();) {
      bool bridged = false;
      for (const auto& nb : lock_neighbors)
        if (it->count(nb)) bridged = true;
      if (bridged) {
        merged.insert(it->begin(), it->end());
        it = remaining.erase(it);
      } else {
        ++it;
      }
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Objective generation
// --------------------------------------------------------------------------

// Subsystems ranked ascending by (holds a key, holds the start point), ties
// kept in creation order; the subsystem at 1-based rank r contributes
// ceil(|S| / r) copies to the sampling multiset.
inline std::vector<std::string> rank_subsystems(const HighLevelStoryline& tlk) {
  std::vector<std::string> subs = tlk.subsystems();
  std::set<std::string> with_key;
  for (const auto& k : tlk.keys) with_key.insert(k.subsystem);

  std::vector<std::pair<std::pair<int, int>, std::string>> scored;
  for (const auto& s : subs) {
    int key_score = with_key.count(s) ? 1 : 0;
    int start_score = s == tlk.start_subsystem ? 1 : 0;
    scored.push_back({{key_score, start_score}, s});
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::string> multiset;
  std::size_t n = scored.size();
  for (std::size_t r = 1; r <= n; ++r) {
    std::size_t copies = (n + r - 1) / r; // ceil(n / r)
    for (std::size_t i = 0; i < copies; ++i)
      multiset.push_back(scored[r - 1].second);
  }
  return multiset;
}

// Draws subsystems from the rank multiset, at most one objective each. The
// start subsystem is excluded unless it is the only subsystem.
template <typename RngT>
HighLevelStoryline generate_objectives(const HighLevelStoryline& tlk, int n_obj,
                                       RngT& rng) {
  HighLevelStoryline out = tlk;
  if (n_obj <= 0) return out;

  auto subsystems = out.subsystems();
  int eligible = std::max<int>(1, static_cast<int>(subsystems.size()) - 1);
  int effective = std::min(n_obj, eligible);

  std::vector<std::string> pool;
  for (const auto& s : rank_subsystems(out))
    if (s != out.start_subsystem) pool.push_back(s);
  if (pool.empty()) pool = rank_subsystems(out); // single-subsystem network

  for (int i = 0; i < effective && !pool.empty(); ++i) {
    const std::string s = pool[rng.uniform(pool.size())];
    ObjectiveInfo obj;
    obj.id = "obj" + std::to_string(out.objectives.size());
    obj.subsystem = s;
    obj.capability = "Objective" + std::to_string(out.objectives.size());
    out.graph.add_node(obj.id, NodeKind::Objective);
    out.graph.add_edge(obj.id, s);
    out.objectives.push_back(std::move(obj));
    pool.erase(std::remove(pool.begin(), pool.end(), s), pool.end());
  }
  return out;
}

// --------------------------------------------------------------------------
// Storyline validation
// --------------------------------------------------------------------------

struct StorylineCheck {
  bool ok = true;
  std::vector<std::string> problems;
  void fail(std::string p) {
    ok = false;
    problems.push_back(std::move(p));
  }
};

// Region induction: region(0) is the start component once locks are removed;
// a lock opens when its key's subsystem is already in the region, merging in
// whatever it bridges. Every lock must open and every subsystem must land in
// some region — the solvability core.
inline StorylineCheck validate_storyline(const HighLevelStoryline& h) {
  StorylineCheck res;

  for (const auto& [a, b] : h.graph.edges())
    if (h.graph.kind_of(a) == NodeKind::Lock &&
        h.graph.kind_of(b) == NodeKind::Lock)
      res.fail("edge between two locks: " + a + " -- " + b);

  std::set<std::string> lock_ids, keyed_locks;
  for (const auto& l : h.locks) lock_ids.insert(l.id);
  for (const auto& k : h.keys) {
    if (!lock_ids.count(k.lock_id))
      res.fail("key " + k.id + " references missing lock " + k.lock_id);
    if (!keyed_locks.insert(k.lock_id).second)
      res.fail("lock " + k.lock_id + " has more than one key");
  }
  if (keyed_locks.size() != lock_ids.size())
    res.fail("locks and keys are not in bijection");

  if (h.start_subsystem.empty() || !h.graph.has_node("start")) {
    res.fail("no start point placed");
    return res;
  }

  std::set<std::string> obj_subsystems;
  for (const auto& o : h.objectives) {
    if (h.graph.degree(o.id) != 1)
      res.fail("objective " + o.id + " does not have exactly one edge");
    if (!obj_subsystems.insert(o.subsystem).second)
      res.fail("subsystem " + o.subsystem + " holds two objectives");
    if (o.subsystem == h.start_subsystem && h.subsystems().size() > 1)
      res.fail("objective " + o.id + " placed on the start subsystem");
  }

  Graph stripped = storyline_detail::without_locks(h.graph);
  stripped.remove_node("start");
  for (const auto& k : h.keys) stripped.remove_node(k.id);
  for (const auto& o : h.objectives) stripped.remove_node(o.id);

  auto components = stripped.connected_components();
  auto component_of = [&](const std::string& id) -> const std::set<std::string>* {
    for (const auto& c : components)
      if (c.count(id)) return &c;
    return nullptr;
  };

  const auto* start_region = component_of(h.start_subsystem);
  if (!start_region) {
    res.fail("start subsystem not in stripped graph");
    return res;
  }
  std::set<std::string> region = *start_region;
  std::set<std::string> opened;
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& l : h.locks) {
      if (opened.count(l.id)) continue;
      const auto* key = h.key_of_lock(l.id);
      if (!key || !region.count(key->subsystem)) continue;
      opened.insert(l.id);
      progress = true;
      for (const auto& nb : h.graph.neighbors(l.id)) {
        const auto* comp = component_of(nb);
        if (comp) region.insert(comp->begin(), comp->end());
      }
    }
  }
  if (opened.size() != h.locks.size())
    res.fail("some lock can never be opened before its key is reachable");
  for (const auto& s : h.subsystems())
    if (!region.count(s)) res.fail("subsystem " + s + " unreachable in any region");
  return res;
}

} // namespace scenforge
