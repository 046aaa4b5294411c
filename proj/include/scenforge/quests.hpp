#pragma once

// Task universe per subsystem, the maximal-capability fixpoint, and quest
// generation: key and objective quests are chains of tasks culminating in a
// fresh reward capability.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scenforge/capability.hpp"
#include "scenforge/envgen.hpp"
#include "scenforge/errors.hpp"
#include "scenforge/graph.hpp"
#include "scenforge/storyline.hpp"

namespace scenforge {

enum class ActionVerb { Scan, Pivot, Exploit, Interact, Collect, Complete };

inline const char* action_verb_name(ActionVerb v) {
  switch (v) {
    case ActionVerb::Scan: return "Scan";
    case ActionVerb::Pivot: return "Pivot";
    case ActionVerb::Exploit: return "Exploit";
    case ActionVerb::Interact: return "Interact";
    case ActionVerb::Collect: return "Collect";
    case ActionVerb::Complete: return "Complete";
  }
  return "?";
}

struct ActionSpec {
  ActionVerb verb = ActionVerb::Scan;
  std::string target;
  bool operator==(const ActionSpec&) const = default;
};

struct Task {
  std::string id;
  CapabilitySet prereq; // K*
  std::vector<ActionSpec> actions;
  CapabilitySet reward; // K+
  double base_cost = 1.0;
  double success_prob = 0.9;
  std::string subsystem;
  bool operator==(const Task&) const = default;
};

struct Quest {
  std::string id;
  enum class Kind { Key, Objective } kind = Kind::Key;
  std::string reward_capability; // fresh token k_f
  std::vector<std::string> chain; // task ids in execution order
  std::string target;             // key or objective node id
  std::string subsystem;
  std::string culminating_component;
  bool operator==(const Quest&) const = default;
};

struct LowLevelStoryline {
  std::string subsystem_id;
  Graph graph; // components + interfaces + vulnerabilities + keys/objectives + E
  std::vector<Task> tasks;   // per-subsystem task table (terminals included)
  std::vector<Quest> quests;
  bool operator==(const LowLevelStoryline&) const = default;
};

class NoObtainableCapability : public Error {
public:
  explicit NoObtainableCapability(const std::string& subsystem)
      : Error("subsystem " + subsystem +
                  " has no obtainable component capability",
              kExitUnsatisfiable) {}
};

// --------------------------------------------------------------------------
// Task synthesis
// --------------------------------------------------------------------------

// The task universe of a subsystem graph: one entry scan per entrypoint
// component, one pivot per direction of every component-component edge, and
// one exploit per vulnerability node. All capability tokens are scoped.
inline std::vector<Task> synthesize_tasks(const SubsystemGraph& g) {
  std::vector<Task> out;

  for (const auto& c : g.components) {
    if (!c.entrypoint) continue;
    Task t;
    t.id = "t.scan." + c.id;
    t.actions = {{ActionVerb::Scan, c.id}};
    t.reward.insert(scoped_token("Reachable", c.id));
    t.subsystem = g.subsystem_id;
    out.push_back(std::move(t));
  }

  for (const auto& [a, b] : g.graph.edges()) {
    if (g.graph.kind_of(a) != NodeKind::Component ||
        g.graph.kind_of(b) != NodeKind::Component)
      continue;
    for (const auto& [from, to] :
         {std::pair{a, b}, std::pair{b, a}}) {
      Task t;
      t.id = "t.pivot." + from + "." + to;
      t.prereq.insert(scoped_token("InitialAccess", from));
      t.actions = {{ActionVerb::Pivot, to}};
      t.reward.insert(scoped_token("Reachable", to));
      t.subsystem = g.subsystem_id;
      out.push_back(std::move(t));
    }
  }

  for (const auto& v : g.vulnerabilities) {
    const auto* iface = g.find_interface(v.interface_id);
    detail::require(iface != nullptr, "vulnerability has an interface");
    Task t;
    t.id = "t.exploit." + v.id;
    t.prereq = iface->interaction_req;
    t.prereq.merge(v.exploit_req);
    t.actions = {{ActionVerb::Exploit, v.id}};
    for (const auto& tok : v.exploit_gain.tokens)
      if (!t.prereq.contains(tok)) t.reward.insert(tok);
    t.subsystem = g.subsystem_id;
    if (t.reward.empty()) continue; // gains nothing beyond its prerequisites
    out.push_back(std::move(t));
  }

  std::sort(out.begin(), out.end(),
            [](const Task& x, const Task& y) { return x.id < y.id; });
  return out;
}

// --------------------------------------------------------------------------
// Maximal capability set (least fixpoint, each task consumed at most once)
// --------------------------------------------------------------------------

inline CapabilitySet maximal_caps(const std::vector<Task>& tasks,
                                  const CapabilitySet& k0) {
  CapabilitySet k_max = k0;
  std::vector<bool> consumed(tasks.size(), false);
  bool progress = true;
  std::size_t remaining = tasks.size();
  while (progress && remaining > 0) {
    progress = false;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (consumed[i]) continue;
      if (!tasks[i].prereq.subset_of(k_max)) continue;
      k_max.merge(tasks[i].reward);
      consumed[i] = true;
      --remaining;
      progress = true;
    }
  }
  return k_max;
}

// --------------------------------------------------------------------------
// Quest chains
// --------------------------------------------------------------------------

namespace quest_detail {

// Greedy backward chaining: starting from the goal capability, repeatedly
// pick the executable task that rewards a still-unprovided capability,
// preferring fewest unsatisfied prerequisites, then lowest id. The support
// set is then emitted in forward executable order; in the rare case the
// greedy picks form a reward cycle, missing providers are pulled in from the
// fixpoint pass.
inline std::vector<std::size_t> chain_support(const std::vector<Task>& tasks,
                                              const std::string& goal,
                                              const CapabilitySet& k0) {
  CapabilitySet closure = maximal_caps(tasks, k0);
  detail::require(closure.contains(goal), "goal capability obtainable");

  std::vector<std::size_t> executable;
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (tasks[i].prereq.subset_of(closure)) executable.push_back(i);

  std::set<std::size_t> support;
  CapabilitySet provided = k0;
  std::set<std::string> needed = {goal};

  while (true) {
    std::vector<std::string> unsat;
    for (const auto& tok : needed)
      if (!provided.contains(tok)) unsat.push_back(tok);
    if (unsat.empty()) break;

    std::size_t best = tasks.size();
    std::size_t best_missing = 0;
    for (std::size_t i : executable) {
      if (support.count(i)) continue;
      bool rewards_needed = false;
      for (const auto& tok : unsat)
        if (tasks[i].reward.contains(tok)) rewards_needed = true;
      if (!rewards_needed) continue;
      std::size_t missing = 0;
      for (const auto& tok : tasks[i].prereq.tokens)
        if (!provided.contains(tok)) ++missing;
      if (best == tasks.size() || missing < best_missing ||
          (missing == best_missing && tasks[i].id < tasks[best].id)) {
        best = i;
        best_missing = missing;
      }
    }
    detail::require(best != tasks.size(), "a provider task exists");
    support.insert(best);
    provided.merge(tasks[best].reward);
    for (const auto& tok : tasks[best].prereq.tokens) needed.insert(tok);
  }

  // Forward ordering; stops as soon as the goal is held.
  std::vector<std::size_t> chain;
  CapabilitySet have = k0;
  std::set<std::size_t> emitted;
  while (!have.contains(goal)) {
    std::size_t next = tasks.size();
    for (std::size_t i : support) {
      if (emitted.count(i)) continue;
      if (!tasks[i].prereq.subset_of(have)) continue;
      if (next == tasks.size() || tasks[i].id < tasks[next].id) next = i;
    }
    if (next == tasks.size()) {
      // Reward cycle in the greedy picks: fall back to any executable task
      // that provides an unheld prerequisite of the stalled support tasks.
      std::set<std::string> stalled;
      for (std::size_t i : support)
        if (!emitted.count(i))
          for (const auto& tok : tasks[i].prereq.tokens)
            if (!have.contains(tok)) stalled.insert(tok);
      for (std::size_t i : executable) {
        if (emitted.count(i) || !tasks[i].prereq.subset_of(have)) continue;
        bool helps = false;
        for (const auto& tok : stalled)
          if (tasks[i].reward.contains(tok)) helps = true;
        if (helps && (next == tasks.size() || tasks[i].id < tasks[next].id))
          next = i;
      }
      detail::require(next != tasks.size(), "chain is completable");
      support.insert(next);
    }
    emitted.insert(next);
    have.merge(tasks[next].reward);
    chain.push_back(next);
  }
  return chain;
}

inline std::string owner_component_of(const std::string& scoped_cap,
                                      const SubsystemGraph& g) {
  for (const auto& c : g.components) {
    const std::string suffix = "_" + c.id;
    if (scoped_cap.size() > suffix.size() &&
        scoped_cap.compare(scoped_cap.size() - suffix.size(), suffix.size(),
                           suffix) == 0)
      return c.id;
  }
  return {};
}

} // namespace quest_detail

// Builds a quest for a chosen goal capability: the backward-chained support
// of k_g followed by a terminal Collect/Complete task rewarding the fresh
// token. Returns the quest plus its terminal task.
inline std::pair<Quest, Task> build_quest(const std::vector<Task>& tasks,
                                          const std::string& goal_cap,
                                          const std::string& component,
                                          Quest::Kind kind,
                                          const std::string& fresh_token,
                                          const std::string& target_id,
                                          const std::string& subsystem_id) {
  auto support = quest_detail::chain_support(tasks, goal_cap, CapabilitySet{});

  Task terminal;
  terminal.id = kind == Quest::Kind::Key ? "t.collect." + target_id
                                         : "t.complete." + target_id;
  terminal.prereq.insert(goal_cap);
  terminal.actions = {{kind == Quest::Kind::Key ? ActionVerb::Collect
                                                : ActionVerb::Complete,
                       target_id}};
  terminal.reward.insert(fresh_token);
  terminal.subsystem = subsystem_id;

  Quest quest;
  quest.id = "q." + target_id;
  quest.kind = kind;
  quest.reward_capability = fresh_token;
  for (std::size_t i : support) quest.chain.push_back(tasks[i].id);
  quest.chain.push_back(terminal.id);
  quest.target = target_id;
  quest.subsystem = subsystem_id;
  quest.culminating_component = component;
  return {std::move(quest), std::move(terminal)};
}

// Picks the quest goal uniformly over the obtainable component-scoped
// capabilities, then delegates to build_quest.
template <typename RngT>
std::pair<Quest, Task> generate_quest(const SubsystemGraph& g,
                                      const std::vector<Task>& tasks,
                                      Quest::Kind kind, RngT& rng,
                                      const std::string& fresh_token,
                                      const std::string& target_id) {
  CapabilitySet closure = maximal_caps(tasks, CapabilitySet{});
  std::vector<std::pair<std::string, std::string>> candidates; // (comp, cap)
  for (const auto& cap : closure.tokens) {
    auto owner = quest_detail::owner_component_of(cap, g);
    if (!owner.empty()) candidates.emplace_back(owner, cap);
  }
  if (candidates.empty()) throw NoObtainableCapability(g.subsystem_id);
  const auto& [component, goal] = candidates[rng.uniform(candidates.size())];
  return build_quest(tasks, goal, component, kind, fresh_token, target_id,
                     g.subsystem_id);
}

// --------------------------------------------------------------------------
// Low-level storylines
// --------------------------------------------------------------------------

namespace quest_detail {

inline std::set<std::string> reachable_with_all_keys(
    const HighLevelStoryline& h) {
  // With every key in hand all locks are passable, so plain reachability.
  std::set<std::string> seen = {h.start_subsystem};
  std::vector<std::string> stack = {h.start_subsystem};
  while (!stack.empty()) {
    std::string cur = stack.back();
    stack.pop_back();
    for (const auto& nb : h.graph.neighbors(cur)) {
      NodeKind k = h.graph.kind_of(nb);
      if (k != NodeKind::Connector && k != NodeKind::Subsystem &&
          k != NodeKind::Lock)
        continue;
      if (seen.insert(nb).second) stack.push_back(nb);
    }
  }
  return seen;
}

} // namespace quest_detail

// Per-subsystem low-level storyline graphs: the subsystem graph plus key,
// objective, and entry-marker nodes, with one quest per key or objective
// assigned by the high-level storyline.
template <typename RngT>
std::map<std::string, LowLevelStoryline> build_low_level(
    const HighLevelStoryline& h, const NetworkEnvironment& env, RngT& rng) {
  auto reachable = quest_detail::reachable_with_all_keys(h);

  std::map<std::string, LowLevelStoryline> out;
  for (const auto& node : h.graph.nodes()) {
    if (node.kind != NodeKind::Subsystem) continue;
    const std::string& sid = node.id;
    const auto& sub = env.subsystems.at(sid);

    LowLevelStoryline ll;
    ll.subsystem_id = sid;
    ll.graph = sub.graph;
    ll.tasks = synthesize_tasks(sub);

    if (reachable.count(sid)) {
      auto entries = sub.entrypoint_components();
      detail::require(!entries.empty(), "subsystem has an entrypoint");
      const std::string marker = "entry:" + sid;
      ll.graph.add_node(marker, NodeKind::EntryMarker);
      ll.graph.add_edge(marker, entries.front());
    }

    for (const auto& key : h.keys) {
      if (key.subsystem != sid) continue;
      auto [quest, terminal] = generate_quest(sub, ll.tasks, Quest::Kind::Key,
                                              rng, key.capability, key.id);
      ll.graph.add_node(key.id, NodeKind::Key);
      ll.graph.add_edge(key.id, quest.culminating_component);
      ll.tasks.push_back(terminal);
      ll.quests.push_back(std::move(quest));
    }
    for (const auto& obj : h.objectives) {
      if (obj.subsystem != sid) continue;
      auto [quest, terminal] = generate_quest(
          sub, ll.tasks, Quest::Kind::Objective, rng, obj.capability, obj.id);
      ll.graph.add_node(obj.id, NodeKind::Objective);
      ll.graph.add_edge(obj.id, quest.culminating_component);
      ll.tasks.push_back(terminal);
      ll.quests.push_back(std::move(quest));
    }
    out.emplace(sid, std::move(ll));
  }
  return out;
}

} // namespace scenforge
