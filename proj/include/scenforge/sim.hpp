#pragma once

// Two-player turn-based red/blue game over a generated scenario, at quest
// granularity (high-level) or task granularity (detailed).

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scenforge/errors.hpp"
#include "scenforge/rng.hpp"
#include "scenforge/scenario.hpp"
#include "scenforge/sim_config.hpp"

namespace scenforge {

struct Action {
  SimVerb verb = SimVerb::Pass;
  std::string target;
  bool operator==(const Action&) const = default;

  std::string to_string() const {
    std::string out = sim_verb_name(verb);
    if (!target.empty()) out += "(" + target + ")";
    return out;
  }
};

class WrongTurn : public Error {
public:
  WrongTurn() : Error("not this agent's turn", kExitInternal) {}
};

struct GameState {
  bool red_turn = true;
  int turn_index = 0;
  double red_budget = 0.0;
  double blue_budget = 0.0;
  std::map<std::string, bool> lock_unlocked;        // lock id -> open?
  std::map<std::string, bool> objective_completed;  // objective id
  std::set<std::string> caps;                       // red capabilities
  std::set<std::string> completed_quests;           // quest ids
  std::set<std::string> known_subsystems;           // red knowledge
  std::set<std::string> investigated;               // red knowledge
  std::set<std::string> known_targets;              // discovered key/obj ids
  std::set<std::string> compromised;                // components (detailed)
  std::set<std::string> blue_reported;              // quests seen by Monitor
  std::map<std::string, bool> blue_checked;         // component -> last result
  Rng rng{0};
};

struct Observation {
  bool success = true;
  std::string summary;
};

struct LogEntry {
  int turn = 0;
  bool red = true;
  std::string action;
  std::string outcome;
  double budget_after = 0.0;
};

struct EpisodeLog {
  enum class Verdict { RedWins, BlueWins } verdict = Verdict::BlueWins;
  std::vector<LogEntry> entries;
  int red_actions = 0;
};

// --------------------------------------------------------------------------
// State construction and reachability
// --------------------------------------------------------------------------

inline GameState new_game(const Scenario& scenario, const SimConfig& config) {
  config.validate();
  GameState st;
  st.red_budget = config.red_budget;
  st.blue_budget = config.blue_budget;
  for (const auto& l : scenario.high_level.locks) st.lock_unlocked[l.id] = false;
  for (const auto& o : scenario.high_level.objectives)
    st.objective_completed[o.id] = false;
  st.known_subsystems.insert(scenario.high_level.start_subsystem);
  st.rng = Rng(config.seed);
  return st;
}

// Subsystems the red agent can currently reach: graph traversal from the
// start subsystem where locked locks block passage.
inline std::set<std::string> reachable_subsystems(const GameState& st,
                                                  const Scenario& scenario) {
  const auto& g = scenario.high_level.graph;
  std::set<std::string> seen = {scenario.high_level.start_subsystem};
  std::vector<std::string> stack = {scenario.high_level.start_subsystem};
  while (!stack.empty()) {
    std::string cur = stack.back();
    stack.pop_back();
    for (const auto& nb : g.neighbors(cur)) {
      NodeKind k = g.kind_of(nb);
      bool traversable = k == NodeKind::Connector || k == NodeKind::Subsystem;
      if (k == NodeKind::Lock) {
        auto it = st.lock_unlocked.find(nb);
        traversable = it != st.lock_unlocked.end() && it->second;
      }
      if (!traversable) continue;
      if (seen.insert(nb).second) stack.push_back(nb);
    }
  }
  std::set<std::string> subs;
  for (const auto& id : seen)
    if (g.kind_of(id) == NodeKind::Subsystem) subs.insert(id);
  return subs;
}

// --------------------------------------------------------------------------
// Legal actions
// --------------------------------------------------------------------------

namespace sim_detail {

inline bool is_red_verb(SimVerb v) {
  switch (v) {
    case SimVerb::Explore:
    case SimVerb::Investigate:
    case SimVerb::KeyQuest:
    case SimVerb::ObjectiveQuest:
    case SimVerb::TopologyScan:
    case SimVerb::SubsystemScan:
    case SimVerb::ExploitInterface:
    case SimVerb::SearchKey:
    case SimVerb::AchieveObjective:
      return true;
    default:
      return false;
  }
}

inline bool task_fireable(const Task& t, const std::set<std::string>& caps) {
  for (const auto& tok : t.prereq.tokens)
    if (!caps.count(tok)) return false;
  for (const auto& tok : t.reward.tokens)
    if (!caps.count(tok)) return true; // something new to gain
  return false;
}

inline const Task* terminal_task(const Scenario& s, const Quest& q) {
  return s.find_task(q.chain.back());
}

} // namespace sim_detail

inline std::vector<Action> legal_actions(const GameState& st,
                                         const Scenario& scenario,
                                         const SimConfig& config,
                                         bool for_red) {
  if (for_red != st.red_turn) throw WrongTurn();
  std::vector<Action> out;
  const auto& h = scenario.high_level;

  if (!for_red) {
    if (st.blue_budget <= 0.0) return {{SimVerb::Pass, ""}};
    if (config.mode == SimMode::HighLevel) {
      for (const auto& s : h.subsystems()) out.push_back({SimVerb::Monitor, s});
    } else {
      for (const auto& [sid, sub] : scenario.environment.subsystems)
        for (const auto& c : sub.components)
          out.push_back({SimVerb::CheckCompromised, c.id});
      for (const auto& [sid, sub] : scenario.environment.subsystems)
        for (const auto& c : sub.components)
          out.push_back({SimVerb::ResetComponent, c.id});
    }
    for (const auto& l : h.locks) out.push_back({SimVerb::ResetLock, l.id});
    for (const auto& o : h.objectives)
      out.push_back({SimVerb::ResetObjective, o.id});
    out.push_back({SimVerb::Pass, ""});
    return out;
  }

  auto reachable = reachable_subsystems(st, scenario);

  if (config.mode == SimMode::HighLevel) {
    out.push_back({SimVerb::Explore, ""});
    for (const auto& s : reachable)
      if (st.known_subsystems.count(s)) out.push_back({SimVerb::Investigate, s});
    for (const auto& k : h.keys) {
      if (!st.known_targets.count(k.id)) continue;
      if (!reachable.count(k.subsystem)) continue;
      if (st.caps.count(k.capability)) continue;
      out.push_back({SimVerb::KeyQuest, k.id});
    }
    for (const auto& o : h.objectives) {
      if (!st.known_targets.count(o.id)) continue;
      if (!reachable.count(o.subsystem)) continue;
      if (st.objective_completed.at(o.id)) continue;
      out.push_back({SimVerb::ObjectiveQuest, o.id});
    }
    return out;
  }

  // Detailed mode.
  out.push_back({SimVerb::TopologyScan, ""});
  for (const auto& s : reachable) {
    if (!st.known_subsystems.count(s)) continue;
    auto it = scenario.low_level.find(s);
    if (it == scenario.low_level.end()) continue;
    bool fireable = false;
    for (const auto& t : it->second.tasks) {
      if (t.actions.empty()) continue;
      auto verb = t.actions.front().verb;
      if ((verb == ActionVerb::Scan || verb == ActionVerb::Pivot) &&
          sim_detail::task_fireable(t, st.caps))
        fireable = true;
    }
    if (fireable) out.push_back({SimVerb::SubsystemScan, s});
  }
  for (const auto& [sid, sub] : scenario.environment.subsystems) {
    if (!reachable.count(sid) || !st.known_subsystems.count(sid)) continue;
    auto ll = scenario.low_level.find(sid);
    if (ll == scenario.low_level.end()) continue;
    std::set<std::string> offered;
    for (const auto& t : ll->second.tasks) {
      if (t.actions.empty() || t.actions.front().verb != ActionVerb::Exploit)
        continue;
      if (!sim_detail::task_fireable(t, st.caps)) continue;
      const auto* vuln = [&]() -> const VulnerabilityNode* {
        for (const auto& v : sub.vulnerabilities)
          if (v.id == t.actions.front().target) return &v;
        return nullptr;
      }();
      if (vuln && offered.insert(vuln->interface_id).second)
        out.push_back({SimVerb::ExploitInterface, vuln->interface_id});
    }
  }
  for (const auto& k : h.keys) {
    if (!st.known_targets.count(k.id) || !reachable.count(k.subsystem)) continue;
    if (st.caps.count(k.capability)) continue;
    const auto* q = scenario.quest_for_target(k.id);
    const auto* t = q ? sim_detail::terminal_task(scenario, *q) : nullptr;
    if (t && t->prereq.subset_of(CapabilitySet{st.caps}))
      out.push_back({SimVerb::SearchKey, k.id});
  }
  for (const auto& o : h.objectives) {
    if (!st.known_targets.count(o.id) || !reachable.count(o.subsystem)) continue;
    if (st.objective_completed.at(o.id)) continue;
    const auto* q = scenario.quest_for_target(o.id);
    const auto* t = q ? sim_detail::terminal_task(scenario, *q) : nullptr;
    if (t && t->prereq.subset_of(CapabilitySet{st.caps}))
      out.push_back({SimVerb::AchieveObjective, o.id});
  }
  return out;
}

// --------------------------------------------------------------------------
// Action application
// --------------------------------------------------------------------------

namespace sim_detail {

inline void erase_component_caps(std::set<std::string>& caps,
                                 const std::string& component) {
  const std::string suffix = "_" + component;
  for (auto it = caps.begin(); it != caps.end();) {
    if (it->size() > suffix.size() &&
        it->compare(it->size() - suffix.size(), suffix.size(), suffix) == 0)
      it = caps.erase(it);
    else
      ++it;
  }
}

inline double quest_prob(const SimConfig& config, const Quest& q) {
  auto it = config.success_prob_overrides.find(q.id);
  return it != config.success_prob_overrides.end()
             ? it->second
             : config.default_quest_success_prob;
}

inline double task_prob(const SimConfig& config, const Task& t) {
  auto it = config.success_prob_overrides.find(t.id);
  return it != config.success_prob_overrides.end() ? it->second
                                                   : t.success_prob;
}

} // namespace sim_detail

inline Observation apply(GameState& st, const Action& action,
                         const Scenario& scenario, const SimConfig& config) {
  const bool red_action = sim_detail::is_red_verb(action.verb);
  const bool pass = action.verb == SimVerb::Pass;
  detail::require(pass || red_action == st.red_turn,
                  "action matches the agent whose turn it is");

  double cost = config.cost_of(action.verb);
  if (st.red_turn) st.red_budget -= cost;
  else st.blue_budget -= cost;

  Observation obs;
  const auto& h = scenario.high_level;

  switch (action.verb) {
    case SimVerb::Explore:
    case SimVerb::TopologyScan: {
      auto reach = reachable_subsystems(st, scenario);
      std::size_t before = st.known_subsystems.size();
      st.known_subsystems.insert(reach.begin(), reach.end());
      obs.summary = "subsystems:" + std::to_string(reach.size()) + " new:" +
                    std::to_string(st.known_subsystems.size() - before);
      break;
    }
    case SimVerb::Investigate:
    case SimVerb::SubsystemScan: {
      const std::string& s = action.target;
      st.investigated.insert(s);
      std::size_t found = 0;
      for (const auto& k : h.keys)
        if (k.subsystem == s && st.known_targets.insert(k.id).second) ++found;
      for (const auto& o : h.objectives)
        if (o.subsystem == s && st.known_targets.insert(o.id).second) ++found;
      obs.summary = "targets:" + std::to_string(found);
      if (action.verb == SimVerb::SubsystemScan) {
        auto it = scenario.low_level.find(s);
        detail::require(it != scenario.low_level.end(), "low level exists");
        std::size_t fired = 0, won = 0;
        for (const auto& t : it->second.tasks) {
          if (t.actions.empty()) continue;
          auto verb = t.actions.front().verb;
          if (verb != ActionVerb::Scan && verb != ActionVerb::Pivot) continue;
          if (!sim_detail::task_fireable(t, st.caps)) continue;
          ++fired;
          if (st.rng.bernoulli(sim_detail::task_prob(config, t))) {
            for (const auto& tok : t.reward.tokens) st.caps.insert(tok);
            ++won;
          }
        }
        obs.summary += " tasks:" + std::to_string(won) + "/" +
                       std::to_string(fired);
        obs.success = fired == 0 || won > 0;
      }
      break;
    }
    case SimVerb::KeyQuest:
    case SimVerb::ObjectiveQuest: {
      const auto* quest = scenario.quest_for_target(action.target);
      detail::require(quest != nullptr, "quest exists for target");
      obs.success = st.rng.bernoulli(sim_detail::quest_prob(config, *quest));
      if (obs.success) {
        st.caps.insert(quest->reward_capability);
        st.completed_quests.insert(quest->id);
        if (action.verb == SimVerb::KeyQuest) {
          for (const auto& k : h.keys)
            if (k.id == action.target) st.lock_unlocked[k.lock_id] = true;
        } else {
          st.objective_completed[action.target] = true;
        }
      }
      obs.summary = obs.success ? "completed" : "failed";
      break;
    }
    case SimVerb::ExploitInterface: {
      std::size_t fired = 0, won = 0;
      for (const auto& [sid, sub] : scenario.environment.subsystems) {
        for (const auto& v : sub.vulnerabilities) {
          if (v.interface_id != action.target) continue;
          auto ll = scenario.low_level.find(sid);
          detail::require(ll != scenario.low_level.end(), "low level exists");
          for (const auto& t : ll->second.tasks) {
            if (t.actions.empty() || t.actions.front().verb != ActionVerb::Exploit ||
                t.actions.front().target != v.id)
              continue;
            if (!sim_detail::task_fireable(t, st.caps)) continue;
            ++fired;
            if (st.rng.bernoulli(sim_detail::task_prob(config, t))) {
              for (const auto& tok : t.reward.tokens) st.caps.insert(tok);
              st.compromised.insert(v.interface_id.substr(
                  0, v.interface_id.find(':')));
              ++won;
            }
          }
        }
      }
      obs.success = won > 0;
      obs.summary = "exploits:" + std::to_string(won) + "/" +
                    std::to_string(fired);
      break;
    }
    case SimVerb::SearchKey:
    case SimVerb::AchieveObjective: {
      const auto* quest = scenario.quest_for_target(action.target);
      detail::require(quest != nullptr, "quest exists for target");
      const auto* terminal = sim_detail::terminal_task(scenario, *quest);
      detail::require(terminal != nullptr, "terminal task exists");
      obs.success = st.rng.bernoulli(sim_detail::task_prob(config, *terminal));
      if (obs.success) {
        st.caps.insert(quest->reward_capability);
        st.completed_quests.insert(quest->id);
        if (action.verb == SimVerb::SearchKey) {
          for (const auto& k : h.keys)
            if (k.id == action.target) st.lock_unlocked[k.lock_id] = true;
        } else {
          st.objective_completed[action.target] = true;
        }
      }
      obs.summary = obs.success ? "completed" : "failed";
      break;
    }
    case SimVerb::Monitor: {
      std::size_t reported = 0;
      for (const auto& q : scenario.quests) {
        if (q.subsystem != action.target) continue;
        if (!st.completed_quests.count(q.id)) continue;
        if (st.rng.bernoulli(config.monitor_false_negative_prob)) continue;
        st.blue_reported.insert(q.id);
        ++reported;
      }
      obs.summary = "completed-quests:" + std::to_string(reported);
      break;
    }
    case SimVerb::ResetLock: {
      st.lock_unlocked[action.target] = false;
      const auto* key = h.key_of_lock(action.target);
      if (key) {
        st.caps.erase(key->capability);
        const auto* quest = scenario.quest_for_target(key->id);
        if (quest) st.completed_quests.erase(quest->id);
      }
      obs.summary = "locked";
      break;
    }
    case SimVerb::ResetObjective: {
      st.objective_completed[action.target] = false;
      for (const auto& o : h.objectives)
        if (o.id == action.target) st.caps.erase(o.capability);
      const auto* quest = scenario.quest_for_target(action.target);
      if (quest) st.completed_quests.erase(quest->id);
      obs.summary = "reset";
      break;
    }
    case SimVerb::CheckCompromised: {
      bool hit = st.compromised.count(action.target) > 0;
      st.blue_checked[action.target] = hit;
      obs.success = true;
      obs.summary = hit ? "compromised" : "clean";
      break;
    }
    case SimVerb::ResetComponent: {
      st.compromised.erase(action.target);
      sim_detail::erase_component_caps(st.caps, action.target);
      obs.summary = "reset";
      break;
    }
    case SimVerb::Pass:
      obs.summary = "pass";
      break;
  }

  st.red_turn = !st.red_turn;
  ++st.turn_index;
  return obs;
}

// --------------------------------------------------------------------------
// Policies and episodes
// --------------------------------------------------------------------------

struct RedView {
  double budget = 0.0;
  SimMode mode = SimMode::HighLevel;
  std::set<std::string> caps;
  std::set<std::string> known_subsystems;
  std::set<std::string> investigated;
  std::set<std::string> known_targets;
  std::set<std::string> completed_quests;
};

struct BlueView {
  double budget = 0.0;
  std::set<std::string> reported_complete;
  std::map<std::string, bool> checked;
};

using RedPolicy = std::function<Action(const Scenario&, const RedView&,
                                       const std::vector<Action>&, Rng&)>;
using BluePolicy = std::function<Action(const Scenario&, const BlueView&,
                                        const std::vector<Action>&, Rng&)>;

inline RedView red_view(const GameState& st, const SimConfig& config) {
  RedView v;
  v.budget = st.red_budget;
  v.mode = config.mode;
  v.caps = st.caps;
  v.known_subsystems = st.known_subsystems;
  v.investigated = st.investigated;
  v.known_targets = st.known_targets;
  v.completed_quests = st.completed_quests;
  return v;
}

inline BlueView blue_view(const GameState& st) {
  BlueView v;
  v.budget = st.blue_budget;
  v.reported_complete = st.blue_reported;
  v.checked = st.blue_checked;
  return v;
}

// Follows quest chains: finish objectives when possible, otherwise collect
// keys, otherwise widen knowledge.
inline RedPolicy make_greedy_red() {
  return [](const Scenario&, const RedView& view,
            const std::vector<Action>& legal, Rng&) -> Action {
    auto first = [&](SimVerb verb) -> const Action* {
      for (const auto& a : legal)
        if (a.verb == verb) return &a;
      return nullptr;
    };
    for (SimVerb verb : {SimVerb::ObjectiveQuest, SimVerb::AchieveObjective,
                         SimVerb::KeyQuest, SimVerb::SearchKey,
                         SimVerb::ExploitInterface, SimVerb::SubsystemScan}) {
      if (const auto* a = first(verb)) return *a;
    }
    for (const auto& a : legal)
      if (a.verb == SimVerb::Investigate && !view.investigated.count(a.target))
        return a;
    if (const auto* a = first(SimVerb::Explore)) return *a;
    if (const auto* a = first(SimVerb::TopologyScan)) return *a;
    return legal.front();
  };
}

inline RedPolicy make_random_red() {
  return [](const Scenario&, const RedView&, const std::vector<Action>& legal,
            Rng& rng) { return legal[rng.uniform(legal.size())]; };
}

inline BluePolicy make_passive_blue() {
  return [](const Scenario&, const BlueView&, const std::vector<Action>&,
            Rng&) { return Action{SimVerb::Pass, ""}; };
}

inline BluePolicy make_random_blue() {
  return [](const Scenario&, const BlueView&, const std::vector<Action>& legal,
            Rng& rng) { return legal[rng.uniform(legal.size())]; };
}

inline EpisodeLog run_episode(const Scenario& scenario, const SimConfig& config,
                              const RedPolicy& red_policy,
                              const BluePolicy& blue_policy) {
  GameState st = new_game(scenario, config);
  Rng red_rng = Rng(config.seed).child(101);
  Rng blue_rng = Rng(config.seed).child(102);

  EpisodeLog log;
  auto all_objectives_done = [&]() {
    for (const auto& [id, done] : st.objective_completed)
      if (!done) return false;
    return true;
  };

  // Termination backstop derived from the cheapest red action.
  double min_cost = 1.0;
  for (SimVerb v : {SimVerb::Explore, SimVerb::Investigate, SimVerb::KeyQuest,
                    SimVerb::ObjectiveQuest, SimVerb::TopologyScan,
                    SimVerb::SubsystemScan, SimVerb::ExploitInterface,
                    SimVerb::SearchKey, SimVerb::AchieveObjective})
    min_cost = std::min(min_cost, config.cost_of(v));
  long max_red_actions =
      min_cost > 0.0
          ? static_cast<long>(st.red_budget / min_cost) + 2
          : 1000000L;

  while (true) {
    if (all_objectives_done()) {
      log.verdict = EpisodeLog::Verdict::RedWins;
      break;
    }
    // Red turn.
    {
      auto legal = legal_actions(st, scenario, config, true);
      Action a = red_policy(scenario, red_view(st, config), legal, red_rng);
      if (std::find(legal.begin(), legal.end(), a) == legal.end())
        throw PolicyError("red policy returned illegal action " + a.to_string());
      Observation obs = apply(st, a, scenario, config);
      log.entries.push_back(
          {st.turn_index - 1, true, a.to_string(), obs.summary, st.red_budget});
      ++log.red_actions;
    }
    if (all_objectives_done()) {
      log.verdict = EpisodeLog::Verdict::RedWins;
      break;
    }
    if (st.red_budget <= 0.0) {
      log.verdict = EpisodeLog::Verdict::BlueWins;
      break;
    }
    if (log.red_actions > max_red_actions)
      throw InternalError("episode exceeded the termination bound");

    // Blue turn.
    {
      auto legal = legal_actions(st, scenario, config, false);
      Action a = blue_policy(scenario, blue_view(st), legal, blue_rng);
      if (std::find(legal.begin(), legal.end(), a) == legal.end())
        throw PolicyError("blue policy returned illegal action " + a.to_string());
      Observation obs = apply(st, a, scenario, config);
      log.entries.push_back(
          {st.turn_index - 1, false, a.to_string(), obs.summary, st.blue_budget});
    }
  }
  return log;
}

// Line-delimited export, one action-outcome record per line.
inline std::string format_episode(const EpisodeLog& log) {
  std::string out;
  for (const auto& e : log.entries) {
    out += std::to_string(e.turn);
    out += e.red ? " red " : " blue ";
    out += e.action + " " + e.outcome + " budget=";
    char buf[32];
    snprintf(buf, sizeof buf, "%.6g", e.budget_after);
    out += buf;
    out += "\n";
  }
  out += log.verdict == EpisodeLog::Verdict::RedWins ? "verdict RedWins\n"
                                                     : "verdict BlueWins\n";
  return out;
}

} // namespace scenforge
