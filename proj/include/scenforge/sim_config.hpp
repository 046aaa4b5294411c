#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "scenforge/errors.hpp"

namespace scenforge {

enum class SimMode { HighLevel, Detailed };

enum class SimVerb {
  // red, high-level
  Explore,
  Investigate,
  KeyQuest,
  ObjectiveQuest,
  // blue, high-level
  Monitor,
  ResetLock,
  ResetObjective,
  // red, detailed
  TopologyScan,
  SubsystemScan,
  ExploitInterface,
  SearchKey,
  AchieveObjective,
  // blue, detailed
  CheckCompromised,
  ResetComponent,
  // either side
  Pass,
};

inline const char* sim_verb_name(SimVerb v) {
  switch (v) {
    case SimVerb::Explore: return "Explore";
    case SimVerb::Investigate: return "Investigate";
    case SimVerb::KeyQuest: return "KeyQuest";
    case SimVerb::ObjectiveQuest: return "ObjectiveQuest";
    case SimVerb::Monitor: return "Monitor";
    case SimVerb::ResetLock: return "ResetLock";
    case SimVerb::ResetObjective: return "ResetObjective";
    case SimVerb::TopologyScan: return "TopologyScan";
    case SimVerb::SubsystemScan: return "SubsystemScan";
    case SimVerb::ExploitInterface: return "ExploitInterface";
    case SimVerb::SearchKey: return "SearchKey";
    case SimVerb::AchieveObjective: return "AchieveObjective";
    case SimVerb::CheckCompromised: return "CheckCompromised";
    case SimVerb::ResetComponent: return "ResetComponent";
    case SimVerb::Pass: return "Pass";
  }
  return "?";
}

struct SimConfig {
  SimMode mode = SimMode::HighLevel;
  // Per-quest (high-level) or per-task (detailed) success probabilities;
  // unlisted quests use default_quest_success_prob, unlisted tasks their own
  // synthesized success_prob.
  std::map<std::string, double> success_prob_overrides;
  double default_quest_success_prob = 0.9;
  double monitor_false_negative_prob = 0.0;
  std::map<std::string, double> action_costs; // by verb name
  double red_budget = 200.0;
  double blue_budget = 200.0;
  std::uint64_t seed = 0;

  double cost_of(SimVerb verb) const {
    auto it = action_costs.find(sim_verb_name(verb));
    if (it != action_costs.end()) return it->second;
    if (verb == SimVerb::Pass) return 0.0;
    if (verb == SimVerb::Monitor) return 0.5;
    return 1.0;
  }

  void validate() const {
    auto check01 = [](double p, const std::string& what) {
      if (!(p >= 0.0 && p <= 1.0))
        throw ConfigError(what + " must be a probability in [0,1]");
    };
    check01(default_quest_success_prob, "default_quest_success_prob");
    check01(monitor_false_negative_prob, "monitor_false_negative_prob");
    for (const auto& [id, p] : success_prob_overrides)
      check01(p, "success probability of " + id);
    for (const auto& [verb, c] : action_costs)
      if (c < 0.0) throw ConfigError("cost of " + verb + " must be >= 0");
    if (red_budget < 0.0 || blue_budget < 0.0)
      throw ConfigError("budgets must be >= 0");
  }

  bool operator==(const SimConfig&) const = default;
};

} // namespace scenforge
