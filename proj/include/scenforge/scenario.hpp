#pragma once

// The scenario bundle and the end-to-end generation pipeline.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scenforge/envgen.hpp"
#include "scenforge/modelfind.hpp"
#include "scenforge/quests.hpp"
#include "scenforge/rng.hpp"
#include "scenforge/sim_config.hpp"
#include "scenforge/specdsl.hpp"
#include "scenforge/storyline.hpp"

namespace scenforge {

inline std::string fnv1a_digest(const std::string& data) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[h & 0xF];
    h >>= 4;
  }
  return out;
}

struct Scenario {
  std::string schema_version = "1";
  struct Provenance {
    std::string topology_digest;
    std::map<std::string, std::string> style_digests;
    std::size_t topology_index = 0;
    std::map<std::string, std::size_t> subsystem_indices;
    std::uint64_t seed = 0;
    bool operator==(const Provenance&) const = default;
  } provenance;
  NetworkEnvironment environment;
  HighLevelStoryline high_level;
  std::map<std::string, LowLevelStoryline> low_level;
  std::vector<Task> tasks;   // scenario-wide task table
  std::vector<Quest> quests; // scenario-wide quest table
  SimConfig config;

  const Task* find_task(const std::string& id) const {
    for (const auto& t : tasks)
      if (t.id == id) return &t;
    return nullptr;
  }
  const Quest* find_quest(const std::string& id) const {
    for (const auto& q : quests)
      if (q.id == id) return &q;
    return nullptr;
  }
  const Quest* quest_for_target(const std::string& target) const {
    for (const auto& q : quests)
      if (q.target == target) return &q;
    return nullptr;
  }
  bool operator==(const Scenario&) const = default;
};

// Parsed inputs plus knobs for one generation run.
struct ScenarioInputs {
  TopologySpec topology;
  std::map<std::string, ArchStyleSpec> styles;
  ConnectorCatalog catalog = ConnectorCatalog::builtin();
  int n_locks = 1;
  int n_objectives = 1;
  Bounds bounds;
  std::string topology_text;                  // for provenance digests
  std::map<std::string, std::string> style_texts;
};

// Model spaces are enumerated once (canonical order) and shared across all
// scenarios of a batch; each scenario then just picks indices.
struct EnumeratedSpace {
  std::vector<TopologyModel> topologies;
  std::map<std::string, std::vector<SubsystemModel>> subsystem_models;
};

inline EnumeratedSpace enumerate_space(const ScenarioInputs& inputs) {
  auto diags = validate_repertoire(inputs.topology, inputs.styles);
  if (!diags.empty()) {
    std::string msg = "invalid inputs:";
    for (const auto& d : diags) msg += "\n  " + d.message;
    throw ConfigError(msg);
  }
  EnumeratedSpace space;
  Bounds canonical = inputs.bounds;
  canonical.seed = 0;
  canonical.max_models = 0;
  space.topologies = enumerate_topologies(inputs.topology, canonical);
  for (const auto& decl : inputs.topology.subsystems)
    space.subsystem_models.emplace(
        decl.style,
        enumerate_subsystems(inputs.styles.at(decl.style), canonical));
  return space;
}

inline Scenario generate_scenario(const ScenarioInputs& inputs,
                                  const EnumeratedSpace& space,
                                  std::uint64_t seed) {
  Rng rng(seed);

  Scenario s;
  s.provenance.seed = seed;
  s.provenance.topology_digest = fnv1a_digest(inputs.topology_text);
  for (const auto& [name, text] : inputs.style_texts)
    s.provenance.style_digests[name] = fnv1a_digest(text);

  s.provenance.topology_index =
      static_cast<std::size_t>(rng.uniform(space.topologies.size()));
  const auto& topo_model = space.topologies[s.provenance.topology_index];

  std::vector<std::pair<std::string, const SubsystemModel*>> picked;
  for (const auto& sid : topo_model.subsystems) {
    const auto& style = topo_model.subsystem_style.at(sid);
    const auto& models = space.subsystem_models.at(style);
    std::size_t idx = static_cast<std::size_t>(rng.uniform(models.size()));
    s.provenance.subsystem_indices[sid] = idx;
    picked.emplace_back(sid, &models[idx]);
  }

  s.environment =
      assemble_environment(topo_model, picked, inputs.styles, inputs.catalog, rng);
  s.environment.provenance.topology_index = s.provenance.topology_index;
  s.environment.provenance.subsystem_indices = s.provenance.subsystem_indices;
  s.environment.provenance.seed = seed;

  // A subsystem assigned a key or objective could in principle expose no
  // obtainable capability; resample the high-level placement if so.
  constexpr int kMaxPlacementTries = 32;
  for (int attempt = 0;; ++attempt) {
    try {
      auto locked =
          generate_locks(s.environment.topology, inputs.n_locks, rng);
      auto keyed =
          generate_keys(locked, static_cast<int>(locked.locks.size()), rng);
      s.high_level = generate_objectives(keyed, inputs.n_objectives, rng);
      s.low_level = build_low_level(s.high_level, s.environment, rng);
      break;
    } catch (const NoObtainableCapability&) {
      if (attempt + 1 >= kMaxPlacementTries) throw;
    }
  }

  for (const auto& [sid, ll] : s.low_level) {
    for (const auto& t : ll.tasks) s.tasks.push_back(t);
    for (const auto& q : ll.quests) s.quests.push_back(q);
  }
  s.config.seed = seed;
  return s;
}

// Convenience for single-scenario callers.
inline Scenario generate_scenario(const ScenarioInputs& inputs,
                                  std::uint64_t seed) {
  return generate_scenario(inputs, enumerate_space(inputs), seed);
}

} // namespace scenforge
