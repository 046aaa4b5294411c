#pragma once

// Shared fixtures: a scripted rng for forcing documented draws, the sample
// specification files, and the worked examples used across suites.

#include <deque>
#include <stdexcept>
#include <string>

#include "scenforge/batch.hpp"
#include "scenforge/scenario.hpp"
#include "scenforge/sim.hpp"

namespace fixtures {

using namespace scenforge;

// Replays a fixed sequence of uniform() results; throws if the script runs
// dry so tests notice draw-count drift immediately.
class ScriptedRng {
public:
  explicit ScriptedRng(std::deque<std::uint64_t> script)
      : script_(std::move(script)) {}

  std::uint64_t uniform(std::uint64_t n) {
    if (script_.empty()) throw std::logic_error("ScriptedRng script exhausted");
    std::uint64_t v = script_.front();
    script_.pop_front();
    if (v >= n) throw std::logic_error("ScriptedRng value out of range");
    return v;
  }
  bool bernoulli(double p) { return uniform(2) == 0 && p > 0; }
  bool done() const { return script_.empty(); }

private:
  std::deque<std::uint64_t> script_;
};

inline std::string specs_dir() { return SCENFORGE_SPECS_DIR; }

inline std::string read_spec(const std::string& name) {
  return read_file(specs_dir() + "/" + name);
}

inline ScenarioInputs fig3_inputs(int locks = 1, int objectives = 1,
                                  int max_connectors = 3) {
  ScenarioInputs in;
  in.topology_text = read_spec("collapsedcore.topo");
  in.topology = parse_topology(in.topology_text);
  for (const char* name :
       {"clientserver.style", "oauth.style", "microservices.style"}) {
    std::string text = read_spec(name);
    auto style = parse_archstyle(text);
    in.style_texts[style.name] = text;
    in.styles.emplace(style.name, std::move(style));
  }
  in.n_locks = locks;
  in.n_objectives = objectives;
  in.bounds.max_connectors = max_connectors;
  return in;
}

inline ScenarioInputs fivesub_inputs(int locks = 1, int objectives = 1,
                                     int max_connectors = 3) {
  ScenarioInputs in = fig3_inputs(locks, objectives, max_connectors);
  in.topology_text = read_spec("fivesub.topo");
  in.topology = parse_topology(in.topology_text);
  return in;
}

inline ArchStyleSpec small_clientserver() {
  return parse_archstyle(read_spec("clientserver_small.style"));
}

// Triangle collapsed-core model: three connectors pairwise linked, one
// subsystem per connector. s2/c2 sit at the "bottom" of the figure.
inline TopologyModel triangle_model(const std::string& style_name) {
  TopologyModel m;
  m.connectors = {"c0", "c1", "c2"};
  m.links = {{"c0", "c1"}, {"c0", "c2"}, {"c1", "c2"}};
  m.subsystems = {"s0", "s1", "s2"};
  m.subsystem_router = {{"s0", "c0"}, {"s1", "c1"}, {"s2", "c2"}};
  m.subsystem_style = {{"s0", style_name}, {"s1", style_name}, {"s2", style_name}};
  return m;
}

// The worked lock/key/objective walkthrough: lock on the bottom connector
// redirecting both connector edges, start on the left subnet, key on the
// right subnet, objective on the bottom subsystem.
inline HighLevelStoryline example1_storyline(const TopologyGraph& base) {
  ScriptedRng lock_rng({2, 2});
  auto locked = generate_locks(base, 1, lock_rng);
  ScriptedRng key_rng({0, 0, 0, 1});
  auto keyed = generate_keys(locked, 1, key_rng);
  ScriptedRng obj_rng({0});
  return generate_objectives(keyed, 1, obj_rng);
}

inline Scenario example1_scenario() {
  auto style = small_clientserver();
  std::map<std::string, ArchStyleSpec> styles{{style.name, style}};
  auto model = triangle_model(style.name);
  auto sub_models = enumerate_subsystems(style, Bounds{});
  std::vector<std::pair<std::string, const SubsystemModel*>> picked;
  for (const auto& sid : model.subsystems)
    picked.emplace_back(sid, &sub_models.front());
  Rng rng(5);
  Scenario s;
  s.environment = assemble_environment(model, picked, styles,
                                       ConnectorCatalog::builtin(), rng);
  s.high_level = example1_storyline(s.environment.topology);
  Rng quest_rng(9);
  s.low_level = build_low_level(s.high_level, s.environment, quest_rng);
  for (const auto& [sid, ll] : s.low_level) {
    for (const auto& t : ll.tasks) s.tasks.push_back(t);
    for (const auto& q : ll.quests) s.quests.push_back(q);
  }
  return s;
}

// A six-task walkthrough universe: scan, exploit, and pivot tasks over
// two components, with key and objective terminals.
inline std::vector<Task> example2_tasks() {
  auto mk = [](const char* id, std::initializer_list<const char*> pre,
               ActionVerb verb, std::initializer_list<const char*> reward) {
    Task t;
    t.id = id;
    for (const auto* p : pre) t.prereq.insert(p);
    t.actions = {{verb, ""}};
    for (const auto* r : reward) t.reward.insert(r);
    return t;
  };
  return {
      mk("t0", {}, ActionVerb::Scan, {"Reachable_Component2"}),
      mk("t1", {"Reachable_Component2"}, ActionVerb::Exploit,
         {"InitialAccess_Component2"}),
      mk("t2", {"InitialAccess_Component2"}, ActionVerb::Complete,
         {"Objective0"}),
      mk("t3", {"InitialAccess_Component2"}, ActionVerb::Pivot,
         {"Reachable_Component1"}),
      mk("t4", {"Reachable_Component1"}, ActionVerb::Exploit,
         {"InformationLeak_Component1"}),
      mk("t5", {"InformationLeak_Component1"}, ActionVerb::Collect, {"Key0"}),
  };
}

} // namespace fixtures
