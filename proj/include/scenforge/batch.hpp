#pragma once

// Batch dataset generation: N scenarios from independent child seeds plus a
// manifest with per-scenario summary statistics and stage timings.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenforge/errors.hpp"
#include "scenforge/metrics.hpp"
#include "scenforge/scenario.hpp"
#include "scenforge/serialize.hpp"

namespace scenforge {

struct GenerationRequest {
  std::string topology_path;
  std::vector<std::string> style_paths;
  std::string catalog_path; // empty -> built-in catalog
  int n_locks = 1;
  int n_objectives = 1;
  Bounds bounds;
  std::uint64_t count = 1;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool keep_partial = false;
};

struct BatchResult {
  std::string manifest_path;
  std::vector<std::string> scenario_files;
};

// Child seeds are derived order-free from (master seed, index), so scenario
// i's bytes do not depend on how many or in what order others are produced.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
  return Rng(master).child(index).seed_state();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << data;
}

inline ScenarioInputs load_inputs(const GenerationRequest& req) {
  ScenarioInputs inputs;
  inputs.topology_text = read_file(req.topology_path);
  inputs.topology = parse_topology(inputs.topology_text);
  for (const auto& path : req.style_paths) {
    std::string text = read_file(path);
    auto style = parse_archstyle(text);
    inputs.style_texts[style.name] = text;
    inputs.styles.emplace(style.name, std::move(style));
  }
  if (!req.catalog_path.empty())
    inputs.catalog = parse_catalog(read_file(req.catalog_path));
  inputs.n_locks = req.n_locks;
  inputs.n_objectives = req.n_objectives;
  inputs.bounds = req.bounds;
  return inputs;
}

inline BatchResult batch_generate(const GenerationRequest& req) {
  namespace fs = std::filesystem;
  using clock = std::chrono::steady_clock;
  using nlohmann::ordered_json;

  if (req.count < 1) throw ConfigError("count must be >= 1");
  auto inputs = load_inputs(req);

  fs::create_directories(req.out_dir);
  BatchResult result;

  auto t0 = clock::now();
  EnumeratedSpace space;
  try {
    space = enumerate_space(inputs);
  } catch (const Error& e) {
    throw Error("scenario 0: " + std::string(e.what()), e.exit_code());
  }
  double enumerate_ms =
      std::chrono::duration<double, std::milli>(clock::now() - t0).count();

  ordered_json scenarios = ordered_json::array();
  double generate_ms = 0, serialize_ms = 0;

  for (std::uint64_t i = 0; i < req.count; ++i) {
    std::uint64_t seed = child_seed(req.seed, i);
    char name[32];
    snprintf(name, sizeof name, "scenario_%05llu.json",
             static_cast<unsigned long long>(i));
    std::string path = (fs::path(req.out_dir) / name).string();
    try {
      auto g0 = clock::now();
      Scenario s = generate_scenario(inputs, space, seed);
      auto g1 = clock::now();
      std::string bytes = serialize(s);
      auto g2 = clock::now();
      write_file(path, bytes);
      generate_ms += std::chrono::duration<double, std::milli>(g1 - g0).count();
      serialize_ms += std::chrono::duration<double, std::milli>(g2 - g1).count();

      ordered_json row;
      row["file"] = name;
      row["seed"] = seed;
      row["connectors"] = s.environment.topology.connectors().size();
      row["subsystems"] = s.environment.topology.subsystems().size();
      row["locks"] = s.high_level.locks.size();
      row["objectives"] = s.high_level.objectives.size();
      row["tasks"] = s.tasks.size();
      row["quests"] = s.quests.size();
      row["difficulty"] = difficulty(s);
      scenarios.push_back(row);
      result.scenario_files.push_back(path);
    } catch (const Error& e) {
      if (!req.keep_partial)
        for (const auto& f : result.scenario_files) fs::remove(f);
      throw Error("scenario " + std::to_string(i) + ": " + e.what(),
                  e.exit_code());
    }
  }

  ordered_json manifest;
  manifest["schema_version"] = "1";
  manifest["topology"] = req.topology_path;
  manifest["styles"] = req.style_paths;
  manifest["master_seed"] = req.seed;
  manifest["count"] = req.count;
  manifest["locks_requested"] = req.n_locks;
  manifest["objectives_requested"] = req.n_objectives;
  manifest["max_connectors"] = req.bounds.max_connectors;
  manifest["timings_ms"] = {{"enumerate", enumerate_ms},
                            {"storyline_and_quests", generate_ms},
                            {"serialize", serialize_ms}};
  manifest["scenarios"] = scenarios;

  result.manifest_path = (fs::path(req.out_dir) / "manifest.json").string();
  write_file(result.manifest_path, manifest.dump(2) + "\n");
  return result;
}

} // namespace scenforge
