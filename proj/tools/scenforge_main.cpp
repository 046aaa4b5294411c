// scenario-forge: generate, inspect, simulate, and score cybersecurity
// exercise scenarios from topology and architectural-style specifications.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scenforge/batch.hpp"
#include "scenforge/exporters.hpp"
#include "scenforge/metrics.hpp"
#include "scenforge/serialize.hpp"
#include "scenforge/sim.hpp"

namespace {

using namespace scenforge;

std::uint64_t resolve_seed(std::uint64_t seed, bool seed_given) {
  if (seed_given) return seed;
  if (const char* env = std::getenv("SCENARIO_FORGE_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 0;
}

std::string first_keyword(const std::string& text) {
  auto lines = dsl_detail::split_lines(text);
  return lines.empty() ? "" : lines.front().words.front();
}

int cmd_validate(const std::vector<std::string>& paths) {
  TopologySpec topology;
  bool have_topology = false;
  std::map<std::string, ArchStyleSpec> styles;
  bool failed = false;

  for (const auto& path : paths) {
    std::string text;
    try {
      text = read_file(path);
      std::string kw = first_keyword(text);
      if (kw == "Topology") {
        topology = parse_topology(text);
        have_topology = true;
        std::cout << path << ": topology ok ("
                  << topology.total_subsystems() << " subsystems)\n";
      } else if (kw == "ArchStyle") {
        auto style = parse_archstyle(text);
        auto diags = style_diagnostics(style);
        for (const auto& d : diags) {
          std::cout << path << ": " << d.message << "\n";
          failed = true;
        }
        if (diags.empty())
          std::cout << path << ": style " << style.name << " ok\n";
        styles.emplace(style.name, std::move(style));
      } else if (kw == "Router") {
        auto cat = parse_catalog(text);
        std::cout << path << ": catalog ok (" << cat.profiles.size()
                  << " profiles)\n";
      } else {
        std::cout << path << ": unrecognized specification kind\n";
        failed = true;
      }
    } catch (const Error& e) {
      std::cout << path << ": " << e.what() << "\n";
      failed = true;
    }
  }
  if (have_topology) {
    for (const auto& d : validate_repertoire(topology, styles)) {
      std::cout << d.message << "\n";
      failed = true;
    }
  }
  return failed ? kExitValidation : kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"scenario-forge: cybersecurity exercise scenario generator"};
  app.require_subcommand(1);

  // validate
  auto* validate = app.add_subcommand("validate", "Parse and check spec files");
  std::vector<std::string> validate_paths;
  validate->add_option("specs", validate_paths, "Specification files")
      ->required()
      ->expected(-1);

  // enumerate
  auto* enumerate = app.add_subcommand("enumerate", "List satisfying models");
  bool enum_topologies = false, enum_subsystems = false;
  std::string enum_topo_path, enum_style_path;
  int enum_max_connectors = 4;
  std::uint64_t enum_max_models = 0, enum_seed = 0;
  bool enum_seed_given = false;
  enumerate->add_flag("--topologies", enum_topologies, "Enumerate topologies");
  enumerate->add_flag("--subsystems", enum_subsystems, "Enumerate subsystems");
  enumerate->add_option("--topo", enum_topo_path, "Topology spec file");
  enumerate->add_option("--style", enum_style_path, "Style spec file");
  enumerate->add_option("--max-connectors", enum_max_connectors);
  enumerate->add_option("--max-models", enum_max_models);
  enumerate
      ->add_option("--seed", enum_seed, "Emission-order seed (0 = canonical)")
      ->each([&](const std::string&) { enum_seed_given = true; });

  // generate
  auto* generate = app.add_subcommand("generate", "Generate scenario files");
  GenerationRequest req;
  bool gen_seed_given = false;
  generate->add_option("--topo", req.topology_path, "Topology spec")->required();
  generate->add_option("--styles", req.style_paths, "Style specs")
      ->required()
      ->expected(-1);
  generate->add_option("--catalog", req.catalog_path, "Router catalog file");
  generate->add_option("--locks", req.n_locks, "Locks to place");
  generate->add_option("--objectives", req.n_objectives, "Objectives to place");
  generate->add_option("--count", req.count, "Number of scenarios");
  generate->add_option("--seed", req.seed, "Master seed")
      ->each([&](const std::string&) { gen_seed_given = true; });
  generate->add_option("--max-connectors", req.bounds.max_connectors);
  generate->add_option("--out", req.out_dir, "Output directory")->required();
  generate->add_flag("--keep-partial", req.keep_partial,
                     "Keep already-written scenarios on failure");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a red/blue episode");
  std::string sim_scenario, sim_mode = "high", sim_red = "greedy",
              sim_blue = "passive";
  double sim_red_budget = -1, sim_blue_budget = -1, sim_p = -1;
  std::uint64_t sim_seed = 0;
  bool sim_seed_given = false;
  simulate->add_option("--scenario", sim_scenario, "Scenario file")->required();
  simulate->add_option("--mode", sim_mode, "high | detailed");
  simulate->add_option("--red", sim_red, "Red policy: greedy | random");
  simulate->add_option("--blue", sim_blue, "Blue policy: passive | random");
  simulate->add_option("--seed", sim_seed)->each([&](const std::string&) {
    sim_seed_given = true;
  });
  simulate->add_option("--red-budget", sim_red_budget);
  simulate->add_option("--blue-budget", sim_blue_budget);
  simulate->add_option("--p", sim_p, "Success probability for every quest/task");

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "Score scenario files");
  bool m_difficulty = false, m_netsimile = false, m_content = false,
       m_pca = false;
  std::string m_csv;
  std::vector<std::string> m_scenarios, m_styles;
  metrics_cmd->add_flag("--difficulty", m_difficulty);
  metrics_cmd->add_flag("--netsimile", m_netsimile);
  metrics_cmd->add_flag("--content", m_content);
  metrics_cmd->add_flag("--pca", m_pca);
  metrics_cmd->add_option("--csv", m_csv, "Output CSV path")->required();
  metrics_cmd->add_option("--styles", m_styles, "Style specs (content order)");
  metrics_cmd->add_option("scenarios", m_scenarios, "Scenario files")
      ->required()
      ->expected(-1);

  // export
  auto* export_cmd = app.add_subcommand("export", "Export DOT or manifest");
  std::string e_scenario, e_dot, e_out;
  bool e_manifest = false;
  export_cmd->add_option("--scenario", e_scenario, "Scenario file")->required();
  export_cmd->add_option("--dot", e_dot,
                         "topology | highlevel | subsystem:<id> | lowlevel:<id>");
  export_cmd->add_flag("--manifest", e_manifest, "Deployment manifest");
  export_cmd->add_option("--out", e_out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(validate_paths);

    if (*enumerate) {
      if (enum_topologies == enum_subsystems) {
        std::cerr << "pick exactly one of --topologies / --subsystems\n";
        return kExitUsage;
      }
      Bounds bounds;
      bounds.max_connectors = enum_max_connectors;
      bounds.max_models = enum_max_models;
      bounds.seed = resolve_seed(enum_seed, enum_seed_given);
      if (enum_topologies) {
        if (enum_topo_path.empty()) {
          std::cerr << "--topo required\n";
          return kExitUsage;
        }
        auto spec = parse_topology(read_file(enum_topo_path));
        auto models = enumerate_topologies(spec, bounds);
        for (std::size_t i = 0; i < models.size(); ++i) {
          const auto& m = models[i];
          std::cout << i << ": connectors=" << m.connectors.size()
                    << " links=" << m.links.size() << " routers=";
          for (const auto& s : m.subsystems)
            std::cout << s << "(" << m.subsystem_style.at(s) << ")->"
                      << m.subsystem_router.at(s) << " ";
          std::cout << "\n";
        }
        std::cout << models.size() << " models\n";
      } else {
        if (enum_style_path.empty()) {
          std::cerr << "--style required\n";
          return kExitUsage;
        }
        auto style = parse_archstyle(read_file(enum_style_path));
        auto models = enumerate_subsystems(style, bounds);
        for (std::size_t i = 0; i < models.size(); ++i) {
          const auto& m = models[i];
          std::cout << i << ":";
          for (const auto& [cid, role] : m.components) {
            std::cout << " " << cid << "(" << role << "){";
            bool first = true;
            for (const auto& [key, products] : m.interface_choice) {
              if (key.first != cid) continue;
              for (const auto& p : products) {
                if (!first) std::cout << ",";
                std::cout << p;
                first = false;
              }
            }
            std::cout << "}";
          }
          std::cout << " edges=" << m.interaction_edges.size() << "\n";
        }
        std::cout << models.size() << " models\n";
      }
      return kExitOk;
    }

    if (*generate) {
      req.seed = resolve_seed(req.seed, gen_seed_given);
      auto result = batch_generate(req);
      std::cout << "wrote " << result.scenario_files.size()
                << " scenarios and " << result.manifest_path << "\n";
      return kExitOk;
    }

    if (*simulate) {
      Scenario s = deserialize(read_file(sim_scenario));
      SimConfig config = s.config;
      config.mode = sim_mode == "detailed" ? SimMode::Detailed
                    : sim_mode == "high"
                        ? SimMode::HighLevel
                        : throw ConfigError("mode must be high or detailed");
      config.seed = resolve_seed(sim_seed, sim_seed_given);
      if (sim_red_budget >= 0) config.red_budget = sim_red_budget;
      if (sim_blue_budget >= 0) config.blue_budget = sim_blue_budget;
      if (sim_p >= 0) {
        config.default_quest_success_prob = sim_p;
        for (const auto& t : s.tasks) config.success_prob_overrides[t.id] = sim_p;
      }
      RedPolicy red = sim_red == "greedy"   ? make_greedy_red()
                      : sim_red == "random" ? make_random_red()
                                            : throw ConfigError(
                                                  "unknown red policy " + sim_red);
      BluePolicy blue = sim_blue == "passive"  ? make_passive_blue()
                        : sim_blue == "random" ? make_random_blue()
                                               : throw ConfigError(
                                                     "unknown blue policy " +
                                                     sim_blue);
      auto log = run_episode(s, config, red, blue);
      std::cout << format_episode(log);
      return kExitOk;
    }

    if (*metrics_cmd) {
      int picked = int(m_difficulty) + int(m_netsimile) + int(m_content) +
                   int(m_pca);
      if (picked != 1) {
        std::cerr << "pick exactly one of --difficulty/--netsimile/--content/--pca\n";
        return kExitUsage;
      }
      std::vector<std::string> ids;
      std::vector<Scenario> scenarios;
      for (const auto& path : m_scenarios) {
        scenarios.push_back(deserialize(read_file(path)));
        ids.push_back(std::filesystem::path(path).stem().string());
      }
      if (m_difficulty) {
        std::string csv = "id,difficulty\n";
        for (std::size_t i = 0; i < scenarios.size(); ++i)
          csv += ids[i] + "," + std::to_string(difficulty(scenarios[i])) + "\n";
        write_file(m_csv, csv);
      } else if (m_netsimile || m_pca) {
        std::vector<NetSimileSignature> sigs;
        for (const auto& s : scenarios)
          sigs.push_back(netsimile_signature(merge_full_graph(s.environment)));
        if (m_netsimile) {
          write_file(m_csv, signatures_csv(ids, sigs));
          write_file(m_csv + ".dist.csv", distance_matrix_csv(ids, sigs));
        } else {
          std::vector<std::vector<double>> rows;
          for (const auto& sig : sigs)
            rows.emplace_back(sig.begin(), sig.end());
          write_file(m_csv, pca_csv(ids, pca2(rows)));
        }
      } else {
        if (m_styles.empty()) {
          std::cerr << "--content needs --styles for the repertoire order\n";
          return kExitUsage;
        }
        std::vector<ArchStyleSpec> repertoire;
        for (const auto& path : m_styles)
          repertoire.push_back(parse_archstyle(read_file(path)));
        std::vector<ContentSignature> sigs;
        for (const auto& s : scenarios)
          sigs.push_back(content_signature(s.environment, repertoire));
        write_file(m_csv, content_csv(ids, sigs));
      }
      std::cout << "wrote " << m_csv << "\n";
      return kExitOk;
    }

    if (*export_cmd) {
      Scenario s = deserialize(read_file(e_scenario));
      if (e_dot.empty() == !e_manifest) {
        std::cerr << "pick exactly one of --dot <layer> / --manifest\n";
        return kExitUsage;
      }
      std::string text = e_manifest ? export_manifest(s) : export_dot(s, e_dot);
      if (e_out.empty()) std::cout << text;
      else write_file(e_out, text);
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
