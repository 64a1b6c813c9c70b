#include <CLI11.hpp>

#include <cstdio>
#include <fstream>

#include "tmc/simulation.hpp"

namespace {

// Exit codes: 0 success, 2 configuration error, 3 nonconvergence, 4 I/O error.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNonconvergence = 3;
constexpr int kExitIo = 4;

nlohmann::json load_raw_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw tmc::ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw tmc::ConfigError(path + ": JSON parse error: " + e.what());
  }
  for (const std::string& o : overrides) tmc::apply_override(j, o);
  return j;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides) {
  const tmc::SimulationConfig config =
      tmc::parse_config(load_raw_config(config_path, overrides));
  const tmc::SimulationSetup setup = tmc::prepare_simulation(config);
  std::printf("scenario: %s, %zu nodes, %zu elements, %d free dofs\n",
              config.scenario_kind.c_str(), setup.mesh->nodes.size(),
              setup.mesh->elements.size(), setup.problem.dofs.n_free());

  const tmc::RunResult result = tmc::run_simulation(setup, true);
  const tmc::SolveReport& rep = result.report;
  std::printf("steps: %zu, newton iterations: %d (mean %.2f), bisections: %d, wall: %.1fs\n",
              rep.steps.size(), rep.total_iterations, rep.mean_iterations(),
              rep.total_bisections, rep.wall_seconds);
  for (size_t i = 0; i < result.final_probe_values.size(); ++i)
    std::printf("probe %s: %.6e\n", setup.probes[i].name.c_str(), result.final_probe_values[i]);

  if (!rep.completed) {
    std::fprintf(stderr, "run stopped early: %s (last good lambda = %g)\n", rep.failure.c_str(),
                 rep.final_lambda);
    return kExitNonconvergence;
  }
  std::printf("completed at lambda = 1\n");
  return kExitOk;
}

int cmd_validate(const std::string& config_path, const std::vector<std::string>& overrides) {
  const tmc::SimulationConfig config =
      tmc::parse_config(load_raw_config(config_path, overrides));
  const tmc::SimulationSetup setup = tmc::prepare_simulation(config);
  const tmc::ValidationReport rep = tmc::validate_mesh(*setup.mesh);
  std::printf("config ok: %zu nodes, %zu elements, %d free dofs, min det(G) = %.6g\n",
              setup.mesh->nodes.size(), setup.mesh->elements.size(), setup.problem.dofs.n_free(),
              rep.min_detG);
  return kExitOk;
}

int cmd_table1(const std::string& config_path, const std::vector<std::string>& overrides) {
  const tmc::SimulationConfig config =
      tmc::parse_config(load_raw_config(config_path, overrides));
  if (config.table1_alpha_r.empty() || config.table1_gamma.empty())
    throw tmc::ConfigError("table1 requires a table1 section with alpha_r and gamma lists");

  const auto cells =
      tmc::table1_harness(config, config.table1_alpha_r, config.table1_gamma, true);
  bool all_ok = true;
  for (const tmc::Table1Cell& c : cells) {
    if (c.completed)
      std::printf("alpha_r=%-8g gamma=%-8g gap=%.6e (%d steps, %d iterations)\n", c.alpha_r,
                  c.gamma, c.gap, c.steps, c.iterations);
    else {
      std::printf("alpha_r=%-8g gamma=%-8g Calculation failed (lambda reached %g)\n", c.alpha_r,
                  c.gamma, c.final_lambda);
      all_ok = false;
    }
  }
  std::printf("table written to %s/table1.{csv,md}\n", config.outputs.directory.c_str());
  return all_ok ? kExitOk : kExitNonconvergence;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Third-medium contact solver for hyperelastic self-contact and pneumatic actuation"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;

  CLI::App* run = app.add_subcommand("run", "run a scenario config");
  run->add_option("config", config_path, "config JSON path")->required();
  run->add_option("--set", overrides, "override config keys, e.g. --set schedule.n_steps=100");

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a config without running");
  validate->add_option("config", config_path, "config JSON path")->required();
  validate->add_option("--set", overrides, "override config keys");

  CLI::App* table1 = app.add_subcommand("table1", "run the regularization parameter grid");
  table1->add_option("config", config_path, "config JSON path")->required();
  table1->add_option("--set", overrides, "override config keys");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, overrides);
    if (validate->parsed()) return cmd_validate(config_path, overrides);
    if (table1->parsed()) return cmd_table1(config_path, overrides);
  } catch (const tmc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const tmc::MeshError& e) {
    std::fprintf(stderr, "mesh error: %s\n", e.what());
    return kExitConfig;
  } catch (const tmc::SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitNonconvergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
  return kExitOk;
}
