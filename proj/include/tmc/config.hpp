#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "tmc/assembly.hpp"
#include "tmc/mesh.hpp"
#include "tmc/scenarios.hpp"
#include "tmc/solver.hpp"

namespace tmc {

struct OutputOptions {
  std::string directory = "out";
  std::string basename = "run";
  int vtk_every = 0;  // -1: no VTK, 0: final state only, N > 0: every N steps plus final
};

struct ProbeSpec {
  std::string name = "gap";
  Vector3 point_a = Vector3::Zero();
  Vector3 point_b = Vector3::Zero();
};

struct SimulationConfig {
  std::string scenario_kind;
  BoxSelfContactParams box;
  PneumaticBoxParams pneumatic;
  PunchParams punch;
  ActuatorParams actuator;
  std::string mesh_path;

  Materials materials;
  BoundaryConditions bcs;
  LoadSchedule schedule;
  NewtonSettings newton;
  OutputOptions outputs;
  std::vector<ProbeSpec> probes;

  // Optional parameter grid consumed by the table1 subcommand.
  std::vector<double> table1_alpha_r;
  std::vector<double> table1_gamma;
};

/// Strict parser: unknown keys, malformed sections and out-of-range
/// parameters raise ConfigError.
SimulationConfig parse_config(const nlohmann::json& j);
SimulationConfig load_config(const std::string& path);

/// Applies a "dotted.path=value" override onto raw config JSON; value is
/// parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

Mesh build_scenario_mesh(const SimulationConfig& config);

}  // namespace tmc
