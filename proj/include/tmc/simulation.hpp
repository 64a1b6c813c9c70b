#pragma once

#include <memory>

#include "tmc/config.hpp"
#include "tmc/postprocess.hpp"

namespace tmc {

/// Fully resolved run: mesh built and validated, materials and constraints
/// bound, probes anchored. Construction performs all validation so that a
/// failing configuration produces no output files.
struct SimulationSetup {
  SimulationConfig config;
  std::unique_ptr<Mesh> mesh;
  std::unique_ptr<AssemblyCache> cache;
  Problem problem;
  std::vector<GapProbe> probes;
};

SimulationSetup prepare_simulation(const SimulationConfig& config);

struct RunResult {
  SolveReport report;
  Eigen::VectorXd u_final;
  std::vector<double> final_probe_values;
};

/// Runs the load schedule. With write_outputs set, emits the probe CSV
/// (<basename>_probe.csv), the VTK series and <basename>_report.json under
/// the configured output directory.
RunResult run_simulation(const SimulationSetup& setup, bool write_outputs);

struct Table1Cell {
  double alpha_r = 0.0;
  double gamma = 0.0;
  bool completed = false;
  double gap = 0.0;
  double final_lambda = 0.0;
  int steps = 0;
  int iterations = 0;
};

/// Runs the (alpha_r, gamma) grid of the box benchmark, one run per cell;
/// failed cells are recorded and the sweep continues. With write_files set,
/// emits table1.csv and table1.md plus per-cell outputs under the configured
/// output directory.
std::vector<Table1Cell> table1_harness(const SimulationConfig& base,
                                       const std::vector<double>& alpha_r_values,
                                       const std::vector<double>& gamma_values, bool write_files);

void write_report_json(const SolveReport& report, const std::string& path);

}  // namespace tmc
