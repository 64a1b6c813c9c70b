#include "tmc/simulation.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace tmc {

namespace {

namespace fs = std::filesystem;

std::string vtk_path(const OutputOptions& out, int step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_%04d.vtk", step);
  return (fs::path(out.directory) / (out.basename + buf)).string();
}

void bbox_check(const Mesh& mesh, const Vector3& p, const std::string& name) {
  Vector3 lo = mesh.nodes.front().X, hi = lo;
  for (const Node& n : mesh.nodes) {
    lo = lo.cwiseMin(n.X);
    hi = hi.cwiseMax(n.X);
  }
  const double slack = 0.1 * (hi - lo).norm();
  for (int c = 0; c < 3; ++c)
    if (p[c] < lo[c] - slack || p[c] > hi[c] + slack)
      throw ConfigError("probe '" + name + "' lies outside the mesh bounds");
}

}  // namespace

SimulationSetup prepare_simulation(const SimulationConfig& config) {
  SimulationSetup setup;
  setup.config = config;
  setup.mesh = std::make_unique<Mesh>(build_scenario_mesh(config));

  const ValidationReport rep = validate_mesh(*setup.mesh);
  if (!rep.ok) {
    std::string msg = "scenario mesh failed validation";
    for (const std::string& f : rep.failures) msg += "\n  " + f;
    throw ConfigError(msg);
  }

  setup.cache = std::make_unique<AssemblyCache>(build_assembly_cache(*setup.mesh));
  setup.problem = make_problem(*setup.mesh, *setup.cache, config.materials, config.bcs);

  for (const ProbeSpec& spec : config.probes) {
    bbox_check(*setup.mesh, spec.point_a, spec.name);
    bbox_check(*setup.mesh, spec.point_b, spec.name);
    setup.probes.push_back(make_gap_probe(*setup.mesh, spec.point_a, spec.point_b, spec.name));
  }
  return setup;
}

void write_report_json(const SolveReport& report, const std::string& path) {
  nlohmann::json j;
  j["completed"] = report.completed;
  j["final_lambda"] = report.final_lambda;
  j["total_iterations"] = report.total_iterations;
  j["total_bisections"] = report.total_bisections;
  j["mean_newton_iterations"] = report.mean_iterations();
  j["wall_seconds"] = report.wall_seconds;
  if (!report.failure.empty()) j["failure"] = report.failure;
  nlohmann::json steps = nlohmann::json::array();
  for (const StepRecord& s : report.steps) {
    steps.push_back({{"step", s.step},
                     {"lambda", s.lambda},
                     {"iterations", s.iterations},
                     {"bisections", s.bisections},
                     {"residual0", s.residual0},
                     {"residual", s.residual},
                     {"min_J", s.min_J}});
  }
  j["steps"] = std::move(steps);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report '" + path + "'");
  out << j.dump(2) << "\n";
}

RunResult run_simulation(const SimulationSetup& setup, bool write_outputs) {
  const Mesh& mesh = *setup.mesh;
  const AssemblyCache& cache = *setup.cache;
  const OutputOptions& out = setup.config.outputs;

  std::FILE* csv = nullptr;
  int last_vtk_step = -1;

  auto write_vtk_state = [&](int step, const Eigen::VectorXd& u, double lambda) {
    if (!write_outputs || out.vtk_every < 0) return;
    if (step == last_vtk_step) return;
    const FieldOutput fields = compute_fields(mesh, cache, setup.config.materials, u, lambda);
    export_vtk(mesh, u, fields, vtk_path(out, step));
    last_vtk_step = step;
  };

  auto probe_value = [&](const Eigen::VectorXd& u) {
    return setup.probes.empty() ? std::nan("") : gap_measure(mesh, u, setup.probes.front());
  };

  if (write_outputs) {
    fs::create_directories(out.directory);
    const std::string csv_path =
        (fs::path(out.directory) / (out.basename + "_probe.csv")).string();
    csv = std::fopen(csv_path.c_str(), "w");
    if (!csv) throw std::runtime_error("cannot write probe csv '" + csv_path + "'");
    std::fprintf(csv, "step,lambda,gap,newton_iters,bisections\n");

    const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(setup.problem.dofs.n_dofs);
    std::fprintf(csv, "0,%.17g,%.17g,0,0\n", 0.0, probe_value(u0));
    if (out.vtk_every > 0) write_vtk_state(0, u0, 0.0);
  }

  const StepObserver observer = [&](const StepRecord& rec, const Eigen::VectorXd& u) {
    if (csv)
      std::fprintf(csv, "%d,%.17g,%.17g,%d,%d\n", rec.step, rec.lambda, probe_value(u),
                   rec.iterations, rec.bisections);
    if (write_outputs && out.vtk_every > 0 && rec.step % out.vtk_every == 0)
      write_vtk_state(rec.step, u, rec.lambda);
  };

  RunResult result;
  auto [u, report] = run_schedule(setup.problem, setup.config.schedule, setup.config.newton,
                                  observer);
  result.u_final = std::move(u);
  result.report = std::move(report);

  if (csv) std::fclose(csv);
  if (write_outputs && out.vtk_every >= 0 && !result.report.steps.empty())
    write_vtk_state(result.report.steps.back().step, result.u_final,
                    result.report.final_lambda);
  if (write_outputs)
    write_report_json(result.report,
                      (fs::path(out.directory) / (out.basename + "_report.json")).string());

  for (const GapProbe& probe : setup.probes)
    result.final_probe_values.push_back(gap_measure(mesh, result.u_final, probe));
  return result;
}

std::vector<Table1Cell> table1_harness(const SimulationConfig& base,
                                       const std::vector<double>& alpha_r_values,
                                       const std::vector<double>& gamma_values, bool write_files) {
  std::vector<Table1Cell> cells;

  for (double alpha : alpha_r_values) {
    for (double gamma : gamma_values) {
      SimulationConfig cfg = base;
      cfg.materials.medium.alpha_r = alpha;
      cfg.materials.medium.gamma = gamma;
      char sub[64];
      std::snprintf(sub, sizeof(sub), "cell_a%g_g%g", alpha, gamma);
      cfg.outputs.directory = (fs::path(base.outputs.directory) / sub).string();

      Table1Cell cell;
      cell.alpha_r = alpha;
      cell.gamma = gamma;
      try {
        const SimulationSetup setup = prepare_simulation(cfg);
        const RunResult run = run_simulation(setup, write_files);
        cell.completed = run.report.completed;
        cell.final_lambda = run.report.final_lambda;
        cell.steps = static_cast<int>(run.report.steps.size());
        cell.iterations = run.report.total_iterations;
        if (run.report.completed && !run.final_probe_values.empty())
          cell.gap = run.final_probe_values.front();
      } catch (const SolverError&) {
        cell.completed = false;
      }
      cells.push_back(cell);
    }
  }

  if (write_files) {
    fs::create_directories(base.outputs.directory);
    const std::string csv_path = (fs::path(base.outputs.directory) / "table1.csv").string();
    std::FILE* csv = std::fopen(csv_path.c_str(), "w");
    if (!csv) throw std::runtime_error("cannot write '" + csv_path + "'");
    std::fprintf(csv, "alpha_r,gamma,gap,status,steps,total_iterations,final_lambda\n");
    for (const Table1Cell& c : cells)
      std::fprintf(csv, "%.17g,%.17g,%.17g,%s,%d,%d,%.17g\n", c.alpha_r, c.gamma,
                   c.completed ? c.gap : std::nan(""), c.completed ? "ok" : "failed", c.steps,
                   c.iterations, c.final_lambda);
    std::fclose(csv);

    const std::string md_path = (fs::path(base.outputs.directory) / "table1.md").string();
    std::FILE* md = std::fopen(md_path.c_str(), "w");
    if (!md) throw std::runtime_error("cannot write '" + md_path + "'");
    std::fprintf(md, "| alpha_r | gamma | g |\n|---:|---:|---:|\n");
    for (const Table1Cell& c : cells) {
      if (c.completed)
        std::fprintf(md, "| %g | %g | %.4e |\n", c.alpha_r, c.gamma, c.gap);
      else
        std::fprintf(md, "| %g | %g | Calculation failed |\n", c.alpha_r, c.gamma);
    }
    std::fclose(md);
  }
  return cells;
}

}  // namespace tmc
