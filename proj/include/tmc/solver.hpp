#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tmc/assembly.hpp"

namespace tmc {

struct NewtonSettings {
  double tol_rel = 1e-8;   // relative to the first residual of the step
  double tol_abs = 1e-12;  // force units
  int max_iter = 15;
  int max_bisections = 12;
};

struct LoadSchedule {
  int n_steps = 50;
};

struct StepRecord {
  int step = 0;
  double lambda = 0.0;
  int iterations = 0;
  int bisections = 0;  // halvings spent before this advance was accepted
  double residual0 = 0.0;
  double residual = 0.0;
  double min_J = 0.0;
};

struct SolveReport {
  std::vector<StepRecord> steps;
  bool completed = false;
  double final_lambda = 0.0;
  int total_iterations = 0;
  int total_bisections = 0;
  double wall_seconds = 0.0;
  std::string failure;

  double mean_iterations() const {
    return steps.empty() ? 0.0 : static_cast<double>(total_iterations) / steps.size();
  }
};

struct Problem {
  const Mesh* mesh = nullptr;
  const AssemblyCache* cache = nullptr;
  Materials materials;
  BoundaryConditions bcs;
  DofMap dofs;
};

Problem make_problem(const Mesh& mesh, const AssemblyCache& cache, Materials materials,
                     BoundaryConditions bcs);

/// Direct sparse solver (LU with one step of iterative refinement). Throws
/// SolverError on singular or numerically unusable systems. The symbolic
/// analysis is reused across solves with an unchanged sparsity pattern.
class LinearSolver {
 public:
  Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& rhs);

 private:
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  bool analyzed_ = false;
};

/// One-shot convenience wrapper.
Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& rhs);

struct NewtonResult {
  bool converged = false;
  bool barrier_hit = false;
  int iterations = 0;
  double residual0 = 0.0;
  double residual = 0.0;
  std::vector<double> residual_history;
};

/// Applies the prescribed values at lambda and iterates the free DOFs of
/// u_full until ||R|| <= max(tol_abs, tol_rel * ||R0||). u_full is left at the
/// last iterate regardless of convergence; callers keep their own backup.
NewtonResult newton_solve_step(const Problem& problem, double lambda,
                               const NewtonSettings& settings, Eigen::VectorXd& u_full,
                               LinearSolver* solver = nullptr);

using StepObserver = std::function<void(const StepRecord&, const Eigen::VectorXd& u_full)>;

/// Ramps lambda from 0 to 1 in n_steps increments, bisecting increments on
/// nonconvergence or barrier violations. Returns the final displacement and
/// the full report; on failure the displacement of the last accepted state.
std::pair<Eigen::VectorXd, SolveReport> run_schedule(const Problem& problem,
                                                     const LoadSchedule& schedule,
                                                     const NewtonSettings& settings,
                                                     const StepObserver& observer = {});

}  // namespace tmc
