#include "tmc/solver.hpp"

#include <Eigen/SparseLU>

#include <chrono>
#include <cmath>

namespace tmc {

Problem make_problem(const Mesh& mesh, const AssemblyCache& cache, Materials materials,
                     BoundaryConditions bcs) {
  Problem p;
  p.mesh = &mesh;
  p.cache = &cache;
  p.materials = std::move(materials);
  p.bcs = std::move(bcs);
  p.dofs = build_dof_map(mesh, p.bcs);
  return p;
}

Eigen::VectorXd LinearSolver::solve(const Eigen::SparseMatrix<double>& K,
                                    const Eigen::VectorXd& rhs) {
  if (K.rows() != K.cols() || K.rows() != rhs.size())
    throw SolverError("linear_solve: dimension mismatch");
  if (K.rows() == 0) return Eigen::VectorXd();

  if (!analyzed_) {
    lu_.analyzePattern(K);
    analyzed_ = true;
  }
  lu_.factorize(K);
  if (lu_.info() != Eigen::Success) {
    // Name an offending DOF when the structure makes one obvious.
    for (int j = 0; j < K.outerSize(); ++j) {
      bool empty = true;
      for (Eigen::SparseMatrix<double>::InnerIterator it(K, j); it; ++it)
        if (it.value() != 0.0) empty = false;
      if (empty)
        throw SolverError("singular tangent: column " + std::to_string(j) +
                          " is structurally empty (isolated dof)");
    }
    throw SolverError("sparse factorization failed: " + lu_.lastErrorMessage());
  }

  Eigen::VectorXd x = lu_.solve(rhs);
  // One refinement step keeps the residual near machine precision even when
  // barrier terms make the conditioning hostile.
  x += lu_.solve(Eigen::VectorXd(rhs - K * x));

  const double resid = (K * x - rhs).norm();
  const double scale = std::max(rhs.norm(), 1e-300);
  if (!x.allFinite() || resid > 1e-6 * scale)
    throw SolverError("linear solve unusable: relative residual " + std::to_string(resid / scale) +
                      " (singular or severely ill-conditioned tangent)");
  return x;
}

Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& rhs) {
  LinearSolver solver;
  return solver.solve(K, rhs);
}

NewtonResult newton_solve_step(const Problem& problem, double lambda,
                               const NewtonSettings& settings, Eigen::VectorXd& u_full,
                               LinearSolver* solver) {
  NewtonResult out;
  const Mesh& mesh = *problem.mesh;
  LinearSolver local_solver;
  if (!solver) solver = &local_solver;

  apply_dirichlet(mesh, problem.bcs, lambda, u_full);
  if (!(min_jacobian(mesh, *problem.cache, u_full) > 0.0)) {
    out.barrier_hit = true;
    return out;
  }

  try {
    GlobalSystem sys =
        assemble(mesh, *problem.cache, problem.dofs, problem.materials, problem.bcs, u_full, lambda);
    out.residual0 = sys.R.norm();
    out.residual = out.residual0;
    out.residual_history.push_back(out.residual0);
    const double tol = std::max(settings.tol_abs, settings.tol_rel * out.residual0);
    if (out.residual0 <= tol) {
      out.converged = true;
      return out;
    }

    for (int it = 1; it <= settings.max_iter; ++it) {
      const Eigen::VectorXd du = solver->solve(sys.K, Eigen::VectorXd(-sys.R));

      // Admissibility safeguard: a full Newton update may push a crushed
      // medium element through J = 0. Halve the update until the new state
      // is admissible; only an update that stays inadmissible fails the step.
      double step_scale = 1.0;
      bool admissible = false;
      const Eigen::VectorXd u_prev = u_full;
      for (int attempt = 0; attempt < 10 && !admissible; ++attempt) {
        u_full = u_prev;
        for (int i = 0; i < problem.dofs.n_free(); ++i)
          u_full[problem.dofs.free_to_full[i]] += step_scale * du[i];
        if (min_jacobian(mesh, *problem.cache, u_full) > 0.0)
          admissible = true;
        else
          step_scale *= 0.5;
      }
      if (!admissible) {
        u_full = u_prev;
        out.barrier_hit = true;
        return out;
      }

      sys = assemble(mesh, *problem.cache, problem.dofs, problem.materials, problem.bcs, u_full,
                     lambda);
      out.residual = sys.R.norm();
      out.residual_history.push_back(out.residual);
      out.iterations = it;
      if (out.residual <= tol) {
        out.converged = true;
        return out;
      }
    }
  } catch (const BarrierViolation&) {
    out.barrier_hit = true;
    return out;
  }
  return out;  // max_iter exhausted
}

std::pair<Eigen::VectorXd, SolveReport> run_schedule(const Problem& problem,
                                                     const LoadSchedule& schedule,
                                                     const NewtonSettings& settings,
                                                     const StepObserver& observer) {
  if (schedule.n_steps < 1) throw SolverError("schedule needs at least one step");

  const auto t0 = std::chrono::steady_clock::now();
  SolveReport report;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(problem.dofs.n_dofs);
  double lambda = 0.0;
  LinearSolver solver;

  for (int i = 1; i <= schedule.n_steps; ++i) {
    const double target = static_cast<double>(i) / schedule.n_steps;
    while (lambda < target - 1e-15) {
      double trial_lambda = target;
      int bisections = 0;
      while (true) {
        Eigen::VectorXd trial_u = u;
        const NewtonResult res = newton_solve_step(problem, trial_lambda, settings, trial_u, &solver);
        if (res.converged) {
          u = std::move(trial_u);
          lambda = trial_lambda;

          StepRecord rec;
          rec.step = static_cast<int>(report.steps.size()) + 1;
          rec.lambda = lambda;
          rec.iterations = res.iterations;
          rec.bisections = bisections;
          rec.residual0 = res.residual0;
          rec.residual = res.residual;
          rec.min_J = min_jacobian(*problem.mesh, *problem.cache, u);
          report.steps.push_back(rec);
          report.total_iterations += res.iterations;
          if (observer) observer(rec, u);
          break;
        }
        ++bisections;
        ++report.total_bisections;
        if (bisections > settings.max_bisections) {
          report.final_lambda = lambda;
          report.failure = res.barrier_hit
                               ? "bisections exhausted on a barrier violation at lambda = " +
                                     std::to_string(trial_lambda)
                               : "bisections exhausted on nonconvergence at lambda = " +
                                     std::to_string(trial_lambda);
          report.wall_seconds =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          return {u, report};
        }
        trial_lambda = lambda + 0.5 * (trial_lambda - lambda);
      }
    }
    lambda = target;
  }

  report.completed = true;
  report.final_lambda = 1.0;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {u, report};
}

}  // namespace tmc
