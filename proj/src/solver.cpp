#include "tmc/solver.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>

namespace tmc {

NewtonTrace newton_solve(const PolygonalMesh& mesh, const GlobalDofMap& /*dofmap*/,
                         const std::vector<ElementOperators>& ops, const MaterialMap& materials,
                         const DofPartition& partition, double factor, VectorXd& u,
                         const NewtonOptions& options) {
  NewtonTrace trace;
  apply_prescribed(partition, factor, u);
  const double tol_abs = options.tol_abs_scale * std::sqrt(std::max(1, partition.n_free()));

  GlobalSystem sys;
  try {
    sys = assemble(mesh, ops, materials, u, partition, options.threads);
  } catch (const DegenerateState& err) {
    trace.failure = err.what();
    return trace;
  }
  double norm = sys.residual.norm();
  if (!std::isfinite(norm)) {
    trace.failure = "non-finite residual at the step start";
    return trace;
  }
  const double norm0 = norm;
  trace.residual_norms.push_back(norm);
  trace.full_residual = sys.full_residual;

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool analyzed = false;

  for (int it = 0; it < options.max_iter; ++it) {
    if (norm < tol_abs || norm < options.tol_rel * norm0) {
      trace.converged = true;
      trace.iterations = it;
      return trace;
    }
    if (!analyzed) {
      ldlt.analyzePattern(sys.tangent);
      analyzed = true;
    }
    ldlt.factorize(sys.tangent);
    if (ldlt.info() != Eigen::Success) {
      trace.failure = "sparse LDLT factorization failed";
      return trace;
    }
    VectorXd du = ldlt.solve(-sys.residual);
    if (!du.allFinite()) {
      trace.failure = "non-finite Newton update";
      return trace;
    }

    const int n_back = options.backtracking ? 4 : 0;
    double alpha = 1.0;
    bool accepted = false;
    const VectorXd u_old = u;
    for (int attempt = 0; attempt <= n_back; ++attempt) {
      u = u_old;
      for (int f = 0; f < partition.n_free(); ++f)
        u(partition.global_of_free[f]) += alpha * du(f);
      try {
        sys = assemble(mesh, ops, materials, u, partition, options.threads);
      } catch (const DegenerateState& err) {
        if (attempt == n_back) {
          trace.failure = err.what();
          return trace;
        }
        alpha *= 0.5;
        continue;
      }
      const double new_norm = sys.residual.norm();
      if (!std::isfinite(new_norm)) {
        if (attempt == n_back) {
          trace.failure = "non-finite residual";
          return trace;
        }
        alpha *= 0.5;
        continue;
      }
      if (!options.backtracking || new_norm < norm || attempt == n_back) {
        norm = new_norm;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      trace.failure = "line search exhausted";
      return trace;
    }
    trace.residual_norms.push_back(norm);
    trace.full_residual = sys.full_residual;
  }

  if (norm < tol_abs || norm < options.tol_rel * norm0) {
    trace.converged = true;
    trace.iterations = options.max_iter;
    return trace;
  }
  trace.failure = "maximum Newton iterations exceeded";
  return trace;
}

SolveReport run_load_program(const PolygonalMesh& mesh, const GlobalDofMap& dofmap,
                             const std::vector<ElementOperators>& ops,
                             const MaterialMap& materials, const DofPartition& partition,
                             const LoadProgram& program, const NewtonOptions& options,
                             const GapFn& gap, const std::string& reaction_set,
                             const StepCallback& on_step, const FailureInjector& inject_failure) {
  SolveReport report;
  report.u = VectorXd::Zero(partition.n_total);

  const double base = 1.0 / program.n_steps;
  const double floor = base * program.auto_adjust.min_factor;
  double inc = base;
  double factor = 0.0;
  int consecutive = 0;
  int step_index = 0;

  while (factor < 1.0 - 1e-12) {
    inc = std::min(inc, 1.0 - factor);
    const double target = factor + inc;

    VectorXd u_try = report.u;
    NewtonTrace trace = newton_solve(mesh, dofmap, ops, materials, partition, target, u_try,
                                     options);
    const bool injected = inject_failure && inject_failure(step_index, target);

    if (trace.converged && !injected) {
      factor = target;
      report.u = std::move(u_try);
      StepRecord rec;
      rec.step = step_index++;
      rec.factor = factor;
      rec.iterations = trace.iterations;
      rec.residual_norms = trace.residual_norms;
      rec.gap = gap ? gap(report.u) : 0.0;
      if (!reaction_set.empty())
        rec.reaction = reaction_force(mesh, dofmap, partition, trace.full_residual, reaction_set);
      report.steps.push_back(rec);
      if (on_step) on_step(report.steps.back(), report.u);
      ++consecutive;
      if (program.auto_adjust.enabled && consecutive >= program.auto_adjust.grow_after &&
          inc < base) {
        inc = std::min(base, 2.0 * inc);
        consecutive = 0;
      }
    } else {
      const std::string why = injected ? "injected failure" : trace.failure;
      if (!program.auto_adjust.enabled) {
        report.status = SolveStatus::NewtonFailure;
        report.message = "step " + std::to_string(step_index) + " failed: " + why;
        return report;
      }
      ++report.halvings;
      consecutive = 0;
      inc *= 0.5;
      if (inc < floor - 1e-15) {
        report.status = SolveStatus::StepCollapse;
        report.message = "step collapse at factor " + std::to_string(factor) + ": " + why;
        return report;
      }
    }
  }
  report.status = SolveStatus::Success;
  return report;
}

}  // namespace tmc
