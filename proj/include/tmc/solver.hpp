#pragma once

#include <functional>

#include "tmc/assembly.hpp"

namespace tmc {

struct NewtonOptions {
  double tol_rel = 1e-8;
  double tol_abs_scale = 1e-11;  // tol_abs = scale * sqrt(n_free)
  int max_iter = 25;
  bool backtracking = false;  // halve the update up to 4 times on residual growth
  int threads = 1;
};

struct NewtonTrace {
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_norms;
  std::string failure;
  VectorXd full_residual;  // at the last assembled state
};

/// Newton iteration at a fixed load factor. Prescribed DOFs are set from the
/// partition before the first assembly; failure (max_iter, bad factorization,
/// degenerate material state) is reported as a value.
NewtonTrace newton_solve(const PolygonalMesh& mesh, const GlobalDofMap& dofmap,
                         const std::vector<ElementOperators>& ops, const MaterialMap& materials,
                         const DofPartition& partition, double factor, VectorXd& u,
                         const NewtonOptions& options);

struct AutoAdjust {
  bool enabled = true;
  double min_factor = 1.0 / 64;  // floor = min_factor / n_steps
  int grow_after = 2;
};

struct LoadProgram {
  std::map<std::string, PrescribedMotion> targets;
  int n_steps = 100;
  AutoAdjust auto_adjust;
};

struct StepRecord {
  int step = 0;
  double factor = 0.0;
  int iterations = 0;
  std::vector<double> residual_norms;
  double gap = 0.0;
  Vector2d reaction = Vector2d::Zero();
};

enum class SolveStatus { Success, StepCollapse, NewtonFailure };

struct SolveReport {
  std::vector<StepRecord> steps;
  VectorXd u;  // last converged displacement field
  SolveStatus status = SolveStatus::Success;
  std::string message;
  int halvings = 0;
};

using GapFn = std::function<double(const VectorXd&)>;
using StepCallback = std::function<void(const StepRecord&, const VectorXd&)>;
/// Test hook: returning true marks the step as failed regardless of Newton.
using FailureInjector = std::function<bool(int step_index, double factor)>;

/// Marches the load factor 0 -> 1; on failure halves the increment and
/// retries from the last converged state, growing back toward the base
/// increment after consecutive successes.
SolveReport run_load_program(const PolygonalMesh& mesh, const GlobalDofMap& dofmap,
                             const std::vector<ElementOperators>& ops,
                             const MaterialMap& materials, const DofPartition& partition,
                             const LoadProgram& program, const NewtonOptions& options,
                             const GapFn& gap = {}, const std::string& reaction_set = {},
                             const StepCallback& on_step = {},
                             const FailureInjector& inject_failure = {});

}  // namespace tmc
