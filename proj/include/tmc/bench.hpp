#pragma once

#include <string>

#include "tmc/solver.hpp"

namespace tmc {

/// Ordered boundary vertex chains bounding the tracked gap.
struct GapProbe {
  std::vector<int> upper;
  std::vector<int> lower;
};

/// Minimum over upper-chain vertices of the vertical distance to the
/// piecewise-linear deformed lower chain, clipped at zero.
double measure_gap(const PolygonalMesh& mesh, const VectorXd& u, const GapProbe& probe);

struct BenchmarkConfig {
  std::string problem = "box-self-contact";
  int refinement = 0;
  std::map<int, BodyParams> bodies;
  ThirdMediumParams medium;
  double uy = -1.0;
  int steps = 100;
  AutoAdjust auto_adjust;
  double tol_rel = 1e-8;
  double tol_abs_scale = 1e-11;
  int max_iter = 25;
  bool backtracking = false;
  int quadrature_degree = 0;          // 0 = per-element default 2l+2
  std::string volume_term = "pi-k";   // or "pi-1"
  std::string out_dir;                // empty = no artifacts on disk
  int threads = 1;
};

/// Paper-parameter presets per problem id.
BenchmarkConfig benchmark_preset(BenchmarkId id);

BenchmarkConfig load_config(const std::string& path);
void save_config(const BenchmarkConfig& config, const std::string& path);

/// Load-program targets (supports + ramped displacement) for a benchmark.
LoadProgram benchmark_load_program(const BenchmarkConfig& config);
/// Gap probe chains for a benchmark mesh.
GapProbe benchmark_gap_probe(BenchmarkId id, const PolygonalMesh& mesh);
/// Name of the loaded boundary set (reaction readout).
std::string benchmark_reaction_set(BenchmarkId id);

struct BenchmarkRun {
  PolygonalMesh mesh;
  SolveReport report;
};

/// Builds mesh/operators/models, runs the load program, and (when out_dir is
/// set) writes report.csv plus step_####.vtk deformed configurations.
BenchmarkRun run_benchmark(const BenchmarkConfig& config,
                           const FailureInjector& inject_failure = {});

void write_report_csv(const SolveReport& report, const std::string& path);

/// Legacy ASCII VTK unstructured grid of the deformed configuration with a
/// "displacement" point vector.
void write_vtk(const PolygonalMesh& mesh, const VectorXd& u, const std::string& path);

struct SweepGrid {
  std::vector<double> gamma;
  std::vector<double> alpha_r;
  std::vector<RegularizationKind> regs;
};

SweepGrid load_sweep_grid(const std::string& path);

struct SweepRow {
  double gamma = 0.0;
  double alpha_r = 0.0;
  RegularizationKind reg = RegularizationKind::HuHu;
  std::string status;
  int steps_completed = 0;
  double final_factor = 0.0;
  double final_gap = 0.0;
  double reaction_y = 0.0;
};

/// Cross product of the grid over the template config; failures are recorded
/// as rows and the sweep continues. Jobs run in parallel bounded by
/// config.threads. Throws std::invalid_argument on an empty grid.
std::vector<SweepRow> sweep(const BenchmarkConfig& config, const SweepGrid& grid);

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace tmc
