#include "tmc/bench.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

namespace tmc {

double measure_gap(const PolygonalMesh& mesh, const VectorXd& u, const GapProbe& probe) {
  if (probe.upper.empty() || probe.lower.empty())
    throw std::invalid_argument("measure_gap: empty probe chain");
  auto deformed = [&](int v) -> Vector2d {
    if (v < 0 || v >= mesh.n_vertices())
      throw std::invalid_argument("measure_gap: probe vertex outside mesh");
    return mesh.vertices[v] + Vector2d(u(2 * v), u(2 * v + 1));
  };
  std::vector<Vector2d> lower;
  lower.reserve(probe.lower.size());
  for (int v : probe.lower) lower.push_back(deformed(v));

  double best = std::numeric_limits<double>::infinity();
  for (int uv : probe.upper) {
    const Vector2d p = deformed(uv);
    for (std::size_t i = 0; i + 1 < lower.size(); ++i) {
      const Vector2d& a = lower[i];
      const Vector2d& b = lower[i + 1];
      const double xmin = std::min(a.x(), b.x()), xmax = std::max(a.x(), b.x());
      if (p.x() < xmin || p.x() > xmax || xmax - xmin < 1e-14) continue;
      const double t = (p.x() - a.x()) / (b.x() - a.x());
      best = std::min(best, p.y() - (a.y() + t * (b.y() - a.y())));
    }
  }
  if (!std::isfinite(best))
    throw std::invalid_argument("measure_gap: no lower segment under the upper chain");
  return std::max(0.0, best);
}

BenchmarkConfig benchmark_preset(BenchmarkId id) {
  BenchmarkConfig c;
  c.problem = benchmark_to_string(id);
  switch (id) {
    case BenchmarkId::BoxSelfContact:
      c.bodies[0] = {20.0, 10.0};
      c.medium = {1e-6, 0.1, 5.0, RegularizationKind::HuHuDeviatoric, 10.0, 20.0};
      c.uy = -1.0;
      c.steps = 100;
      break;
    case BenchmarkId::CBox:
      c.bodies[0] = {5.0 / 3.0, 5.0 / 14.0};
      c.medium = {1e-5, 1.0, 0.0, RegularizationKind::RotationJacobian, 5.0 / 14.0, 5.0 / 3.0};
      c.uy = -0.5;
      c.steps = 100;
      break;
    case BenchmarkId::Punch:
      c.bodies[0] = {5.0 / 3.0, 5.0 / 14.0};
      c.bodies[1] = {5.0 / 3.0, 5.0 / 14.0};
      c.medium = {1e-4, 1.0, 0.0, RegularizationKind::RotationJacobian, 5.0 / 14.0, 5.0 / 3.0};
      c.uy = -1.3;
      c.steps = 130;
      break;
    case BenchmarkId::MultiObject:
      c.bodies[0] = {50.0, 10.0};
      for (int s = 1; s <= 7; ++s) c.bodies[s] = {50000.0, 10000.0};
      c.medium = {1e-4, 10.0, 0.0, RegularizationKind::RotationJacobian, 10.0, 50.0};
      c.uy = -0.5;
      c.steps = 50;
      break;
  }
  return c;
}

namespace {

nlohmann::json medium_to_json(const ThirdMediumParams& m) {
  return {{"gamma", m.gamma}, {"alpha_r", m.alpha_r}, {"beta", m.beta},
          {"reg", regularization_to_string(m.reg)}, {"mu", m.mu}, {"K", m.K}};
}

void medium_from_json(const nlohmann::json& j, ThirdMediumParams& m) {
  if (j.contains("gamma")) m.gamma = j["gamma"].get<double>();
  if (j.contains("alpha_r")) m.alpha_r = j["alpha_r"].get<double>();
  if (j.contains("beta")) m.beta = j["beta"].get<double>();
  if (j.contains("reg")) m.reg = regularization_from_string(j["reg"].get<std::string>());
  if (j.contains("mu")) m.mu = j["mu"].get<double>();
  if (j.contains("K")) m.K = j["K"].get<double>();
}

}  // namespace

BenchmarkConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  nlohmann::json j;
  in >> j;

  const std::string problem = j.value("problem", std::string("box-self-contact"));
  BenchmarkConfig c = benchmark_preset(benchmark_from_string(problem));
  if (j.contains("refinement")) c.refinement = j["refinement"].get<int>();
  if (j.contains("materials")) {
    for (const auto& [key, val] : j["materials"].items()) {
      if (key == "medium") {
        medium_from_json(val, c.medium);
      } else if (key.rfind("body", 0) == 0) {
        BodyParams b = c.bodies.count(std::stoi(key.substr(4)))
                           ? c.bodies[std::stoi(key.substr(4))]
                           : BodyParams{};
        if (val.contains("K")) b.K = val["K"].get<double>();
        if (val.contains("mu")) b.mu = val["mu"].get<double>();
        c.bodies[std::stoi(key.substr(4))] = b;
      } else {
        throw std::invalid_argument("unknown material region '" + key + "'");
      }
    }
  }
  if (j.contains("load")) {
    const auto& l = j["load"];
    if (l.contains("uy")) c.uy = l["uy"].get<double>();
    if (l.contains("steps")) c.steps = l["steps"].get<int>();
    if (l.contains("auto_adjust")) {
      const auto& a = l["auto_adjust"];
      if (a.contains("enabled")) c.auto_adjust.enabled = a["enabled"].get<bool>();
      if (a.contains("min_factor")) c.auto_adjust.min_factor = a["min_factor"].get<double>();
      if (a.contains("grow_after")) c.auto_adjust.grow_after = a["grow_after"].get<int>();
    }
  }
  if (j.contains("tol_rel")) c.tol_rel = j["tol_rel"].get<double>();
  if (j.contains("tol_abs_scale")) c.tol_abs_scale = j["tol_abs_scale"].get<double>();
  if (j.contains("max_iter")) c.max_iter = j["max_iter"].get<int>();
  if (j.contains("backtracking")) c.backtracking = j["backtracking"].get<bool>();
  if (j.contains("quadrature_degree")) c.quadrature_degree = j["quadrature_degree"].get<int>();
  if (j.contains("volume_term")) c.volume_term = j["volume_term"].get<std::string>();
  if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
  if (j.contains("threads")) c.threads = j["threads"].get<int>();
  return c;
}

void save_config(const BenchmarkConfig& c, const std::string& path) {
  nlohmann::json j;
  j["problem"] = c.problem;
  j["refinement"] = c.refinement;
  nlohmann::json mats;
  for (const auto& [id, b] : c.bodies) mats["body" + std::to_string(id)] = {{"K", b.K}, {"mu", b.mu}};
  mats["medium"] = medium_to_json(c.medium);
  j["materials"] = mats;
  j["load"] = {{"uy", c.uy},
               {"steps", c.steps},
               {"auto_adjust",
                {{"enabled", c.auto_adjust.enabled},
                 {"min_factor", c.auto_adjust.min_factor},
                 {"grow_after", c.auto_adjust.grow_after}}}};
  j["tol_rel"] = c.tol_rel;
  j["tol_abs_scale"] = c.tol_abs_scale;
  j["max_iter"] = c.max_iter;
  j["backtracking"] = c.backtracking;
  j["quadrature_degree"] = c.quadrature_degree;
  j["volume_term"] = c.volume_term;
  j["out"] = c.out_dir;
  j["threads"] = c.threads;
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write config file '" + path + "'");
  out << j.dump(2) << "\n";
}

LoadProgram benchmark_load_program(const BenchmarkConfig& config) {
  LoadProgram p;
  p.n_steps = config.steps;
  p.auto_adjust = config.auto_adjust;
  switch (benchmark_from_string(config.problem)) {
    case BenchmarkId::BoxSelfContact:
      p.targets["bottom-left-corner"] = {0.0, 0.0};
      p.targets["bottom-right-corner"] = {std::nullopt, 0.0};
      p.targets["top-load-band"] = {std::nullopt, config.uy};
      break;
    case BenchmarkId::CBox:
      p.targets["left-wall"] = {0.0, 0.0};
      p.targets["load-point"] = {std::nullopt, config.uy};
      break;
    case BenchmarkId::Punch:
      p.targets["symmetry"] = {0.0, std::nullopt};
      p.targets["bottom"] = {std::nullopt, 0.0};
      p.targets["punch-top"] = {std::nullopt, config.uy};
      break;
    case BenchmarkId::MultiObject:
      p.targets["left-end"] = {0.0, 0.0};
      p.targets["right-end"] = {0.0, 0.0};
      p.targets["load-tops"] = {0.0, config.uy};
      break;
  }
  return p;
}

GapProbe benchmark_gap_probe(BenchmarkId id, const PolygonalMesh& mesh) {
  auto chain = [&](const std::string& name) {
    auto it = mesh.boundary_sets.find(name);
    if (it == mesh.boundary_sets.end())
      throw std::invalid_argument("missing probe set '" + name + "'");
    return it->second.vertices;
  };
  GapProbe probe;
  switch (id) {
    case BenchmarkId::BoxSelfContact:
      probe.upper = chain("upper-flange-inner");
      probe.lower = chain("lower-flange-inner");
      break;
    case BenchmarkId::CBox:
      probe.upper = chain("upper-beam-inner");
      probe.lower = chain("lower-beam-inner");
      break;
    case BenchmarkId::Punch:
      probe.upper = chain("punch-arc");
      probe.lower = chain("rect-top");
      break;
    case BenchmarkId::MultiObject:
      probe.upper = chain("center-arc");
      probe.lower = chain("rect-top");
      break;
  }
  return probe;
}

std::string benchmark_reaction_set(BenchmarkId id) {
  switch (id) {
    case BenchmarkId::BoxSelfContact: return "top-load-band";
    case BenchmarkId::CBox: return "load-point";
    case BenchmarkId::Punch: return "punch-top";
    case BenchmarkId::MultiObject: return "load-tops";
  }
  return {};
}

BenchmarkRun run_benchmark(const BenchmarkConfig& config, const FailureInjector& inject_failure) {
  const BenchmarkId id = benchmark_from_string(config.problem);
  BenchmarkRun run;
  run.mesh = generate_benchmark_mesh(id, config.refinement);

  const GlobalDofMap dofmap(run.mesh);
  OperatorOptions op_options;
  op_options.quadrature_degree = config.quadrature_degree;
  if (config.volume_term == "pi-1")
    op_options.volume_term = VolumeTerm::Pi1;
  else if (config.volume_term != "pi-k")
    throw std::invalid_argument("volume_term must be 'pi-k' or 'pi-1'");
  const auto ops = build_all_operators(run.mesh, dofmap, op_options, config.threads);

  MaterialMap materials{config.bodies, config.medium};
  const LoadProgram program = benchmark_load_program(config);
  const DofPartition partition = build_partition(run.mesh, dofmap, program.targets);
  const GapProbe probe = benchmark_gap_probe(id, run.mesh);

  NewtonOptions newton;
  newton.tol_rel = config.tol_rel;
  newton.tol_abs_scale = config.tol_abs_scale;
  newton.max_iter = config.max_iter;
  newton.backtracking = config.backtracking;
  newton.threads = config.threads;

  StepCallback on_step;
  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    on_step = [&run, &config](const StepRecord& rec, const VectorXd& u) {
      char name[32];
      std::snprintf(name, sizeof name, "step_%04d.vtk", rec.step);
      write_vtk(run.mesh, u, config.out_dir + "/" + name);
    };
  }

  run.report = run_load_program(
      run.mesh, dofmap, ops, materials, partition, program, newton,
      [&](const VectorXd& u) { return measure_gap(run.mesh, u, probe); },
      benchmark_reaction_set(id), on_step, inject_failure);

  if (!config.out_dir.empty())
    write_report_csv(run.report, config.out_dir + "/report.csv");
  return run;
}

void write_report_csv(const SolveReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write report '" + path + "'");
  out << "step,factor,iters,gap,reaction_x,reaction_y\n";
  char line[256];
  for (const auto& s : report.steps) {
    std::snprintf(line, sizeof line, "%d,%.17g,%d,%.17g,%.17g,%.17g\n", s.step, s.factor,
                  s.iterations, s.gap, s.reaction.x(), s.reaction.y());
    out << line;
  }
}

void write_vtk(const PolygonalMesh& mesh, const VectorXd& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write VTK file '" + path + "'");
  char buf[160];
  out << "# vtk DataFile Version 3.0\n";
  out << "deformed configuration\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const Vector2d p = mesh.vertices[v] + Vector2d(u(2 * v), u(2 * v + 1));
    std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", p.x(), p.y());
    out << buf;
  }
  int list_size = 0;
  for (const auto& ring : mesh.elements) list_size += 1 + static_cast<int>(ring.size());
  out << "CELLS " << mesh.n_elements() << " " << list_size << "\n";
  for (const auto& ring : mesh.elements) {
    out << ring.size();
    for (int v : ring) out << " " << v;
    out << "\n";
  }
  out << "CELL_TYPES " << mesh.n_elements() << "\n";
  for (int e = 0; e < mesh.n_elements(); ++e) out << "7\n";  // VTK_POLYGON
  out << "POINT_DATA " << mesh.n_vertices() << "\n";
  out << "VECTORS displacement double\n";
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", u(2 * v), u(2 * v + 1));
    out << buf;
  }
}

SweepGrid load_sweep_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open sweep grid '" + path + "'");
  nlohmann::json j;
  in >> j;
  SweepGrid grid;
  bool any = false;
  if (j.contains("gamma")) {
    grid.gamma = j["gamma"].get<std::vector<double>>();
    any = true;
  }
  if (j.contains("alpha_r")) {
    grid.alpha_r = j["alpha_r"].get<std::vector<double>>();
    any = true;
  }
  if (j.contains("reg")) {
    for (const auto& s : j["reg"]) grid.regs.push_back(regularization_from_string(s));
    any = true;
  }
  // A grid with no points is rejected before any run; absent keys fall back
  // to the config's single value.
  if (!any || (j.contains("gamma") && grid.gamma.empty()) ||
      (j.contains("alpha_r") && grid.alpha_r.empty()) ||
      (j.contains("reg") && grid.regs.empty()))
    throw std::invalid_argument("sweep: empty parameter grid in '" + path + "'");
  return grid;
}

std::vector<SweepRow> sweep(const BenchmarkConfig& config, const SweepGrid& grid) {
  std::vector<double> gammas = grid.gamma.empty() ? std::vector<double>{config.medium.gamma}
                                                  : grid.gamma;
  std::vector<double> alphas = grid.alpha_r.empty() ? std::vector<double>{config.medium.alpha_r}
                                                    : grid.alpha_r;
  std::vector<RegularizationKind> regs =
      grid.regs.empty() ? std::vector<RegularizationKind>{config.medium.reg} : grid.regs;
  if (gammas.empty() || alphas.empty() || regs.empty())
    throw std::invalid_argument("sweep: empty parameter grid");

  std::vector<SweepRow> rows;
  for (double a : alphas)
    for (double g : gammas)
      for (RegularizationKind r : regs) {
        SweepRow row;
        row.gamma = g;
        row.alpha_r = a;
        row.reg = r;
        rows.push_back(row);
      }

  const int n = static_cast<int>(rows.size());
  const int jobs = std::max(1, std::min(config.threads, n));
  auto worker = [&](int first, int stride) {
    for (int i = first; i < n; i += stride) {
      BenchmarkConfig point = config;
      point.medium.gamma = rows[i].gamma;
      point.medium.alpha_r = rows[i].alpha_r;
      point.medium.reg = rows[i].reg;
      point.out_dir.clear();
      point.threads = 1;
      try {
        const BenchmarkRun run = run_benchmark(point);
        rows[i].status = run.report.status == SolveStatus::Success ? "ok" : "step-collapse";
        rows[i].steps_completed = static_cast<int>(run.report.steps.size());
        if (!run.report.steps.empty()) {
          rows[i].final_factor = run.report.steps.back().factor;
          rows[i].final_gap = run.report.steps.back().gap;
          rows[i].reaction_y = run.report.steps.back().reaction.y();
        }
      } catch (const std::exception& err) {
        rows[i].status = std::string("error: ") + err.what();
      }
    }
  };
  if (jobs == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker, t, jobs);
    for (auto& th : pool) th.join();
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write sweep table '" + path + "'");
  out << "gamma,alpha_r,reg,status,steps_completed,final_factor,final_gap,reaction_y\n";
  char line[320];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%s,%s,%d,%.17g,%.17g,%.17g\n", r.gamma,
                  r.alpha_r, regularization_to_string(r.reg).c_str(), r.status.c_str(),
                  r.steps_completed, r.final_factor, r.final_gap, r.reaction_y);
    out << line;
  }
}

}  // namespace tmc
