#include "manifest.hpp"

#include <surfmg/decimate.hpp>
#include <surfmg/fem.hpp>
#include <surfmg/multigrid.hpp>
#include <surfmg/obj_io.hpp>
#include <surfmg/selfparam.hpp>
#include <surfmg/sparse.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

namespace {

using namespace surfmg;
using cli::Manifest;
using cli::Stopwatch;
using nlohmann::ordered_json;

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kNoConvergence = 3 };

/// Options shared by the solving subcommands.
struct SolverFlags {
  double tol = 1e-5;
  int max_cycles = 100;
  int pre = 2;
  int post = 2;
  std::string relaxation = "gs";
  std::string ordering = "natural";
  double omega = 0.8;
  int threads = 1;

  void attach(CLI::App* app) {
    app->add_option("--tol", tol, "relative residual tolerance")->capture_default_str();
    app->add_option("--max-cycles", max_cycles)->capture_default_str();
    app->add_option("--pre", pre, "pre-relaxation sweeps")->capture_default_str();
    app->add_option("--post", post, "post-relaxation sweeps")->capture_default_str();
    app->add_option("--relaxation", relaxation)->check(CLI::IsMember({"gs", "jacobi"}))->capture_default_str();
    app->add_option("--ordering", ordering)->check(CLI::IsMember({"natural", "colored"}))->capture_default_str();
    app->add_option("--omega", omega, "Jacobi damping")->capture_default_str();
    app->add_option("--threads", threads, "threads for colored relaxation")->capture_default_str();
  }

  SolverConfig config() const {
    SolverConfig c;
    c.tol = tol;
    c.max_cycles = max_cycles;
    c.pre_sweeps = pre;
    c.post_sweeps = post;
    c.relaxation = relaxation == "jacobi" ? Relaxation::DampedJacobi : Relaxation::GaussSeidel;
    c.ordering = ordering == "colored" ? Ordering::Colored : Ordering::Natural;
    c.omega = omega;
    c.threads = threads;
    c.validate();
    return c;
  }

  ordered_json echo() const {
    return {{"tol", tol},         {"max_cycles", max_cycles}, {"pre_sweeps", pre}, {"post_sweeps", post},
            {"relaxation", relaxation}, {"ordering", ordering}, {"omega", omega}, {"threads", threads}};
  }
};

ordered_json times_json(const PhaseTimes& t) {
  return {{"setup_ms", t.setup},       {"relax_ms", t.relax},       {"transfer_ms", t.transfer},
          {"coarse_ms", t.coarse},     {"residual_ms", t.residual}, {"total_ms", t.total}};
}

ordered_json report_json(const SolveReport& r) {
  return {{"cycles", r.cycles},
          {"converged", r.converged},
          {"final_residual", r.residuals.empty() ? 0.0 : r.residuals.back()},
          {"mean_contraction", r.mean_contraction()},
          {"phases", times_json(r.times)}};
}

ordered_json hierarchy_json(const Hierarchy& h) {
  return {{"level_sizes", h.level_sizes},
          {"target_sizes", h.target_sizes},
          {"ratio", h.config.ratio},
          {"min_vertices", h.config.min_vertices},
          {"decimation", to_string(h.config.decimation.strategy)},
          {"flattening", to_string(h.config.decimation.flatten.energy)}};
}

std::string levels_line(const std::vector<int>& sizes) {
  std::string s = "levels: ";
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) s += " → ";
    s += std::to_string(sizes[i]);
  }
  return s;
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

Vector read_vector(const std::string& path, int expected, const char* what) {
  std::vector<double> v = read_scalar_csv(path);
  if (expected >= 0 && static_cast<int>(v.size()) != expected)
    throw DimensionError(std::string(what) + " has " + std::to_string(v.size()) + " entries, mesh has " +
                         std::to_string(expected) + " vertices");
  return to_vector(v);
}

std::string alpha_label(double a) {
  std::ostringstream s;
  s << a;
  return s.str();
}

void write_positions_obj(const std::string& path, const Positions& x, const std::vector<Face>& faces) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_obj(out, to_points(x), faces);
}

// ---------------------------------------------------------------- build

struct BuildArgs {
  std::string input, out;
  double ratio = 0.25;
  int min_verts = 500;
  std::string decimation = "midpoint";
  std::string energy = "lscm";
};

int run_build(const BuildArgs& a) {
  SurfaceMesh mesh = load_obj(a.input);
  HierarchyConfig cfg;
  cfg.ratio = a.ratio;
  cfg.min_vertices = a.min_verts;
  cfg.decimation.strategy = parse_strategy(a.decimation);
  cfg.decimation.flatten.energy = a.energy == "arap" ? EnergyKind::ARAP : EnergyKind::LSCM;

  Stopwatch clock;
  Hierarchy h = build_hierarchy(mesh, cfg);
  const double build_ms = clock.ms();
  save_hierarchy(h, a.out);

  for (const std::string& w : h.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << levels_line(h.level_sizes) << '\n';

  Manifest m("build");
  m.data["input"] = a.input;
  m.data["outputs"] = {a.out};
  m.data["config"] = hierarchy_json(h);
  m.data["warnings"] = h.warnings;
  m.data["timings"] = {{"build_ms", build_ms}};
  m.write(a.out);
  return kOk;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string hierarchy, problem = "poisson", rhs, report = "convergence.csv", out = "solution.csv";
  std::vector<std::string> dirichlet;
  SolverFlags solver;
};

int run_solve(const SolveArgs& a) {
  SolverConfig cfg = a.solver.config();
  Hierarchy h = load_hierarchy(a.hierarchy);
  const int n = h.fine.num_vertices();
  Vector f = read_vector(a.rhs, n, "rhs");

  Stopwatch clock;
  SparseMatrix l = cotan_laplacian(h.fine);
  SparseMatrix mass = lumped_mass(h.fine);
  std::vector<int> known{0};
  Vector known_values = Vector::Zero(1);
  double removed_mean = 0;
  if (a.dirichlet.empty()) {
    // the pure Neumann problem needs zero-mean data
    const Vector area = mass.diagonal();
    removed_mean = area.dot(f) / area.sum();
    f.array() -= removed_mean;
  } else {
    Vector idx = read_vector(a.dirichlet[0], -1, "dirichlet indices");
    known_values = read_vector(a.dirichlet[1], static_cast<int>(idx.size()), "dirichlet values");
    known.resize(static_cast<std::size_t>(idx.size()));
    for (Eigen::Index i = 0; i < idx.size(); ++i) known[static_cast<std::size_t>(i)] = static_cast<int>(idx[i]);
  }
  Vector b = spmv(mass, f);
  ReducedSystem sys = reduce_dirichlet(l, b, known, known_values, h.prolongations, cfg.ordering);
  const double assemble_ms = clock.ms();

  auto [x, rep] = solve_dirichlet(sys, Vector(), cfg);
  write_scalar_csv(a.out, x);
  write_report_csv(a.report, rep);

  std::cout << "cycles: " << rep.cycles << "  residual: " << std::scientific << std::setprecision(3)
            << (rep.residuals.empty() ? 0.0 : rep.residuals.back()) << '\n';

  Manifest m("solve");
  m.data["inputs"] = {{"hierarchy", a.hierarchy}, {"rhs", a.rhs}};
  if (!a.dirichlet.empty()) m.data["inputs"]["dirichlet"] = a.dirichlet;
  m.data["outputs"] = {a.out, a.report};
  m.data["config"] = {{"problem", a.problem},
                      {"gauge", a.dirichlet.empty() ? "vertex 0 fixed to 0" : "none"},
                      {"removed_rhs_mean", removed_mean},
                      {"hierarchy", hierarchy_json(h)},
                      {"solver", a.solver.echo()}};
  m.data["result"] = report_json(rep);
  m.data["timings"] = {{"assemble_and_setup_ms", assemble_ms}, {"solve_ms", rep.times.total}};
  m.write(a.out);
  if (!rep.converged) {
    std::cerr << "error: no convergence to " << cfg.tol << " within " << cfg.max_cycles << " cycles\n";
    return kNoConvergence;
  }
  return kOk;
}

// ---------------------------------------------------------------- smooth

struct SmoothArgs {
  std::string hierarchy, fn, energy = "dirichlet", out_prefix = "smoothed";
  std::vector<double> alphas{0.1, 0.5, 0.9};
  SolverFlags solver;
};

int run_smooth(const SmoothArgs& a) {
  SolverConfig cfg = a.solver.config();
  Hierarchy h = load_hierarchy(a.hierarchy);
  const int n = h.fine.num_vertices();
  Vector f = read_vector(a.fn, n, "function");
  for (double alpha : a.alphas)
    if (!(alpha >= 0.0 && alpha < 1.0)) throw DimensionError("alpha must lie in [0, 1)");

  Stopwatch clock;
  SparseMatrix l = cotan_laplacian(h.fine);
  SparseMatrix mass = lumped_mass(h.fine);
  SparseMatrix q = a.energy == "bilaplacian" ? bilaplacian(l, mass) : l;
  SmoothingPrecompute pre = smoothing_fast_setup(h.prolongations, q, mass);
  const double setup_ms = clock.ms();

  const auto triples_before = galerkin_triple_count();
  ordered_json runs = ordered_json::array();
  std::vector<std::string> outputs;
  bool all_converged = true;
  for (double alpha : a.alphas) {
    auto [x, rep] = smoothing_solve(pre, alpha, f, cfg);
    const std::string path = a.out_prefix + ".alpha_" + alpha_label(alpha) + ".csv";
    write_scalar_csv(path, x);
    outputs.push_back(path);
    all_converged = all_converged && rep.converged;
    runs.push_back({{"alpha", alpha},
                    {"output", path},
                    {"solve_ms", rep.times.total},
                    {"dirichlet_energy", 0.5 * x.dot(spmv(l, x))},
                    {"result", report_json(rep)}});
    std::cout << "alpha " << alpha_label(alpha) << ": " << rep.cycles << " cycles\n";
  }
  const auto sweep_triples = galerkin_triple_count() - triples_before;

  Manifest m("smooth");
  m.data["inputs"] = {{"hierarchy", a.hierarchy}, {"fn", a.fn}};
  m.data["outputs"] = outputs;
  m.data["config"] = {{"energy", a.energy}, {"alphas", a.alphas}, {"hierarchy", hierarchy_json(h)},
                      {"solver", a.solver.echo()}};
  m.data["setup"] = {{"ms", setup_ms}, {"galerkin_triple_products", 2 * h.levels()}};
  m.data["sweep"] = {{"galerkin_triple_products", sweep_triples}, {"runs", runs}};
  m.write(a.out_prefix);
  return all_converged ? kOk : kNoConvergence;
}

// ---------------------------------------------------------------- flow

struct FlowArgs {
  std::string hierarchy, out_prefix = "flow";
  int steps = 10;
  double delta = 1e-3;
  SolverFlags solver;
};

std::string step_path(const std::string& prefix, int step) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", step);
  return prefix + "_" + buf + ".obj";
}

int run_flow(const FlowArgs& a) {
  SolverConfig cfg = a.solver.config();
  if (a.steps < 0) throw DimensionError("--steps must be non-negative");
  Stopwatch load_clock;
  Hierarchy h = load_hierarchy(a.hierarchy);
  const double load_ms = load_clock.ms();
  if (!h.fine.is_closed()) throw MeshError("flow requires a closed mesh");

  const std::vector<Face>& faces = h.fine.faces();
  SparseMatrix l0 = cotan_laplacian(h.fine);
  Positions x = positions_of(h.fine);
  std::vector<std::string> outputs{step_path(a.out_prefix, 0)};
  write_positions_obj(outputs.back(), x, faces);

  ordered_json steps = ordered_json::array();
  bool all_converged = true;
  for (int s = 1; s <= a.steps; ++s) {
    std::vector<SolveReport> reports;
    Stopwatch clock;
    Positions next = mcf_step(faces, l0, x, a.delta, multigrid_multisolve(h.prolongations, cfg, &x, &reports));
    const double ms = clock.ms();
    x = std::move(next);
    outputs.push_back(step_path(a.out_prefix, s));
    write_positions_obj(outputs.back(), x, faces);
    ordered_json cycles = ordered_json::array();
    for (const SolveReport& r : reports) {
      cycles.push_back(r.cycles);
      all_converged = all_converged && r.converged;
    }
    steps.push_back({{"step", s}, {"ms", ms}, {"cycles_xyz", cycles}, {"sphericity_error", sphericity_error(x)}});
  }
  std::cout << "steps: " << a.steps << "  sphericity error: " << sphericity_error(x) << '\n';

  Manifest m("flow");
  m.data["inputs"] = {{"hierarchy", a.hierarchy}};
  m.data["outputs"] = outputs;
  m.data["config"] = {{"steps", a.steps}, {"delta", a.delta}, {"hierarchy", hierarchy_json(h)},
                      {"solver", a.solver.echo()}};
  m.data["hierarchy_builds"] = 1;
  m.data["timings"] = {{"hierarchy_load_ms", load_ms}};
  m.data["steps"] = steps;
  m.write(a.out_prefix);
  return all_converged ? kOk : kNoConvergence;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string hierarchy, problem = "poisson", out = "bench.csv";
  std::vector<std::string> baselines{"gs", "onering"};
  double gs_budget = 5.0;
  SolverFlags solver;
};

void append_curve(std::ostream& out, const std::string& method, const SolveReport& r) {
  for (std::size_t c = 0; c < r.residuals.size(); ++c)
    out << method << ',' << c << ',' << r.residuals[c] << ',' << r.cumulative_ms[c] << '\n';
}

int run_bench(const BenchArgs& a) {
  SolverConfig cfg = a.solver.config();
  Hierarchy h = load_hierarchy(a.hierarchy);
  SparseMatrix l = cotan_laplacian(h.fine);
  SparseMatrix mass = lumped_mass(h.fine);
  Vector f = positions_of(h.fine).col(0);
  f.array() -= mass.diagonal().dot(f) / mass.diagonal().sum();
  Vector b = spmv(mass, f);
  const std::vector<int> known{0};
  const Vector zero = Vector::Zero(1);

  ordered_json methods;
  std::ofstream csv(a.out);
  if (!csv) throw Error("cannot write " + a.out);
  csv << "method,cycle,residual,cumulative_ms\n" << std::setprecision(17);

  ReducedSystem sys = reduce_dirichlet(l, b, known, zero, h.prolongations, cfg.ordering);
  auto [x, rep] = solve_dirichlet(sys, Vector(), cfg);
  append_curve(csv, "intrinsic", rep);
  methods["intrinsic"] = report_json(rep);
  methods["intrinsic"]["setup_ms"] = sys.stack.setup_ms();

  for (const std::string& base : a.baselines) {
    if (base == "gs") {
      SolverConfig gcfg = cfg;
      gcfg.max_cycles = std::max(1, static_cast<int>(a.gs_budget * std::max(rep.cycles, 1)));
      auto [xg, rg] = relaxation_only(sys.stack.matrix(0), sys.b, Vector(), gcfg);
      append_curve(csv, "gs", rg);
      methods["gs"] = report_json(rg);
      methods["gs"]["sweeps_per_cycle"] = cfg.pre_sweeps + cfg.post_sweeps;
    } else if (base == "onering") {
      Stopwatch clock;
      DecimationResult dec;
      HierarchyConfig hc = h.config;
      Hierarchy again = build_hierarchy(h.fine, hc, &dec);
      std::vector<SparseMatrix> ps = onering_prolongations(again, dec);
      const double build_ms = clock.ms();
      ReducedSystem osys = reduce_dirichlet(l, b, known, zero, ps, cfg.ordering);
      auto [xo, ro] = solve_dirichlet(osys, Vector(), cfg);
      append_curve(csv, "onering", ro);
      methods["onering"] = report_json(ro);
      methods["onering"]["setup_ms"] = osys.stack.setup_ms();
      methods["onering"]["rebuild_ms"] = build_ms;
    } else {
      throw CLI::ValidationError("--baselines", "unknown baseline '" + base + "'");
    }
  }

  for (auto it = methods.begin(); it != methods.end(); ++it)
    std::cout << std::left << std::setw(10) << it.key() << " cycles " << (*it)["cycles"] << "  residual "
              << (*it)["final_residual"] << '\n';

  Manifest m("bench");
  m.data["inputs"] = {{"hierarchy", a.hierarchy}};
  m.data["outputs"] = {a.out};
  m.data["config"] = {{"problem", a.problem},
                      {"rhs", "x coordinate minus its mean"},
                      {"baselines", a.baselines},
                      {"gs_budget", a.gs_budget},
                      {"hierarchy", hierarchy_json(h)},
                      {"solver", a.solver.echo()}};
  m.data["methods"] = methods;
  m.write(a.out);
  return rep.converged ? kOk : kNoConvergence;
}

// ---------------------------------------------------------------- export-map

struct ExportArgs {
  std::string hierarchy, out = "map.csv";
};

int run_export(const ExportArgs& a) {
  Hierarchy h = load_hierarchy(a.hierarchy);
  std::ofstream csv(a.out);
  if (!csv) throw Error("cannot write " + a.out);
  csv << "vertex,face,w1,w2,w3\n" << std::setprecision(17);
  for (std::size_t v = 0; v < h.fine_to_coarse.size(); ++v) {
    const BarycentricPoint& p = h.fine_to_coarse[v];
    csv << v << ',' << p.face << ',' << p.w[0] << ',' << p.w[1] << ',' << p.w[2] << '\n';
  }
  Manifest m("export-map");
  m.data["inputs"] = {{"hierarchy", a.hierarchy}};
  m.data["outputs"] = {a.out};
  m.data["config"] = {{"hierarchy", hierarchy_json(h)}};
  m.data["rows"] = h.fine_to_coarse.size();
  m.data["coarse_faces"] = h.coarse.num_faces();
  m.write(a.out);
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surface multigrid with intrinsic prolongation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "surfmg 0.1.0");

  BuildArgs build;
  auto* b = app.add_subcommand("build", "decimate a mesh and write a .ssph hierarchy");
  b->add_option("--input", build.input, "OBJ mesh")->required();
  b->add_option("--out", build.out, "hierarchy file")->required();
  b->add_option("--ratio", build.ratio)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  b->add_option("--min-verts", build.min_verts)->check(CLI::PositiveNumber)->capture_default_str();
  b->add_option("--decimation", build.decimation)
      ->check(CLI::IsMember({"qslim", "midpoint", "vertex-removal"}))
      ->capture_default_str();
  b->add_option("--energy", build.energy)->check(CLI::IsMember({"lscm", "arap"}))->capture_default_str();

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Poisson solve L x = M f");
  s->add_option("--hierarchy", solve.hierarchy)->required();
  s->add_option("--problem", solve.problem)->check(CLI::IsMember({"poisson"}))->capture_default_str();
  s->add_option("--rhs", solve.rhs, "per-vertex f")->required();
  s->add_option("--report", solve.report, "convergence CSV")->capture_default_str();
  s->add_option("--out", solve.out, "solution CSV")->capture_default_str();
  s->add_option("--dirichlet", solve.dirichlet, "index CSV and value CSV")->expected(2);
  solve.solver.attach(s);

  SmoothArgs smooth;
  auto* sm = app.add_subcommand("smooth", "data smoothing over a sweep of alpha");
  sm->add_option("--hierarchy", smooth.hierarchy)->required();
  sm->add_option("--fn", smooth.fn, "per-vertex input function")->required();
  sm->add_option("--alpha-list", smooth.alphas)->delimiter(',')->capture_default_str();
  sm->add_option("--energy", smooth.energy)->check(CLI::IsMember({"dirichlet", "bilaplacian"}))->capture_default_str();
  sm->add_option("--out-prefix", smooth.out_prefix)->capture_default_str();
  smooth.solver.attach(sm);

  FlowArgs flow;
  auto* fl = app.add_subcommand("flow", "conformalized mean curvature flow");
  fl->add_option("--hierarchy", flow.hierarchy)->required();
  fl->add_option("--steps", flow.steps)->capture_default_str();
  fl->add_option("--delta", flow.delta)->capture_default_str();
  fl->add_option("--out-prefix", flow.out_prefix)->capture_default_str();
  flow.solver.attach(fl);

  BenchArgs bench;
  auto* be = app.add_subcommand("bench", "compare intrinsic multigrid with baselines");
  be->add_option("--hierarchy", bench.hierarchy)->required();
  be->add_option("--problem", bench.problem)->check(CLI::IsMember({"poisson"}))->capture_default_str();
  be->add_option("--baselines", bench.baselines)->delimiter(',')->check(CLI::IsMember({"gs", "onering"}));
  be->add_option("--gs-budget", bench.gs_budget, "relaxation-only cycles as a multiple of multigrid cycles")
      ->capture_default_str();
  be->add_option("--out", bench.out)->capture_default_str();
  bench.solver.attach(be);

  ExportArgs exp;
  auto* ex = app.add_subcommand("export-map", "fine vertex to coarse face map as CSV");
  ex->add_option("--hierarchy", exp.hierarchy)->required();
  ex->add_option("--out", exp.out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*b) return run_build(build);
    if (*s) return run_solve(solve);
    if (*sm) return run_smooth(smooth);
    if (*fl) return run_flow(flow);
    if (*be) return run_bench(bench);
    if (*ex) return run_export(exp);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
  return kUsage;
}
