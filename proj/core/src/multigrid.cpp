#include "surfmg/multigrid.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>

namespace surfmg {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Adds the elapsed time to `slot` when it goes out of scope.
class Stopwatch {
public:
  explicit Stopwatch(double* slot) : slot_(slot), t0_(Clock::now()) {}
  ~Stopwatch() {
    if (slot_) *slot_ += ms_since(t0_);
  }
  Stopwatch(const Stopwatch&) = delete;
  Stopwatch& operator=(const Stopwatch&) = delete;

private:
  double* slot_;
  Clock::time_point t0_;
};

} // namespace

void SolverConfig::validate() const {
  if (pre_sweeps < 0 || post_sweeps < 0) throw Error("relaxation sweep counts must be non-negative");
  if (!(tol > 0)) throw Error("tolerance must be positive");
  if (max_cycles < 0) throw Error("max_cycles must be non-negative");
  if (relaxation == Relaxation::DampedJacobi && !(omega > 0 && omega <= 1)) throw Error("Jacobi damping must lie in (0, 1]");
  if (threads < 1) throw Error("thread count must be positive");
}

double SolveReport::mean_contraction() const {
  if (cycles == 0 || residuals.front() == 0.0) return 0.0;
  return std::pow(residuals[cycles] / residuals.front(), 1.0 / cycles);
}

void LevelStack::finish(Ordering ordering) {
  for (const SparseMatrix& p : prolongations_) restrictions_.push_back(transpose(p));
  if (ordering == Ordering::Colored)
    for (int h = 0; h < levels(); ++h) colored_.emplace_back(matrices_[h]);
  coarse_ = DenseFactorization(matrices_.back());
  if (coarse_.indefinite()) throw NumericalError("coarsest system is indefinite");
}

void LevelStack::relax(int h, Vector& x, const Vector& b, int sweeps, const SolverConfig& config) const {
  if (sweeps <= 0) return;
  if (config.relaxation == Relaxation::DampedJacobi) {
    damped_jacobi(matrices_[h], x, b, sweeps, config.omega);
  } else if (config.ordering == Ordering::Colored && !colored_.empty()) {
    colored_[h].relax(x, b, sweeps, config.threads);
  } else if (config.ordering == Ordering::Colored) {
    ColoredGaussSeidel(matrices_[h]).relax(x, b, sweeps, config.threads);
  } else {
    gauss_seidel(matrices_[h], x, b, sweeps);
  }
}

LevelStack setup(const SparseMatrix& a, std::vector<SparseMatrix> prolongations, Ordering ordering) {
  auto t0 = Clock::now();
  if (a.rows() != a.cols()) throw DimensionError("setup: system matrix must be square");
  LevelStack s;
  s.matrices_.push_back(a);
  for (const SparseMatrix& p : prolongations) {
    if (p.rows() != s.matrices_.back().rows()) throw DimensionError("setup: prolongation does not match level size");
    s.matrices_.push_back(galerkin_triple(p, s.matrices_.back()));
  }
  s.prolongations_ = std::move(prolongations);
  s.finish(ordering);
  s.setup_ms_ = ms_since(t0);
  return s;
}

LevelStack setup(const SparseMatrix& a, const Hierarchy& hierarchy, Ordering ordering) {
  if (a.rows() != hierarchy.fine.num_vertices()) throw DimensionError("setup: matrix size differs from hierarchy");
  return setup(a, hierarchy.prolongations, ordering);
}

LevelStack stack_from_levels(std::vector<SparseMatrix> matrices, std::vector<SparseMatrix> prolongations,
                             Ordering ordering) {
  auto t0 = Clock::now();
  if (matrices.size() != prolongations.size() + 1) throw DimensionError("one matrix per level expected");
  LevelStack s;
  s.matrices_ = std::move(matrices);
  s.prolongations_ = std::move(prolongations);
  s.finish(ordering);
  s.setup_ms_ = ms_since(t0);
  return s;
}

void vcycle(const LevelStack& stack, Vector& x, const Vector& b, int h, const SolverConfig& config,
            PhaseTimes* times) {
  if (x.size() != stack.size(h) || b.size() != stack.size(h)) throw DimensionError("vcycle: dimension mismatch");
  if (h == stack.levels()) {
    Stopwatch sw(times ? &times->coarse : nullptr);
    x = stack.coarse_factorization().solve(b);
    return;
  }
  {
    Stopwatch sw(times ? &times->relax : nullptr);
    stack.relax(h, x, b, config.pre_sweeps, config);
  }
  Vector rc, ec;
  {
    Stopwatch sw(times ? &times->transfer : nullptr);
    Vector r;
    residual(stack.matrix(h), x, b, r);
    rc = spmv(stack.restriction(h + 1), r);
    ec = Vector::Zero(stack.size(h + 1));
  }
  vcycle(stack, ec, rc, h + 1, config, times);
  {
    Stopwatch sw(times ? &times->transfer : nullptr);
    x += spmv(stack.prolongation(h + 1), ec);
  }
  {
    Stopwatch sw(times ? &times->relax : nullptr);
    stack.relax(h, x, b, config.post_sweeps, config);
  }
}

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b) {
  Vector r;
  residual(a, x, b, r);
  double bn = b.norm();
  return bn > 0 ? r.norm() / bn : r.norm();
}

namespace {

template <class Step>
std::pair<Vector, SolveReport> iterate(const SparseMatrix& a, const Vector& b, const Vector& x0,
                                       const SolverConfig& config, double setup_ms, Step step) {
  config.validate();
  if (b.size() != a.rows()) throw DimensionError("solve: right-hand side has wrong length");
  if (x0.size() != 0 && x0.size() != a.rows()) throw DimensionError("solve: initial guess has wrong length");
  auto t0 = Clock::now();
  SolveReport rep;
  rep.times.setup = setup_ms;
  Vector x = x0.size() ? x0 : Vector::Zero(a.rows());
  auto measure = [&] {
    Stopwatch sw(&rep.times.residual);
    return relative_residual(a, x, b);
  };
  double res = measure();
  rep.residuals.push_back(res);
  rep.cumulative_ms.push_back(setup_ms + ms_since(t0));
  Vector best = x;
  double best_res = res;
  while (!(res <= config.tol) && rep.cycles < config.max_cycles) {
    step(x, rep.times);
    ++rep.cycles;
    res = measure();
    rep.residuals.push_back(res);
    rep.cumulative_ms.push_back(setup_ms + ms_since(t0));
    if (res < best_res) {
      best_res = res;
      best = x;
    }
  }
  rep.converged = res <= config.tol;
  rep.times.total = setup_ms + ms_since(t0);
  if (!rep.converged) x = std::move(best);
  return {std::move(x), std::move(rep)};
}

} // namespace

std::pair<Vector, SolveReport> solve(const LevelStack& stack, const Vector& b, const Vector& x0,
                                     const SolverConfig& config) {
  return iterate(stack.matrix(0), b, x0, config, stack.setup_ms(),
                 [&](Vector& x, PhaseTimes& t) { vcycle(stack, x, b, 0, config, &t); });
}

std::pair<Vector, SolveReport> relaxation_only(const SparseMatrix& a, const Vector& b, const Vector& x0,
                                               const SolverConfig& config) {
  const int sweeps = std::max(1, config.pre_sweeps + config.post_sweeps);
  std::optional<ColoredGaussSeidel> colored;
  if (config.relaxation == Relaxation::GaussSeidel && config.ordering == Ordering::Colored) colored.emplace(a);
  return iterate(a, b, x0, config, 0.0, [&](Vector& x, PhaseTimes& t) {
    Stopwatch sw(&t.relax);
    if (config.relaxation == Relaxation::DampedJacobi)
      damped_jacobi(a, x, b, sweeps, config.omega);
    else if (colored)
      colored->relax(x, b, sweeps, config.threads);
    else
      gauss_seidel(a, x, b, sweeps);
  });
}

void write_report_csv(std::ostream& out, const SolveReport& report) {
  out << "cycle,residual,cumulative_ms\n" << std::setprecision(17);
  for (std::size_t c = 0; c < report.residuals.size(); ++c)
    out << c << ',' << report.residuals[c] << ',' << report.cumulative_ms[c] << '\n';
}

void write_report_csv(const std::filesystem::path& path, const SolveReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_report_csv(out, report);
}

MultiSolve multigrid_multisolve(std::vector<SparseMatrix> prolongations, SolverConfig config, const Positions* guess,
                                std::vector<SolveReport>* reports) {
  return [prolongations = std::move(prolongations), config, guess, reports](const SparseMatrix& a,
                                                                           const Positions& rhs) {
    LevelStack stack = setup(a, prolongations, config.ordering);
    Positions out(rhs.rows(), rhs.cols());
    for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
      Vector x0 = guess ? Vector(guess->col(c)) : Vector();
      auto [x, rep] = solve(stack, rhs.col(c), x0, config);
      out.col(c) = x;
      if (reports) reports->push_back(std::move(rep));
    }
    return out;
  };
}

} // namespace surfmg
