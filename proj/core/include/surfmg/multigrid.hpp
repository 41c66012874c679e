#pragma once

#include "surfmg/dense.hpp"
#include "surfmg/fem.hpp"
#include "surfmg/relaxation.hpp"
#include "surfmg/selfparam.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>

namespace surfmg {

enum class Relaxation { GaussSeidel, DampedJacobi };

struct SolverConfig {
  int pre_sweeps = 2;
  int post_sweeps = 2;
  double tol = 1e-5;
  int max_cycles = 100;
  Relaxation relaxation = Relaxation::GaussSeidel;
  Ordering ordering = Ordering::Natural;
  double omega = 0.8;
  int threads = 1;

  void validate() const;
};

/// Wall-clock milliseconds per phase.
struct PhaseTimes {
  double setup = 0;
  double relax = 0;
  double transfer = 0;
  double coarse = 0;
  double residual = 0;
  double total = 0;

  double sum() const { return setup + relax + transfer + coarse + residual; }
};

struct SolveReport {
  std::vector<double> residuals; ///< relative residual after each cycle, index 0 = initial guess
  std::vector<double> cumulative_ms;
  int cycles = 0;
  bool converged = false;
  PhaseTimes times;

  /// Geometric mean of per-cycle residual ratios.
  double mean_contraction() const;
};

/// System matrices A_0..A_H with A_{h+1} = P^T A_h P and the coarsest factorization.
class LevelStack {
public:
  LevelStack() = default;

  int levels() const { return static_cast<int>(prolongations_.size()); }
  int size(int h = 0) const { return matrices_[h].rows(); }
  const SparseMatrix& matrix(int h) const { return matrices_[h]; }
  /// P_h for h in 1..H.
  const SparseMatrix& prolongation(int h) const { return prolongations_[h - 1]; }
  /// P_h^T.
  const SparseMatrix& restriction(int h) const { return restrictions_[h - 1]; }
  const std::vector<SparseMatrix>& prolongations() const { return prolongations_; }
  const DenseFactorization& coarse_factorization() const { return coarse_; }
  double setup_ms() const { return setup_ms_; }
  bool colored() const { return !colored_.empty(); }

  void relax(int h, Vector& x, const Vector& b, int sweeps, const SolverConfig& config) const;

  friend LevelStack setup(const SparseMatrix& a, std::vector<SparseMatrix> prolongations, Ordering ordering);
  friend LevelStack stack_from_levels(std::vector<SparseMatrix> matrices, std::vector<SparseMatrix> prolongations,
                                      Ordering ordering);

private:
  void finish(Ordering ordering);

  std::vector<SparseMatrix> matrices_;
  std::vector<SparseMatrix> prolongations_;
  std::vector<SparseMatrix> restrictions_;
  std::vector<ColoredGaussSeidel> colored_;
  DenseFactorization coarse_;
  double setup_ms_ = 0;
};

/// Computes every Galerkin product and factors the coarsest matrix.
LevelStack setup(const SparseMatrix& a, std::vector<SparseMatrix> prolongations,
                 Ordering ordering = Ordering::Natural);
LevelStack setup(const SparseMatrix& a, const Hierarchy& hierarchy, Ordering ordering = Ordering::Natural);

/// Builds a stack from already-coarsened matrices (no triple products).
LevelStack stack_from_levels(std::vector<SparseMatrix> matrices, std::vector<SparseMatrix> prolongations,
                             Ordering ordering = Ordering::Natural);

/// One V-cycle at level h, in place. At the coarsest level this is the direct solve.
void vcycle(const LevelStack& stack, Vector& x, const Vector& b, int h, const SolverConfig& config,
            PhaseTimes* times = nullptr);

/// Repeats V-cycles until ||b - A x|| / ||b|| <= tol or max_cycles. A
/// non-converged run returns the iterate with the smallest residual.
std::pair<Vector, SolveReport> solve(const LevelStack& stack, const Vector& b, const Vector& x0,
                                     const SolverConfig& config);

/// Plain relaxation with (pre + post) sweeps per "cycle", for comparison.
std::pair<Vector, SolveReport> relaxation_only(const SparseMatrix& a, const Vector& b, const Vector& x0,
                                               const SolverConfig& config);

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b);

/// CSV with header `cycle,residual,cumulative_ms`.
void write_report_csv(std::ostream& out, const SolveReport& report);
void write_report_csv(const std::filesystem::path& path, const SolveReport& report);

/// System with Dirichlet-known values eliminated.
struct ReducedSystem {
  int n = 0;
  std::vector<int> unknown;
  std::vector<int> known;
  Vector known_values;
  Vector b; ///< b_u - A_uk x_k
  LevelStack stack;
  std::vector<SparseMatrix> prolongations; ///< restricted and column-pruned

  /// Full-length vector with known values re-inserted.
  Vector scatter(const Vector& xu) const;
  Vector gather(const Vector& x) const;
};

/// Keeps the unknown rows of P_1, drops columns of each P that became
/// identically zero together with the matching rows of the next P, then
/// runs setup on A_uu. Throws Error for repeated or out-of-range indices.
ReducedSystem reduce_dirichlet(const SparseMatrix& a, const Vector& b, std::span<const int> known_idx,
                               const Vector& known_vals, const std::vector<SparseMatrix>& prolongations,
                               Ordering ordering = Ordering::Natural);

/// Solves the reduced system and scatters; x0 is a full-length guess (may be empty).
std::pair<Vector, SolveReport> solve_dirichlet(const ReducedSystem& sys, const Vector& x0, const SolverConfig& config);

/// Per-level Q_h and M_h for fast alpha sweeps.
struct SmoothingPrecompute {
  std::vector<SparseMatrix> q;
  std::vector<SparseMatrix> m;
  std::vector<SparseMatrix> prolongations;
  double setup_ms = 0;
};

SmoothingPrecompute smoothing_fast_setup(const std::vector<SparseMatrix>& prolongations, const SparseMatrix& q,
                                         const SparseMatrix& m);

/// Per-level alpha Q_h + (1 - alpha) M_h by sparse addition only.
LevelStack smoothing_stack(const SmoothingPrecompute& pre, double alpha, Ordering ordering = Ordering::Natural);

/// Solves (alpha Q + (1 - alpha) M) x = (1 - alpha) M f.
std::pair<Vector, SolveReport> smoothing_solve(const SmoothingPrecompute& pre, double alpha, const Vector& f,
                                               const SolverConfig& config, const Vector& x0 = Vector());

/// A MultiSolve for mcf_step that re-runs setup on each new matrix and warm
/// starts every column from the matching column of `guess`.
MultiSolve multigrid_multisolve(std::vector<SparseMatrix> prolongations, SolverConfig config,
                                const Positions* guess = nullptr, std::vector<SolveReport>* reports = nullptr);

} // namespace surfmg
