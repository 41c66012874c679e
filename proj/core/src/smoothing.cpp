#include "surfmg/multigrid.hpp"

#include <chrono>

namespace surfmg {

SmoothingPrecompute smoothing_fast_setup(const std::vector<SparseMatrix>& prolongations, const SparseMatrix& q,
                                         const SparseMatrix& m) {
  auto t0 = std::chrono::steady_clock::now();
  if (q.rows() != m.rows() || q.cols() != m.cols()) throw DimensionError("smoothing setup: Q and M differ in size");
  SmoothingPrecompute pre;
  pre.q = {q};
  pre.m = {m};
  for (const SparseMatrix& p : prolongations) {
    pre.q.push_back(galerkin_triple(p, pre.q.back()));
    pre.m.push_back(galerkin_triple(p, pre.m.back()));
  }
  pre.prolongations = prolongations;
  pre.setup_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return pre;
}

LevelStack smoothing_stack(const SmoothingPrecompute& pre, double alpha, Ordering ordering) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error("smoothing weight alpha must lie in [0, 1)");
  std::vector<SparseMatrix> levels;
  for (std::size_t h = 0; h < pre.q.size(); ++h) levels.push_back(add(pre.q[h], pre.m[h], alpha, 1.0 - alpha));
  return stack_from_levels(std::move(levels), pre.prolongations, ordering);
}

std::pair<Vector, SolveReport> smoothing_solve(const SmoothingPrecompute& pre, double alpha, const Vector& f,
                                               const SolverConfig& config, const Vector& x0) {
  if (f.size() != pre.m.front().rows()) throw DimensionError("smoothing: input function has wrong length");
  LevelStack stack = smoothing_stack(pre, alpha, config.ordering);
  Vector b = (1.0 - alpha) * spmv(pre.m.front(), f);
  return solve(stack, b, x0, config);
}

} // namespace surfmg
