#include "surfmg/multigrid.hpp"

#include <algorithm>

namespace surfmg {

Vector ReducedSystem::scatter(const Vector& xu) const {
  if (xu.size() != static_cast<Eigen::Index>(unknown.size())) throw DimensionError("scatter: wrong reduced length");
  Vector x(n);
  for (std::size_t k = 0; k < unknown.size(); ++k) x[unknown[k]] = xu[static_cast<Eigen::Index>(k)];
  for (std::size_t k = 0; k < known.size(); ++k) x[known[k]] = known_values[static_cast<Eigen::Index>(k)];
  return x;
}

Vector ReducedSystem::gather(const Vector& x) const {
  if (x.size() != n) throw DimensionError("gather: wrong full length");
  Vector xu(static_cast<Eigen::Index>(unknown.size()));
  for (std::size_t k = 0; k < unknown.size(); ++k) xu[static_cast<Eigen::Index>(k)] = x[unknown[k]];
  return xu;
}

ReducedSystem reduce_dirichlet(const SparseMatrix& a, const Vector& b, std::span<const int> known_idx,
                               const Vector& known_vals, const std::vector<SparseMatrix>& prolongations,
                               Ordering ordering) {
  const int n = a.rows();
  if (a.cols() != n || b.size() != n) throw DimensionError("reduce_dirichlet: dimension mismatch");
  if (static_cast<Eigen::Index>(known_idx.size()) != known_vals.size())
    throw DimensionError("reduce_dirichlet: index/value count mismatch");

  ReducedSystem sys;
  sys.n = n;
  std::vector<std::pair<int, double>> kv;
  for (std::size_t k = 0; k < known_idx.size(); ++k) {
    if (known_idx[k] < 0 || known_idx[k] >= n) throw Error("reduce_dirichlet: constraint index out of range");
    kv.emplace_back(known_idx[k], known_vals[static_cast<Eigen::Index>(k)]);
  }
  std::sort(kv.begin(), kv.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t k = 1; k < kv.size(); ++k)
    if (kv[k].first == kv[k - 1].first) throw Error("reduce_dirichlet: duplicate constraint index");
  sys.known_values.resize(static_cast<Eigen::Index>(kv.size()));
  for (std::size_t k = 0; k < kv.size(); ++k) {
    sys.known.push_back(kv[k].first);
    sys.known_values[static_cast<Eigen::Index>(k)] = kv[k].second;
  }
  std::vector<char> is_known(n, 0);
  for (int v : sys.known) is_known[v] = 1;
  for (int v = 0; v < n; ++v)
    if (!is_known[v]) sys.unknown.push_back(v);

  SparseMatrix auu = extract(a, sys.unknown, sys.unknown);
  SparseMatrix auk = extract(a, sys.unknown, sys.known);
  Vector bu(static_cast<Eigen::Index>(sys.unknown.size()));
  for (std::size_t k = 0; k < sys.unknown.size(); ++k) bu[static_cast<Eigen::Index>(k)] = b[sys.unknown[k]];
  sys.b = bu - spmv(auk, sys.known_values);
  if (sys.unknown.empty()) return sys;

  // keep unknown rows, then cascade zero-column removal down the hierarchy
  std::vector<int> rows = sys.unknown;
  for (const SparseMatrix& p : prolongations) {
    std::vector<int> all(p.cols());
    for (int c = 0; c < p.cols(); ++c) all[c] = c;
    SparseMatrix pr = extract(p, rows, all);
    std::vector<double> colmax(p.cols(), 0.0);
    for (int r = 0; r < pr.rows(); ++r) {
      auto idx = pr.row_indices(r);
      auto val = pr.row_values(r);
      for (std::size_t k = 0; k < idx.size(); ++k) colmax[idx[k]] = std::max(colmax[idx[k]], std::abs(val[k]));
    }
    std::vector<int> keep;
    for (int c = 0; c < p.cols(); ++c)
      if (colmax[c] != 0.0) keep.push_back(c);
    if (keep.empty()) break;
    std::vector<int> prow(pr.rows());
    for (int r = 0; r < pr.rows(); ++r) prow[r] = r;
    sys.prolongations.push_back(extract(pr, prow, keep));
    rows = std::move(keep);
  }
  sys.stack = setup(auu, sys.prolongations, ordering);
  return sys;
}

std::pair<Vector, SolveReport> solve_dirichlet(const ReducedSystem& sys, const Vector& x0, const SolverConfig& config) {
  if (sys.unknown.empty()) {
    SolveReport rep;
    rep.residuals = {0.0};
    rep.cumulative_ms = {0.0};
    rep.converged = true;
    return {sys.scatter(Vector()), rep};
  }
  Vector xu0 = x0.size() ? sys.gather(x0) : Vector();
  auto [xu, rep] = solve(sys.stack, sys.b, xu0, config);
  return {sys.scatter(xu), std::move(rep)};
}

} // namespace surfmg
