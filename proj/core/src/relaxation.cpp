#include "surfmg/relaxation.hpp"

#include <string>
#include <thread>

namespace surfmg {

namespace {

void check_dims(const SparseMatrix& a, const Vector& x, const Vector& b) {
  if (a.rows() != a.cols() || x.size() != a.rows() || b.size() != a.rows())
    throw DimensionError("relaxation: dimension mismatch");
}

[[noreturn]] void zero_diagonal(int row) {
  throw NumericalError("Gauss-Seidel: zero diagonal entry in row " + std::to_string(row), row);
}

inline void gs_row(std::span<const int> off, std::span<const int> idx, std::span<const double> val,
                   double* x, const double* b, int i) {
  double s = b[i];
  double diag = 0;
  for (int k = off[i]; k < off[i + 1]; ++k) {
    int j = idx[k];
    if (j == i)
      diag = val[k];
    else
      s -= val[k] * x[j];
  }
  if (diag == 0.0) zero_diagonal(i);
  x[i] = s / diag;
}

void gs_range(const SparseMatrix& a, double* x, const double* b, int begin, int end) {
  auto off = a.offsets();
  auto idx = a.indices();
  auto val = a.values();
  for (int i = begin; i < end; ++i) gs_row(off, idx, val, x, b, i);
}

} // namespace

void gauss_seidel(const SparseMatrix& a, Vector& x, const Vector& b, int sweeps) {
  check_dims(a, x, b);
  for (int s = 0; s < sweeps; ++s) gs_range(a, x.data(), b.data(), 0, a.rows());
}

Vector gauss_seidel(const SparseMatrix& a, Vector x, const Vector& b, int sweeps, Ordering ordering) {
  if (ordering == Ordering::Natural) {
    gauss_seidel(a, x, b, sweeps);
    return x;
  }
  ColoredGaussSeidel(a).relax(x, b, sweeps);
  return x;
}

ColoredGaussSeidel::ColoredGaussSeidel(const SparseMatrix& a) : ColoredGaussSeidel(a, greedy_color(a)) {}

ColoredGaussSeidel::ColoredGaussSeidel(const SparseMatrix& a, Coloring coloring)
    : coloring_(std::move(coloring)), permuted_(symmetric_permute(a, coloring_.order)) {
  for (int i = 0; i < permuted_.rows(); ++i)
    if (permuted_.coeff(i, i) == 0.0) zero_diagonal(coloring_.order[i]);
}

void ColoredGaussSeidel::relax(Vector& x, const Vector& b, int sweeps, int threads) const {
  check_dims(permuted_, x, b);
  const int n = permuted_.rows();
  const auto& order = coloring_.order;
  Vector px(n), pb(n);
  for (int k = 0; k < n; ++k) {
    px[k] = x[order[k]];
    pb[k] = b[order[k]];
  }
  for (int s = 0; s < sweeps; ++s)
    for (int c = 0; c < coloring_.count; ++c) {
      const int begin = coloring_.color_offsets[c], end = coloring_.color_offsets[c + 1];
      const int chunks = std::min(threads, (end - begin) / 256);
      if (chunks <= 1) {
        gs_range(permuted_, px.data(), pb.data(), begin, end);
        continue;
      }
      std::vector<std::jthread> pool;
      const int step = (end - begin + chunks - 1) / chunks;
      for (int t = 0; t < chunks; ++t) {
        const int lo = begin + t * step, hi = std::min(end, lo + step);
        pool.emplace_back([&, lo, hi] { gs_range(permuted_, px.data(), pb.data(), lo, hi); });
      }
    }
  for (int k = 0; k < n; ++k) x[order[k]] = px[k];
}

void damped_jacobi(const SparseMatrix& a, Vector& x, const Vector& b, int sweeps, double omega) {
  check_dims(a, x, b);
  const Vector d = a.diagonal();
  for (int i = 0; i < d.size(); ++i)
    if (d[i] == 0.0) zero_diagonal(i);
  Vector r;
  for (int s = 0; s < sweeps; ++s) {
    residual(a, x, b, r);
    x.array() += omega * r.array() / d.array();
  }
}

} // namespace surfmg
