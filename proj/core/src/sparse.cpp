#include "surfmg/sparse.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>

namespace surfmg {

namespace {

std::atomic<std::uint64_t> g_triple_count{0};

void require(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

} // namespace

SparseMatrix::SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), offsets_(rows + 1, 0) {}

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> offsets, std::vector<int> indices,
                           std::vector<double> values)
    : rows_(rows), cols_(cols), offsets_(std::move(offsets)), indices_(std::move(indices)),
      values_(std::move(values)) {
  require(static_cast<int>(offsets_.size()) == rows_ + 1, "CSR offsets size mismatch");
  require(offsets_.front() == 0 && offsets_.back() == static_cast<int>(indices_.size()),
          "CSR offsets inconsistent with index array");
  require(indices_.size() == values_.size(), "CSR index/value size mismatch");
  for (int i = 0; i < rows_; ++i) {
    require(offsets_[i] <= offsets_[i + 1], "CSR offsets not monotone");
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      require(indices_[k] >= 0 && indices_[k] < cols_, "CSR column index out of range");
      require(k == offsets_[i] || indices_[k - 1] < indices_[k], "CSR columns not strictly increasing");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::span<const Triplet> triplets) {
  std::vector<int> count(rows + 1, 0);
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw DimensionError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                           ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    ++count[t.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<std::pair<int, double>> bucket(triplets.size());
  std::vector<int> fill(count.begin(), count.end() - 1);
  for (const Triplet& t : triplets) bucket[fill[t.row]++] = {t.col, t.value};

  std::vector<int> offsets(rows + 1, 0), indices;
  std::vector<double> values;
  indices.reserve(triplets.size());
  values.reserve(triplets.size());
  for (int i = 0; i < rows; ++i) {
    auto first = bucket.begin() + count[i], last = bucket.begin() + count[i + 1];
    std::stable_sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = first; it != last;) {
      int col = it->first;
      double sum = 0;
      for (; it != last && it->first == col; ++it) sum += it->second;
      if (sum != 0.0) {
        indices.push_back(col);
        values.push_back(sum);
      }
    }
    offsets[i + 1] = static_cast<int>(indices.size());
  }
  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.offsets_ = std::move(offsets);
  m.indices_ = std::move(indices);
  m.values_ = std::move(values);
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<int> offsets(n + 1), indices(n);
  std::iota(offsets.begin(), offsets.end(), 0);
  std::iota(indices.begin(), indices.end(), 0);
  return SparseMatrix(n, n, std::move(offsets), std::move(indices), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::diagonal(const Vector& d) {
  std::vector<Triplet> t;
  for (int i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
  return from_triplets(static_cast<int>(d.size()), static_cast<int>(d.size()), t);
}

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXd& dense) {
  std::vector<Triplet> t;
  for (int i = 0; i < dense.rows(); ++i)
    for (int j = 0; j < dense.cols(); ++j)
      if (dense(i, j) != 0.0) t.push_back({i, j, dense(i, j)});
  return from_triplets(static_cast<int>(dense.rows()), static_cast<int>(dense.cols()), t);
}

double SparseMatrix::coeff(int i, int j) const {
  auto idx = row_indices(i);
  auto it = std::lower_bound(idx.begin(), idx.end(), j);
  if (it == idx.end() || *it != j) return 0.0;
  return values_[offsets_[i] + (it - idx.begin())];
}

Vector SparseMatrix::diagonal() const {
  Vector d = Vector::Zero(std::min(rows_, cols_));
  for (int i = 0; i < d.size(); ++i) d[i] = coeff(i, i);
  return d;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k) d(i, indices_[k]) = values_[k];
  return d;
}

bool SparseMatrix::is_symmetric(double rel_tol) const {
  if (rows_ != cols_) return false;
  for (int i = 0; i < rows_; ++i)
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      double a = values_[k], b = coeff(indices_[k], i);
      if (std::abs(a - b) > rel_tol * std::max(std::abs(a), std::abs(b))) return false;
    }
  return true;
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && offsets_ == other.offsets_ &&
         indices_ == other.indices_;
}

void spmv(const SparseMatrix& a, const Vector& x, Vector& y) {
  require(x.size() == a.cols(), "spmv: dimension mismatch");
  y.resize(a.rows());
  auto off = a.offsets();
  auto idx = a.indices();
  auto val = a.values();
  for (int i = 0; i < a.rows(); ++i) {
    double s = 0;
    for (int k = off[i]; k < off[i + 1]; ++k) s += val[k] * x[idx[k]];
    y[i] = s;
  }
}

Vector spmv(const SparseMatrix& a, const Vector& x) {
  Vector y;
  spmv(a, x, y);
  return y;
}

void residual(const SparseMatrix& a, const Vector& x, const Vector& b, Vector& r) {
  require(x.size() == a.cols() && b.size() == a.rows(), "residual: dimension mismatch");
  r.resize(a.rows());
  auto off = a.offsets();
  auto idx = a.indices();
  auto val = a.values();
  for (int i = 0; i < a.rows(); ++i) {
    double s = b[i];
    for (int k = off[i]; k < off[i + 1]; ++k) s -= val[k] * x[idx[k]];
    r[i] = s;
  }
}

SparseMatrix transpose(const SparseMatrix& a) {
  std::vector<int> offsets(a.cols() + 1, 0);
  for (int j : a.indices()) ++offsets[j + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<int> fill(offsets.begin(), offsets.end() - 1);
  std::vector<int> indices(a.nnz());
  std::vector<double> values(a.nnz());
  for (int i = 0; i < a.rows(); ++i) {
    auto idx = a.row_indices(i);
    auto val = a.row_values(i);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      int pos = fill[idx[k]]++;
      indices[pos] = i;
      values[pos] = val[k];
    }
  }
  return SparseMatrix(a.cols(), a.rows(), std::move(offsets), std::move(indices), std::move(values));
}

SparseMatrix scale(const SparseMatrix& a, double s) {
  if (s == 0.0) return SparseMatrix(a.rows(), a.cols());
  std::vector<double> values(a.values().begin(), a.values().end());
  for (double& v : values) v *= s;
  return SparseMatrix(a.rows(), a.cols(), {a.offsets().begin(), a.offsets().end()},
                      {a.indices().begin(), a.indices().end()}, std::move(values));
}

SparseMatrix scale_rows(const SparseMatrix& a, const Vector& d) {
  require(d.size() == a.rows(), "scale_rows: dimension mismatch");
  std::vector<Triplet> t;
  t.reserve(a.nnz());
  for (int i = 0; i < a.rows(); ++i) {
    auto idx = a.row_indices(i);
    auto val = a.row_values(i);
    for (std::size_t k = 0; k < idx.size(); ++k) t.push_back({i, idx[k], d[i] * val[k]});
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), t);
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add: dimension mismatch");
  std::vector<int> offsets(a.rows() + 1, 0), indices;
  std::vector<double> values;
  indices.reserve(a.nnz() + b.nnz());
  values.reserve(a.nnz() + b.nnz());
  for (int i = 0; i < a.rows(); ++i) {
    auto ai = a.row_indices(i), bi = b.row_indices(i);
    auto av = a.row_values(i), bv = b.row_values(i);
    std::size_t p = 0, q = 0;
    while (p < ai.size() || q < bi.size()) {
      int col;
      double v;
      if (q == bi.size() || (p < ai.size() && ai[p] < bi[q])) {
        col = ai[p];
        v = alpha * av[p++];
      } else if (p == ai.size() || bi[q] < ai[p]) {
        col = bi[q];
        v = beta * bv[q++];
      } else {
        col = ai[p];
        v = alpha * av[p++] + beta * bv[q++];
      }
      if (v != 0.0) {
        indices.push_back(col);
        values.push_back(v);
      }
    }
    offsets[i + 1] = static_cast<int>(indices.size());
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(offsets), std::move(indices), std::move(values));
}

SparseMatrix prune(const SparseMatrix& a, double tol) {
  std::vector<int> offsets(a.rows() + 1, 0), indices;
  std::vector<double> values;
  for (int i = 0; i < a.rows(); ++i) {
    auto idx = a.row_indices(i);
    auto val = a.row_values(i);
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (std::abs(val[k]) > tol) {
        indices.push_back(idx[k]);
        values.push_back(val[k]);
      }
    offsets[i + 1] = static_cast<int>(indices.size());
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(offsets), std::move(indices), std::move(values));
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  require(a.cols() == b.rows(), "multiply: dimension mismatch");
  std::vector<double> acc(b.cols(), 0.0);
  std::vector<int> marker(b.cols(), -1);
  std::vector<int> touched;
  std::vector<int> offsets(a.rows() + 1, 0), indices;
  std::vector<double> values;
  indices.reserve(a.nnz() + b.nnz());
  values.reserve(a.nnz() + b.nnz());
  for (int i = 0; i < a.rows(); ++i) {
    touched.clear();
    auto ai = a.row_indices(i);
    auto av = a.row_values(i);
    for (std::size_t p = 0; p < ai.size(); ++p) {
      auto bi = b.row_indices(ai[p]);
      auto bv = b.row_values(ai[p]);
      for (std::size_t q = 0; q < bi.size(); ++q) {
        int j = bi[q];
        if (marker[j] != i) {
          marker[j] = i;
          acc[j] = av[p] * bv[q];
          touched.push_back(j);
        } else {
          acc[j] += av[p] * bv[q];
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    for (int j : touched)
      if (acc[j] != 0.0) {
        indices.push_back(j);
        values.push_back(acc[j]);
      }
    offsets[i + 1] = static_cast<int>(indices.size());
  }
  return SparseMatrix(a.rows(), b.cols(), std::move(offsets), std::move(indices), std::move(values));
}

SparseMatrix galerkin_triple(const SparseMatrix& p, const SparseMatrix& a) {
  require(a.rows() == a.cols(), "galerkin_triple: A must be square");
  require(p.rows() == a.rows(), "galerkin_triple: P rows must match A");
  ++g_triple_count;
  SparseMatrix c = multiply(multiply(transpose(p), a), p);

  auto off = c.offsets();
  auto idx = c.indices();
  auto val = c.mutable_values();
  for (int i = 0; i < c.rows(); ++i)
    for (int k = off[i]; k < off[i + 1]; ++k) {
      int j = idx[k];
      if (j <= i) continue;
      auto row = c.row_indices(j);
      auto it = std::lower_bound(row.begin(), row.end(), i);
      if (it == row.end() || *it != i) continue;
      double& lo = val[off[j] + (it - row.begin())];
      double& up = val[k];
      if (lo == up) continue;
      if (std::abs(lo - up) <= 1e-12 * std::max(std::abs(lo), std::abs(up))) {
        double avg = 0.5 * (lo + up);
        lo = avg;
        up = avg;
      }
    }
  return c;
}

std::uint64_t galerkin_triple_count() { return g_triple_count.load(); }

SparseMatrix extract(const SparseMatrix& a, std::span<const int> rows, std::span<const int> cols) {
  std::vector<int> col_map(a.cols(), -1);
  for (std::size_t k = 0; k < cols.size(); ++k) col_map[cols[k]] = static_cast<int>(k);
  std::vector<int> offsets(rows.size() + 1, 0), indices;
  std::vector<double> values;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto idx = a.row_indices(rows[r]);
    auto val = a.row_values(rows[r]);
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (col_map[idx[k]] >= 0) {
        indices.push_back(col_map[idx[k]]);
        values.push_back(val[k]);
      }
    offsets[r + 1] = static_cast<int>(indices.size());
  }
  return SparseMatrix(static_cast<int>(rows.size()), static_cast<int>(cols.size()), std::move(offsets),
                      std::move(indices), std::move(values));
}

SparseMatrix symmetric_permute(const SparseMatrix& a, std::span<const int> order) {
  require(a.rows() == a.cols() && static_cast<int>(order.size()) == a.rows(), "symmetric_permute: bad size");
  std::vector<int> inverse(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) inverse[order[k]] = static_cast<int>(k);
  std::vector<int> offsets(a.rows() + 1, 0), indices;
  std::vector<double> values;
  indices.reserve(a.nnz());
  values.reserve(a.nnz());
  std::vector<std::pair<int, double>> row;
  for (int r = 0; r < a.rows(); ++r) {
    row.clear();
    auto idx = a.row_indices(order[r]);
    auto val = a.row_values(order[r]);
    for (std::size_t k = 0; k < idx.size(); ++k) row.emplace_back(inverse[idx[k]], val[k]);
    std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (auto [c, v] : row) {
      indices.push_back(c);
      values.push_back(v);
    }
    offsets[r + 1] = static_cast<int>(indices.size());
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(offsets), std::move(indices), std::move(values));
}

} // namespace surfmg
