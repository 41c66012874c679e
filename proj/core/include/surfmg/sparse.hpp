#pragma once

#include "surfmg/common.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace surfmg {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row and no explicit
/// zeros are stored; every constructor and kernel below maintains that.
class SparseMatrix {
public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols);
  SparseMatrix(int rows, int cols, std::vector<int> offsets, std::vector<int> indices,
               std::vector<double> values);

  /// Duplicates are summed; entries that sum to exactly zero are dropped.
  static SparseMatrix from_triplets(int rows, int cols, std::span<const Triplet> triplets);
  static SparseMatrix identity(int n);
  static SparseMatrix diagonal(const Vector& d);
  static SparseMatrix from_dense(const Eigen::MatrixXd& dense);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(values_.size()); }

  std::span<const int> offsets() const { return offsets_; }
  std::span<const int> indices() const { return indices_; }
  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }

  std::span<const int> row_indices(int i) const {
    return {indices_.data() + offsets_[i], static_cast<std::size_t>(offsets_[i + 1] - offsets_[i])};
  }
  std::span<const double> row_values(int i) const {
    return {values_.data() + offsets_[i], static_cast<std::size_t>(offsets_[i + 1] - offsets_[i])};
  }

  /// Zero when not stored.
  double coeff(int i, int j) const;
  Vector diagonal() const;
  Eigen::MatrixXd to_dense() const;

  bool is_symmetric(double rel_tol = 0.0) const;
  bool same_pattern(const SparseMatrix& other) const;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> offsets_{0};
  std::vector<int> indices_;
  std::vector<double> values_;
};

Vector spmv(const SparseMatrix& a, const Vector& x);
/// y = A x without allocating.
void spmv(const SparseMatrix& a, const Vector& x, Vector& y);
/// r = b - A x without allocating.
void residual(const SparseMatrix& a, const Vector& x, const Vector& b, Vector& r);

SparseMatrix transpose(const SparseMatrix& a);
SparseMatrix scale(const SparseMatrix& a, double s);
/// alpha * A + beta * B.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0, double beta = 1.0);
/// Drops entries with |v| <= tol.
SparseMatrix prune(const SparseMatrix& a, double tol);
/// Row-wise sparse-accumulator product A * B.
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
/// diag(d) * A.
SparseMatrix scale_rows(const SparseMatrix& a, const Vector& d);

/// Galerkin coarse operator P^T A P, computed as (P^T A) P. Pairs (i,j)/(j,i)
/// that differ by at most 1e-12 relative are replaced by their average so a
/// symmetric A yields an exactly symmetric result.
SparseMatrix galerkin_triple(const SparseMatrix& p, const SparseMatrix& a);

/// Number of galerkin_triple calls made by this process.
std::uint64_t galerkin_triple_count();

/// A(rows, cols) with the given index lists (each strictly increasing).
SparseMatrix extract(const SparseMatrix& a, std::span<const int> rows, std::span<const int> cols);

/// B = Pi A Pi^T where `order[new] = old`.
SparseMatrix symmetric_permute(const SparseMatrix& a, std::span<const int> order);

} // namespace surfmg
