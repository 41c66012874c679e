#pragma once

#include "surfmg/sparse.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace surfmg {

/// Dense factorization for the coarsest multigrid level.
///
/// Tries Cholesky first; on failure it falls back to a symmetric
/// eigendecomposition and solves with the pseudo-inverse, which gives the
/// minimum-norm solution of semi-definite systems.
class DenseFactorization {
public:
  DenseFactorization() = default;
  explicit DenseFactorization(const SparseMatrix& a);
  explicit DenseFactorization(const Eigen::MatrixXd& a);

  Vector solve(const Vector& b) const;

  int size() const { return size_; }
  bool used_fallback() const { return fallback_; }
  /// An eigenvalue vanished relative to the largest one (semi-definite or singular).
  bool singular() const { return singular_; }
  /// An eigenvalue was clearly negative.
  bool indefinite() const { return indefinite_; }

private:
  void factor(const Eigen::MatrixXd& a);

  int size_ = 0;
  bool fallback_ = false;
  bool singular_ = false;
  bool indefinite_ = false;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  // pseudo-inverse factors for the semi-definite fallback
  Eigen::MatrixXd basis_;
  Vector inverse_values_;
};

} // namespace surfmg
