#include "surfmg/dense.hpp"

#include <cmath>

namespace surfmg {

DenseFactorization::DenseFactorization(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("dense_factor: matrix must be square");
  factor(a.to_dense());
}

DenseFactorization::DenseFactorization(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DimensionError("dense_factor: matrix must be square");
  factor(a);
}

void DenseFactorization::factor(const Eigen::MatrixXd& a) {
  size_ = static_cast<int>(a.rows());
  if (size_ == 0) return;
  llt_.compute(a);
  if (llt_.info() == Eigen::Success) return;

  fallback_ = true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  if (eig.info() != Eigen::Success) throw NumericalError("dense_factor: eigendecomposition failed");
  const Vector& lambda = eig.eigenvalues();
  const double top = lambda.cwiseAbs().maxCoeff();
  const double tol = 1e-12 * top * size_;
  basis_ = eig.eigenvectors();
  inverse_values_ = Vector::Zero(size_);
  for (Eigen::Index i = 0; i < size_; ++i) {
    if (std::abs(lambda[i]) <= tol) singular_ = true;
    else if (lambda[i] < 0) indefinite_ = true;
    else inverse_values_[i] = 1.0 / lambda[i];
  }
}

Vector DenseFactorization::solve(const Vector& b) const {
  if (b.size() != size_) throw DimensionError("dense_solve: dimension mismatch");
  if (size_ == 0) return Vector();
  if (!fallback_) return llt_.solve(b);
  return basis_ * inverse_values_.cwiseProduct(basis_.transpose() * b);
}

} // namespace surfmg
