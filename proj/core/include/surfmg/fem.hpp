#pragma once

#include "surfmg/mesh.hpp"
#include "surfmg/sparse.hpp"

#include <functional>
#include <optional>

namespace surfmg {

enum class Energy { Dirichlet, Bilaplacian };

struct DirichletConstraints {
  std::vector<int> indices;
  Vector values;
};

/// Data-smoothing problem: minimize alpha * E_s(x) + (1 - alpha) * ||x - f||^2_M.
struct ProblemSpec {
  Energy energy = Energy::Dirichlet;
  double alpha = 0.5;
  Vector f;
  std::optional<DirichletConstraints> constraints;

  /// Throws Error when alpha is outside [0, 1), sizes disagree, or
  /// constraint indices repeat or fall outside [0, n).
  void validate(int n) const;
};

struct LinearSystem {
  SparseMatrix a;
  Vector b;
};

/// Cotangent Laplacian, positive semi-definite sign convention:
/// L_ij = -(cot a_ij + cot b_ij) / 2, L_ii = -sum_j L_ij.
SparseMatrix cotan_laplacian(const SurfaceMesh& mesh);
SparseMatrix cotan_laplacian(const std::vector<Vec3>& positions, const std::vector<Face>& faces);

/// Barycentric lumped mass: M_ii = (1/3) * sum of incident face areas.
SparseMatrix lumped_mass(const SurfaceMesh& mesh);
SparseMatrix lumped_mass(const std::vector<Vec3>& positions, const std::vector<Face>& faces);

/// Mixed-FEM Bilaplacian L^T M^{-1} L with lumped M.
SparseMatrix bilaplacian(const SurfaceMesh& mesh);
SparseMatrix bilaplacian(const SparseMatrix& laplacian, const SparseMatrix& mass);

/// A = alpha Q + (1 - alpha) M, b = (1 - alpha) M f. Constraints in `spec`
/// are not applied here; see reduce_dirichlet.
LinearSystem assemble_smoothing(const SurfaceMesh& mesh, const ProblemSpec& spec);

/// Quadratic energy 1/2 x^T A x - x^T b.
double quadratic_energy(const SparseMatrix& a, const Vector& b, const Vector& x);

using Positions = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// Solves A X = B column by column.
using MultiSolve = std::function<Positions(const SparseMatrix& a, const Positions& rhs)>;

/// One implicit conformalized mean-curvature-flow step:
/// (M_t + delta L_0) X = M_t X_t, with M_t rebuilt from the current positions.
Positions mcf_step(const std::vector<Face>& faces, const SparseMatrix& l0, const Positions& positions, double delta,
                   const MultiSolve& solve);

Positions positions_of(const SurfaceMesh& mesh);
std::vector<Vec3> to_points(const Positions& x);

/// Least-squares sphere fit; returns RMS radial deviation relative to the fitted radius.
double sphericity_error(const Positions& x);

} // namespace surfmg
