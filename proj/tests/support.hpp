#pragma once

#include "surfmg/decimate.hpp"
#include "surfmg/fem.hpp"
#include "surfmg/multigrid.hpp"
#include "surfmg/selfparam.hpp"
#include "surfmg/shapes.hpp"

#include <Eigen/Dense>

#include <random>
#include <string>
#include <vector>

namespace testing {

using namespace surfmg;

struct NamedMesh {
  std::string name;
  SurfaceMesh mesh;
};

/// Eleven meshes of at most 2,000 vertices: closed, open, genus one, flat and curved.
const std::vector<NamedMesh>& regression_meshes();

/// Hierarchy of regression mesh `index` built with the given floor, cached per process.
const Hierarchy& regression_hierarchy(std::size_t index, int min_vertices, Strategy strategy = Strategy::Midpoint);
const DecimationResult& regression_decimation(std::size_t index, int min_vertices,
                                              Strategy strategy = Strategy::Midpoint);

/// Smooth per-vertex function built from the coordinates.
Vector smooth_function(const SurfaceMesh& mesh);

/// Random SPD matrix: random sparse symmetric pattern made diagonally dominant.
SparseMatrix random_spd(int n, double density, std::mt19937& rng);

/// Dense Cholesky solve of A x = b.
Vector dense_solve(const SparseMatrix& a, const Vector& b);

/// Dense solve of A x = b subject to x[idx] = vals through the full KKT system.
Vector dense_constrained_solve(const SparseMatrix& a, const Vector& b, const std::vector<int>& idx,
                               const Vector& vals);

/// Dense P^T A P.
Eigen::MatrixXd dense_galerkin(const SparseMatrix& p, const SparseMatrix& a);

double relative_error(const Vector& x, const Vector& ref);

/// Maximum of |A_ij - B_ij| / max|B|.
double max_relative_entry_difference(const SparseMatrix& a, const SparseMatrix& b);

/// Poisson problem L x = M f with f of zero mean and vertex 0 fixed to zero.
struct PoissonProblem {
  SparseMatrix l;
  Vector b;
  std::vector<int> known{0};
  Vector known_values = Vector::Zero(1);
};

PoissonProblem poisson_problem(const SurfaceMesh& mesh);

/// Least-squares slope of log(t) against log(n).
double loglog_slope(const std::vector<double>& n, const std::vector<double>& t);

} // namespace testing
