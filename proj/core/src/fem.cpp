#include "surfmg/fem.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace surfmg {

void ProblemSpec::validate(int n) const {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error("smoothing weight alpha must lie in [0, 1)");
  if (f.size() != n) throw DimensionError("input function has " + std::to_string(f.size()) + " values, mesh has " +
                                          std::to_string(n) + " vertices");
  if (!constraints) return;
  const auto& c = *constraints;
  if (static_cast<Eigen::Index>(c.indices.size()) != c.values.size())
    throw DimensionError("constraint index/value count mismatch");
  std::vector<int> sorted = c.indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error("duplicate constraint index");
  if (!sorted.empty() && (sorted.front() < 0 || sorted.back() >= n)) throw Error("constraint index out of range");
}

SparseMatrix cotan_laplacian(const std::vector<Vec3>& x, const std::vector<Face>& faces) {
  const int n = static_cast<int>(x.size());
  std::vector<Triplet> t;
  t.reserve(12 * faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& tri = faces[f];
    for (int c = 0; c < 3; ++c) {
      int o = tri[c], a = tri[(c + 1) % 3], b = tri[(c + 2) % 3];
      Vec3 ea = x[a] - x[o], eb = x[b] - x[o];
      double cross = ea.cross(eb).norm();
      if (cross <= 0.0) throw MeshError("degenerate triangle in cotangent Laplacian", static_cast<int>(f));
      double w = 0.5 * ea.dot(eb) / cross;
      t.push_back({a, b, -w});
      t.push_back({b, a, -w});
      t.push_back({a, a, w});
      t.push_back({b, b, w});
    }
  }
  return SparseMatrix::from_triplets(n, n, t);
}

SparseMatrix cotan_laplacian(const SurfaceMesh& mesh) { return cotan_laplacian(mesh.vertices(), mesh.faces()); }

SparseMatrix lumped_mass(const std::vector<Vec3>& x, const std::vector<Face>& faces) {
  Vector d = Vector::Zero(static_cast<Eigen::Index>(x.size()));
  for (const Face& tri : faces) {
    double area = 0.5 * (x[tri[1]] - x[tri[0]]).cross(x[tri[2]] - x[tri[0]]).norm();
    for (int v : tri) d[v] += area / 3.0;
  }
  return SparseMatrix::diagonal(d);
}

SparseMatrix lumped_mass(const SurfaceMesh& mesh) { return lumped_mass(mesh.vertices(), mesh.faces()); }

SparseMatrix bilaplacian(const SparseMatrix& l, const SparseMatrix& m) {
  Vector d = m.diagonal();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] == 0.0) throw NumericalError("bilaplacian: zero mass entry", static_cast<int>(i));
    d[i] = 1.0 / d[i];
  }
  return multiply(transpose(l), scale_rows(l, d));
}

SparseMatrix bilaplacian(const SurfaceMesh& mesh) { return bilaplacian(cotan_laplacian(mesh), lumped_mass(mesh)); }

LinearSystem assemble_smoothing(const SurfaceMesh& mesh, const ProblemSpec& spec) {
  spec.validate(mesh.num_vertices());
  SparseMatrix m = lumped_mass(mesh);
  SparseMatrix l = cotan_laplacian(mesh);
  SparseMatrix q = spec.energy == Energy::Dirichlet ? l : bilaplacian(l, m);
  return {add(q, m, spec.alpha, 1.0 - spec.alpha), (1.0 - spec.alpha) * spmv(m, spec.f)};
}

double quadratic_energy(const SparseMatrix& a, const Vector& b, const Vector& x) {
  return 0.5 * x.dot(spmv(a, x)) - x.dot(b);
}

Positions mcf_step(const std::vector<Face>& faces, const SparseMatrix& l0, const Positions& x, double delta,
                   const MultiSolve& solve) {
  if (delta < 0) throw Error("mean curvature flow: time step must be non-negative");
  if (delta == 0.0) return x;
  const std::vector<Vec3> pts = to_points(x);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& t = faces[f];
    if ((pts[t[1]] - pts[t[0]]).cross(pts[t[2]] - pts[t[0]]).norm() <= 0.0)
      throw MeshError("mean curvature flow: degenerate face in current geometry", static_cast<int>(f));
  }
  SparseMatrix m = lumped_mass(pts, faces);
  SparseMatrix a = add(m, l0, 1.0, delta);
  Positions rhs(x.rows(), 3);
  for (int c = 0; c < 3; ++c) rhs.col(c) = spmv(m, x.col(c));
  return solve(a, rhs);
}

Positions positions_of(const SurfaceMesh& mesh) {
  Positions x(mesh.num_vertices(), 3);
  for (int v = 0; v < mesh.num_vertices(); ++v) x.row(v) = mesh.position(v).transpose();
  return x;
}

std::vector<Vec3> to_points(const Positions& x) {
  std::vector<Vec3> pts(x.rows());
  for (Eigen::Index v = 0; v < x.rows(); ++v) pts[v] = x.row(v).transpose();
  return pts;
}

double sphericity_error(const Positions& x) {
  // |p|^2 = 2 c.p + (r^2 - |c|^2) is linear in (c, k)
  Eigen::MatrixXd a(x.rows(), 4);
  Vector rhs(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    a.row(i) << 2 * x(i, 0), 2 * x(i, 1), 2 * x(i, 2), 1.0;
    rhs[i] = x.row(i).squaredNorm();
  }
  Eigen::Vector4d s = a.colPivHouseholderQr().solve(rhs);
  Vec3 c = s.head<3>();
  double r = std::sqrt(std::max(0.0, s[3] + c.squaredNorm()));
  double sq = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double d = (x.row(i).transpose() - c).norm() - r;
    sq += d * d;
  }
  return std::sqrt(sq / static_cast<double>(x.rows())) / r;
}

} // namespace surfmg
