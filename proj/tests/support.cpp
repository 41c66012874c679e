#include "support.hpp"

#include <cmath>
#include <map>
#include <tuple>

namespace testing {

const std::vector<NamedMesh>& regression_meshes() {
  static const std::vector<NamedMesh> meshes = [] {
    std::vector<NamedMesh> m;
    m.push_back({"icosphere3", shapes::icosphere(3)});
    m.push_back({"bumpy_sphere3", shapes::bumpy_sphere(3)});
    m.push_back({"sphere_cap4", shapes::sphere_cap(4, 0.2)});
    m.push_back({"torus40x20", shapes::torus(40, 20)});
    m.push_back({"torus60x24", shapes::torus(60, 24, 1.0, 0.3)});
    m.push_back({"grid30", shapes::grid(30, 30)});
    m.push_back({"grid40_alternate", shapes::grid(40, 40, 1.0, 1.0, true)});
    m.push_back({"waves36", shapes::height_field(36, 36, [](double x, double y) {
                   return 0.1 * std::sin(6.0 * x) * std::cos(5.0 * y);
                 })});
    m.push_back({"saddle24", shapes::height_field(24, 24, [](double x, double y) {
                   return 0.5 * (x - 0.5) * (x - 0.5) - 0.5 * (y - 0.5) * (y - 0.5);
                 })});
    m.push_back({"annulus12x60", shapes::annulus(12, 60)});
    m.push_back({"cylinder20x48", shapes::cylinder(20, 48)});
    return m;
  }();
  return meshes;
}

namespace {

using CacheKey = std::tuple<std::size_t, int, Strategy>;

struct Built {
  Hierarchy hierarchy;
  DecimationResult decimation;
};

const Built& built(std::size_t index, int min_vertices, Strategy strategy) {
  static std::map<CacheKey, Built> cache;
  CacheKey key{index, min_vertices, strategy};
  auto it = cache.find(key);
  if (it == cache.end()) {
    HierarchyConfig cfg;
    cfg.min_vertices = min_vertices;
    cfg.decimation.strategy = strategy;
    Built b;
    b.hierarchy = build_hierarchy(regression_meshes().at(index).mesh, cfg, &b.decimation);
    it = cache.emplace(key, std::move(b)).first;
  }
  return it->second;
}

} // namespace

const Hierarchy& regression_hierarchy(std::size_t index, int min_vertices, Strategy strategy) {
  return built(index, min_vertices, strategy).hierarchy;
}

const DecimationResult& regression_decimation(std::size_t index, int min_vertices, Strategy strategy) {
  return built(index, min_vertices, strategy).decimation;
}

Vector smooth_function(const SurfaceMesh& mesh) {
  Vector f(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec3& p = mesh.position(v);
    f[v] = std::sin(3.0 * p.x()) + p.y() * p.z() + 0.5 * std::cos(2.0 * p.y());
  }
  return f;
}

SparseMatrix random_spd(int n, double density, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), coin(0.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng) < density) a(i, j) = a(j, i) = u(rng);
  for (int i = 0; i < n; ++i) a(i, i) = a.row(i).cwiseAbs().sum() + 0.1 + coin(rng);
  return SparseMatrix::from_dense(a);
}

Vector dense_solve(const SparseMatrix& a, const Vector& b) {
  Eigen::LLT<Eigen::MatrixXd> llt(a.to_dense());
  return llt.solve(b);
}

Vector dense_constrained_solve(const SparseMatrix& a, const Vector& b, const std::vector<int>& idx,
                               const Vector& vals) {
  const int n = a.rows(), k = static_cast<int>(idx.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
  kkt.topLeftCorner(n, n) = a.to_dense();
  Vector rhs(n + k);
  rhs.head(n) = b;
  for (int c = 0; c < k; ++c) {
    kkt(n + c, idx[c]) = 1.0;
    kkt(idx[c], n + c) = 1.0;
    rhs[n + c] = vals[c];
  }
  Vector sol = kkt.partialPivLu().solve(rhs);
  return sol.head(n);
}

Eigen::MatrixXd dense_galerkin(const SparseMatrix& p, const SparseMatrix& a) {
  Eigen::MatrixXd pd = p.to_dense();
  return pd.transpose() * a.to_dense() * pd;
}

double relative_error(const Vector& x, const Vector& ref) {
  double r = ref.norm();
  return r > 0 ? (x - ref).norm() / r : (x - ref).norm();
}

double max_relative_entry_difference(const SparseMatrix& a, const SparseMatrix& b) {
  Eigen::MatrixXd da = a.to_dense(), db = b.to_dense();
  double scale = db.cwiseAbs().maxCoeff();
  return (da - db).cwiseAbs().maxCoeff() / (scale > 0 ? scale : 1.0);
}

PoissonProblem poisson_problem(const SurfaceMesh& mesh) {
  PoissonProblem p;
  p.l = cotan_laplacian(mesh);
  // remove the mass-weighted mean so the Neumann problem is solvable
  SparseMatrix m = lumped_mass(mesh);
  Vector f = smooth_function(mesh);
  const Vector area = m.diagonal();
  f.array() -= area.dot(f) / area.sum();
  p.b = spmv(m, f);
  return p;
}

double loglog_slope(const std::vector<double>& n, const std::vector<double>& t) {
  const std::size_t m = n.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double x = std::log(n[i]), y = std::log(t[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

} // namespace testing
