#include "support.hpp"

#include "surfmg/dense.hpp"
#include "surfmg/matrix_market.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace surfmg;
using namespace testing;

namespace {

SparseMatrix random_sparse(int rows, int cols, double density, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), coin(0.0, 1.0);
  std::vector<Triplet> t;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (coin(rng) < density) t.push_back({i, j, u(rng)});
  return SparseMatrix::from_triplets(rows, cols, t);
}

SparseMatrix random_symmetric_pattern(int n, double density, std::mt19937& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 1.0});
    for (int j = i + 1; j < n; ++j)
      if (coin(rng) < density) {
        t.push_back({i, j, 1.0});
        t.push_back({j, i, 1.0});
      }
  }
  return SparseMatrix::from_triplets(n, n, t);
}

// chromatic number by exhaustive search, for tiny graphs
int brute_force_chromatic(const SparseMatrix& a) {
  auto adj = adjacency(a);
  const int n = a.rows();
  for (int k = 1; k <= n; ++k) {
    std::vector<int> c(n, 0);
    while (true) {
      bool ok = true;
      for (int v = 0; v < n && ok; ++v)
        for (int w : adj[v]) ok = ok && c[v] != c[w];
      if (ok) return k;
      int p = 0;
      while (p < n && ++c[p] == k) c[p++] = 0;
      if (p == n) break;
    }
  }
  return n;
}

} // namespace

TEST_SUITE("sparse") {

TEST_CASE("construction keeps sorted columns and drops exact zeros") {
  std::vector<Triplet> t = {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, -1.0}, {1, 1, 3.0}, {1, 1, 1.0}};
  SparseMatrix a = SparseMatrix::from_triplets(2, 3, t);
  CHECK(a.nnz() == 2);
  CHECK(a.coeff(0, 0) == 2.0);
  CHECK(a.coeff(0, 2) == 0.0);
  CHECK(a.coeff(1, 1) == 4.0);
}

TEST_CASE("spmv") {
  Vector x = Vector::LinSpaced(5, 1, 5);
  CHECK(spmv(SparseMatrix::identity(5), x) == x);
  SparseMatrix a = SparseMatrix::from_dense((Eigen::Matrix2d() << 2, 1, 1, 2).finished());
  CHECK(spmv(a, Vector::Ones(2)) == Vector::Constant(2, 3.0));

  std::mt19937 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    SparseMatrix r = random_sparse(5, 5, 0.5, rng);
    Vector v = Vector::Random(5);
    Vector ref = r.to_dense() * v;
    CHECK((spmv(r, v) - ref).norm() <= 1e-14 * std::max(1.0, ref.norm()));
  }
  CHECK_THROWS_AS(spmv(a, Vector::Ones(3)), DimensionError);
}

TEST_CASE("galerkin triple product") {
  std::mt19937 rng(2);
  SparseMatrix a = random_spd(4, 0.6, rng);
  CHECK(max_relative_entry_difference(galerkin_triple(SparseMatrix::identity(4), a), a) == 0.0);

  std::vector<Triplet> pt = {{0, 0, 1.0}, {1, 1, 1.0}, {2, 0, 0.25}, {2, 1, 0.75}, {3, 0, 0.5}, {3, 1, 0.5}};
  SparseMatrix p = SparseMatrix::from_triplets(4, 2, pt);
  Eigen::MatrixXd ptp = p.to_dense().transpose() * p.to_dense();
  CHECK((galerkin_triple(p, SparseMatrix::identity(4)).to_dense() - ptp).cwiseAbs().maxCoeff() < 1e-15);

  Eigen::MatrixXd ref = dense_galerkin(p, a);
  CHECK((galerkin_triple(p, a).to_dense() - ref).cwiseAbs().maxCoeff() <= 1e-13 * ref.cwiseAbs().maxCoeff());

  SparseMatrix big = random_spd(60, 0.1, rng);
  SparseMatrix q = random_sparse(60, 20, 0.15, rng);
  CHECK(galerkin_triple(q, big).is_symmetric());

  auto before = galerkin_triple_count();
  galerkin_triple(p, a);
  CHECK(galerkin_triple_count() == before + 1);
}

TEST_CASE("transpose, add, scale, prune") {
  std::mt19937 rng(3);
  SparseMatrix a = random_sparse(7, 5, 0.4, rng);
  CHECK(max_relative_entry_difference(transpose(transpose(a)), a) == 0.0);
  CHECK(transpose(a).rows() == 5);
  CHECK(prune(add(a, scale(a, -1.0)), 0.0).nnz() == 0);
  SparseMatrix m = SparseMatrix::diagonal(Vector::LinSpaced(7, 1, 7));
  SparseMatrix q = random_spd(7, 0.5, rng);
  SparseMatrix mix = add(q, m, 0.0, 1.0);
  CHECK(mix.same_pattern(m));
  CHECK((mix.to_dense() - m.to_dense()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(prune(a, 0.5).nnz() <= a.nnz());

  SparseMatrix b = random_sparse(5, 6, 0.4, rng);
  Eigen::MatrixXd ab = a.to_dense() * b.to_dense();
  CHECK((multiply(a, b).to_dense() - ab).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("extract and permute") {
  std::mt19937 rng(4);
  SparseMatrix a = random_spd(8, 0.5, rng);
  std::vector<int> rows = {1, 3, 4}, cols = {0, 3, 7};
  SparseMatrix e = extract(a, rows, cols);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(e.coeff(r, c) == a.coeff(rows[r], cols[c]));
  std::vector<int> order = {7, 6, 5, 4, 3, 2, 1, 0};
  SparseMatrix p = symmetric_permute(a, order);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) CHECK(p.coeff(i, j) == a.coeff(order[i], order[j]));
}

TEST_CASE("dense factorization") {
  DenseFactorization two(SparseMatrix::diagonal(Vector::Constant(6, 2.0)));
  CHECK((two.solve(Vector::Constant(6, 2.0)) - Vector::Ones(6)).norm() < 1e-15);

  DenseFactorization f(SparseMatrix::from_dense((Eigen::Matrix2d() << 4, 2, 2, 3).finished()));
  Vector x = f.solve((Vector(2) << 8, 8).finished());
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-14));
  // hand elimination for b = (8, 7): det 8, x = (3*8 - 2*7) / 8, y = (4*7 - 2*8) / 8
  Vector y = f.solve((Vector(2) << 8, 7).finished());
  CHECK(y[0] == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(y[1] == doctest::Approx(1.5).epsilon(1e-14));

  std::mt19937 rng(5);
  SparseMatrix a = random_spd(100, 0.05, rng);
  Vector b = Vector::Random(100);
  DenseFactorization big(a);
  CHECK(relative_residual(a, big.solve(b), b) <= 1e-12);

  // semi-definite but consistent: graph Laplacian of a path with a zero-mean rhs
  SparseMatrix lap = SparseMatrix::from_dense(
      (Eigen::Matrix3d() << 1, -1, 0, -1, 2, -1, 0, -1, 1).finished());
  DenseFactorization s(lap);
  CHECK(s.used_fallback());
  CHECK_FALSE(s.indefinite());
  Vector rhs = (Vector(3) << 1, 0, -1).finished();
  CHECK(relative_residual(lap, s.solve(rhs), rhs) < 1e-12);

  DenseFactorization neg(SparseMatrix::from_dense((Eigen::Matrix2d() << 1, 0, 0, -1).finished()));
  CHECK(neg.indefinite());

  // more coarse columns than fine rows: P^T A P is rank deficient without a zero column
  Eigen::MatrixXd p = Eigen::MatrixXd::Random(6, 10).cwiseAbs();
  Eigen::MatrixXd c = p.transpose() * random_spd(6, 0.5, rng).to_dense() * p;
  DenseFactorization deficient(c);
  CHECK(deficient.used_fallback());
  CHECK(deficient.singular());
  CHECK_FALSE(deficient.indefinite());
  Vector rc = p.transpose() * Vector::Random(6);
  Vector oracle = c.completeOrthogonalDecomposition().solve(rc);
  CHECK(relative_error(deficient.solve(rc), oracle) < 1e-8);
}

TEST_CASE("gauss-seidel") {
  SparseMatrix d = SparseMatrix::diagonal((Vector(3) << 2, 4, 8).finished());
  Vector b = (Vector(3) << 2, 2, 2).finished();
  Vector x = Vector::Zero(3);
  gauss_seidel(d, x, b, 1);
  CHECK((x - (Vector(3) << 1, 0.5, 0.25).finished()).norm() == 0.0);

  SparseMatrix a = SparseMatrix::from_dense((Eigen::Matrix2d() << 2, 1, 1, 2).finished());
  Vector y = Vector::Zero(2);
  gauss_seidel(a, y, Vector::Constant(2, 3.0), 1);
  CHECK(y[0] == 1.5);
  CHECK(y[1] == 0.75);

  SparseMatrix z = SparseMatrix::from_triplets(2, 2, std::vector<Triplet>{{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}});
  Vector w = Vector::Zero(2);
  try {
    gauss_seidel(z, w, Vector::Ones(2), 1);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.index() == 1);
  }
}

TEST_CASE("gauss-seidel residual does not grow on random SPD systems") {
  std::mt19937 rng(6);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    SparseMatrix a = random_spd(50, 0.1, rng);
    Vector b = Vector::Random(50);
    Vector exact = dense_solve(a, b);
    Vector x = Vector::Zero(50);
    double prev = relative_residual(a, x, b);
    double prev_err = (x - exact).norm();
    for (int k = 1; k <= 20; ++k) {
      gauss_seidel(a, x, b, 1);
      double r = relative_residual(a, x, b);
      double err = (x - exact).norm();
      if (r > prev * (1 + 1e-12) || err > prev_err * (1 + 1e-12)) ++violations;
      prev = r;
      prev_err = err;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("damped jacobi converges on a diagonally dominant system") {
  std::mt19937 rng(7);
  SparseMatrix a = random_spd(40, 0.1, rng);
  Vector b = Vector::Random(40);
  Vector x = Vector::Zero(40);
  damped_jacobi(a, x, b, 200, 0.8);
  CHECK(relative_residual(a, x, b) < 1e-8);
}

TEST_CASE("coloring examples") {
  Coloring diag = greedy_color(SparseMatrix::identity(5));
  CHECK(diag.count == 1);
  Coloring k3 = greedy_color(SparseMatrix::from_dense(Eigen::Matrix3d::Ones()));
  CHECK(k3.count == 3);

  std::vector<Triplet> path = {{0, 0, 2}, {1, 1, 2}, {2, 2, 2}, {0, 1, -1}, {1, 0, -1}, {1, 2, -1}, {2, 1, -1}};
  SparseMatrix p = SparseMatrix::from_triplets(3, 3, path);
  CHECK(greedy_color(p).count == brute_force_chromatic(p));
  CHECK(greedy_color(p).count == 2);

  std::vector<Triplet> cyc;
  const int n = 10;
  for (int i = 0; i < n; ++i) {
    cyc.push_back({i, i, 2});
    cyc.push_back({i, (i + 1) % n, -1});
    cyc.push_back({(i + 1) % n, i, -1});
  }
  CHECK(greedy_color(SparseMatrix::from_triplets(n, n, cyc)).count == 2);
}

TEST_CASE("random colorings are proper and bounded") {
  std::mt19937 rng(8);
  std::uniform_int_distribution<int> size(2, 60);
  std::uniform_real_distribution<double> dens(0.0, 0.3);
  for (int trial = 0; trial < 1000; ++trial) {
    SparseMatrix a = random_symmetric_pattern(size(rng), dens(rng), rng);
    Coloring c = greedy_color(a);
    REQUIRE(is_proper(c, a));
    std::size_t max_degree = 0;
    for (const auto& nb : adjacency(a)) max_degree = std::max(max_degree, nb.size());
    CHECK(c.count <= static_cast<int>(max_degree) + 1);
    CHECK(c.order.size() == static_cast<std::size_t>(a.rows()));
    if (a.rows() <= 7) CHECK(c.count >= brute_force_chromatic(a));
  }
}

TEST_CASE("colored gauss-seidel equals natural gauss-seidel on the permuted system") {
  std::mt19937 rng(9);
  SparseMatrix a = random_spd(200, 0.03, rng);
  Vector b = Vector::Random(200);
  ColoredGaussSeidel cgs(a);
  const auto& order = cgs.coloring().order;

  Vector x = Vector::Zero(200);
  cgs.relax(x, b, 3, 1);

  SparseMatrix perm = symmetric_permute(a, order);
  Vector bp(200), xp = Vector::Zero(200);
  for (int i = 0; i < 200; ++i) bp[i] = b[order[i]];
  gauss_seidel(perm, xp, bp, 3);
  for (int i = 0; i < 200; ++i) CHECK(x[order[i]] == xp[i]);

  Vector xt = Vector::Zero(200);
  cgs.relax(xt, b, 3, 4);
  CHECK((xt - x).cwiseAbs().maxCoeff() == 0.0);

  Vector xf = gauss_seidel(a, Vector::Zero(200), b, 3, Ordering::Colored);
  CHECK((xf - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("matrix market round trip") {
  std::mt19937 rng(10);
  SparseMatrix a = random_sparse(9, 4, 0.4, rng);
  std::stringstream ss;
  write_matrix_market(ss, a);
  SparseMatrix b = read_matrix_market(ss);
  CHECK(b.rows() == 9);
  CHECK(b.cols() == 4);
  CHECK(max_relative_entry_difference(b, a) == 0.0);

  std::istringstream sym("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 4\n2 1 1\n");
  SparseMatrix s = read_matrix_market(sym);
  CHECK(s.coeff(0, 1) == 1.0);
  CHECK(s.coeff(1, 0) == 1.0);

  std::istringstream bad("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
  CHECK_THROWS_AS(read_matrix_market(bad), ParseError);
}

} // TEST_SUITE
