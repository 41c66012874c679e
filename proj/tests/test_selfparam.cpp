#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace surfmg;

namespace {

Vec2 chart_point(const BarycentricPoint& p, const std::vector<int>& ids, const std::vector<Face>& slots,
                 const std::vector<Vec2>& uv) {
  int lf = static_cast<int>(std::find(ids.begin(), ids.end(), p.face) - ids.begin());
  const Face& s = slots[lf];
  return p.w[0] * uv[s[0]] + p.w[1] * uv[s[1]] + p.w[2] * uv[s[2]];
}

} // namespace

TEST_SUITE("selfparam") {

TEST_CASE("push and pull across one collapse") {
  SurfaceMesh m = shapes::bumpy_sphere(2);
  DecimationResult dec = decimate(m, m.num_vertices() - 40);
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (const CollapseRecord& r : dec.records) {
    const auto& before = r.patches.before;
    // untouched face
    int other = 0;
    while (std::find(before.face_ids.begin(), before.face_ids.end(), other) != before.face_ids.end()) ++other;
    BarycentricPoint far{other, Vec3(0.2, 0.3, 0.5)};
    CHECK(push_point(far, r).face == other);
    CHECK(push_point(far, r).w == far.w);
    BarycentricPoint far_after{r.patches.after.face_ids.front() + 100000, Vec3(0.2, 0.3, 0.5)};
    CHECK(pull_point(far_after, r).face == far_after.face);

    for (std::size_t f = 0; f < before.face_ids.size(); ++f) {
      Vec3 w(u(rng), u(rng), u(rng));
      w /= w.sum();
      BarycentricPoint p{before.face_ids[f], w};
      BarycentricPoint q = push_point(p, r);
      CHECK(std::find(r.patches.after.face_ids.begin(), r.patches.after.face_ids.end(), q.face) !=
            r.patches.after.face_ids.end());
      CHECK(q.w.minCoeff() >= 0.0);
      CHECK(q.w.sum() == doctest::Approx(1.0).epsilon(1e-14));
      Vec2 a = chart_point(p, before.face_ids, r.before_slots, r.uv);
      Vec2 b = chart_point(q, r.patches.after.face_ids, r.after_slots, r.uv);
      CHECK((a - b).norm() <= 1e-10);
      BarycentricPoint back = pull_point(q, r);
      const Face& t0 = before.faces[f];
      int lb = static_cast<int>(std::find(before.face_ids.begin(), before.face_ids.end(), back.face) -
                                before.face_ids.begin());
      const Face& t1 = before.faces[lb];
      Vec3 x0 = Vec3::Zero(), x1 = Vec3::Zero();
      for (int c = 0; c < 3; ++c) {
        x0 += p.w[c] * before.position_of(t0[c]);
        x1 += back.w[c] * before.position_of(t1[c]);
      }
      CHECK((x0 - x1).norm() <= 1e-8);
    }
  }
}

TEST_CASE("a surviving boundary vertex keeps weight one") {
  SurfaceMesh m = shapes::icosphere(2);
  DecimationResult dec = decimate(m, m.num_vertices() - 5);
  for (const CollapseRecord& r : dec.records) {
    const auto& before = r.patches.before;
    for (std::size_t f = 0; f < before.faces.size(); ++f)
      for (int c = 0; c < 3; ++c) {
        int v = before.faces[f][c];
        if (v == r.patches.i || v == r.patches.j) continue;
        Vec3 w = Vec3::Zero();
        w[c] = 1.0;
        BarycentricPoint q = push_point({before.face_ids[f], w}, r);
        const Face& t = dec.face_table[q.face];
        int corner = static_cast<int>(std::find(t.begin(), t.end(), v) - t.begin());
        REQUIRE(corner < 3);
        CHECK(q.w[corner] == doctest::Approx(1.0).epsilon(1e-9));
      }
  }
}

TEST_CASE("coarse vertices pull back to themselves under vertex removal") {
  SurfaceMesh m = shapes::bumpy_sphere(2);
  DecimationConfig cfg;
  cfg.strategy = Strategy::VertexRemoval;
  DecimationResult dec = decimate(m, 40, cfg);
  const int end = static_cast<int>(dec.records.size());
  auto coarse = alive_vertices_at(dec, m.num_vertices(), end);
  auto seeds = vertex_seeds(dec, coarse, alive_faces_at(dec, end));
  for (std::size_t c = 0; c < coarse.size(); ++c) {
    BarycentricPoint p = pull_through(dec, 0, end, seeds[c]);
    CHECK(dec.created_by[p.face] < 0);
    const Face& t = dec.face_table[p.face];
    int corner = static_cast<int>(std::find(t.begin(), t.end(), coarse[c]) - t.begin());
    REQUIRE(corner < 3);
    CHECK(p.w[corner] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK((point_position(p, dec, m) - m.position(coarse[c])).norm() < 1e-9);
  }
}

TEST_CASE("mapping all fine vertices") {
  SurfaceMesh m = shapes::torus(20, 10);
  DecimationResult dec = decimate(m, 50);
  const int end = static_cast<int>(dec.records.size());
  auto fine = alive_vertices_at(dec, m.num_vertices(), 0);
  auto seeds = vertex_seeds(dec, fine, alive_faces_at(dec, 0));

  auto same = map_all_fine_vertices(dec, 0, 0, seeds);
  for (std::size_t v = 0; v < seeds.size(); ++v) {
    CHECK(same[v].face == seeds[v].face);
    CHECK(same[v].w == seeds[v].w);
  }

  auto mapped = map_all_fine_vertices(dec, 0, end, seeds);
  CHECK(mapped.size() == static_cast<std::size_t>(m.num_vertices()));
  auto alive = alive_faces_at(dec, end);
  for (const BarycentricPoint& p : mapped) {
    CHECK(std::binary_search(alive.begin(), alive.end(), p.face));
    CHECK(p.w.minCoeff() >= 0.0);
    CHECK(p.w.sum() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("prolongation structure") {
  SurfaceMesh m = shapes::icosphere(2);
  DecimationResult none = decimate(m, m.num_vertices());
  auto ids = alive_vertices_at(none, m.num_vertices(), 0);
  auto seeds = vertex_seeds(none, ids, alive_faces_at(none, 0));
  SparseMatrix id = assemble_prolongation(seeds, none.face_table, ids);
  CHECK(testing::max_relative_entry_difference(id, SparseMatrix::identity(m.num_vertices())) == 0.0);

  HierarchyConfig cfg;
  cfg.min_vertices = 40;
  Hierarchy h = build_hierarchy(m, cfg);
  REQUIRE(h.levels() >= 1);
  for (const SparseMatrix& p : h.prolongations) {
    Vector ones = spmv(p, Vector::Ones(p.cols()));
    CHECK((ones - Vector::Ones(p.rows())).cwiseAbs().maxCoeff() <= 1e-12);
  }

  cfg.decimation.strategy = Strategy::VertexRemoval;
  DecimationResult dec;
  Hierarchy hv = build_hierarchy(m, cfg, &dec);
  for (int l = 0; l < hv.levels(); ++l) {
    auto rows = alive_vertices_at(dec, m.num_vertices(), hv.level_records[l]);
    auto cols = alive_vertices_at(dec, m.num_vertices(), hv.level_records[l + 1]);
    const SparseMatrix& p = hv.prolongations[l];
    for (std::size_t c = 0; c < cols.size(); ++c) {
      int r = static_cast<int>(std::lower_bound(rows.begin(), rows.end(), cols[c]) - rows.begin());
      REQUIRE(p.row_indices(r).size() == 1);
      CHECK(p.row_indices(r)[0] == static_cast<int>(c));
      CHECK(p.row_values(r)[0] == 1.0);
    }
  }
}

TEST_CASE("one-ring average baseline") {
  SurfaceMesh m = shapes::torus(12, 8);
  DecimationConfig cfg;
  cfg.strategy = Strategy::VertexRemoval;
  DecimationResult one = decimate(m, m.num_vertices() - 1, cfg);
  REQUIRE(one.records.size() == 1);
  SparseMatrix p = onering_average_prolongation(one, m.num_vertices(), 0, 1);
  const int removed = one.records[0].patches.i;
  REQUIRE(m.valence(removed) == 6);
  auto vals = p.row_values(removed);
  CHECK(vals.size() == 6);
  for (double w : vals) CHECK(w == doctest::Approx(1.0 / 6.0).epsilon(1e-15));

  DecimationResult many = decimate(m, 30, cfg);
  SparseMatrix q = onering_average_prolongation(many, m.num_vertices(), 0, static_cast<int>(many.records.size()));
  CHECK((spmv(q, Vector::Ones(q.cols())) - Vector::Ones(q.rows())).cwiseAbs().maxCoeff() < 1e-12);
  auto rows = alive_vertices_at(many, m.num_vertices(), 0);
  auto cols = alive_vertices_at(many, m.num_vertices(), static_cast<int>(many.records.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    CHECK(q.row_indices(cols[c]).size() == 1);
    CHECK(q.coeff(cols[c], static_cast<int>(c)) == 1.0);
  }
}

TEST_CASE("level sizing") {
  CHECK(level_targets(400, 0.25, 500).empty());
  CHECK(level_targets(8000, 0.25, 500) == std::vector<int>{2000, 500});
  CHECK(level_targets(2001, 0.25, 500) == std::vector<int>{500});
  CHECK(level_targets(1999, 0.25, 500).empty());
  CHECK(level_targets(10242, 0.25, 500) == std::vector<int>{2560, 640});
  CHECK_THROWS_AS(level_targets(100, 1.5, 10), Error);
}

TEST_CASE("hierarchy below the floor") {
  SurfaceMesh g = shapes::grid(19, 19);
  REQUIRE(g.num_vertices() == 400);
  Hierarchy h = build_hierarchy(g);
  CHECK(h.levels() == 0);
  CHECK(h.level_sizes == std::vector<int>{400});
  REQUIRE(h.warnings.size() == 1);
  CHECK(h.warnings[0].find("below floor") != std::string::npos);
  CHECK(h.fine_to_coarse.size() == 400u);
  for (int v = 0; v < 400; ++v) {
    const Face& t = h.coarse.face(h.fine_to_coarse[v].face);
    int corner = static_cast<int>(std::find(t.begin(), t.end(), v) - t.begin());
    REQUIRE(corner < 3);
    CHECK(h.fine_to_coarse[v].w[corner] == 1.0);
  }
}

TEST_CASE("hierarchy with one level") {
  HierarchyConfig cfg;
  cfg.min_vertices = 100;
  Hierarchy h = build_hierarchy(shapes::icosphere(3), cfg);
  CHECK(h.level_sizes == std::vector<int>{642, 160});
  CHECK(h.levels() == 1);
  CHECK(h.coarse.num_vertices() == 160);
  CHECK(h.prolongations[0].rows() == 642);
  CHECK(h.prolongations[0].cols() == 160);
  CHECK(h.warnings.empty());
}

} // TEST_SUITE
