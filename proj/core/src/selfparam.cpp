#include "surfmg/selfparam.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace surfmg {

Vec3 barycentric(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  double area = signed_area(a, b, c);
  return Vec3(signed_area(p, b, c), signed_area(a, p, c), signed_area(a, b, p)) / area;
}

namespace {

int find_local(const std::vector<int>& ids, int face) {
  auto it = std::find(ids.begin(), ids.end(), face);
  return it == ids.end() ? -1 : static_cast<int>(it - ids.begin());
}

BarycentricPoint transfer(const BarycentricPoint& p, const std::vector<int>& from_ids,
                          const std::vector<Face>& from_slots, const std::vector<int>& to_ids,
                          const std::vector<Face>& to_slots, const std::vector<Vec2>& uv, int record) {
  int lf = find_local(from_ids, p.face);
  if (lf < 0) return p;
  const Face& s = from_slots[lf];
  Vec2 q = p.w[0] * uv[s[0]] + p.w[1] * uv[s[1]] + p.w[2] * uv[s[2]];

  int best = -1;
  Vec3 best_w;
  double best_min = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < to_slots.size(); ++f) {
    const Face& t = to_slots[f];
    Vec3 w = barycentric(q, uv[t[0]], uv[t[1]], uv[t[2]]);
    if (w.minCoeff() > best_min) {
      best_min = w.minCoeff();
      best_w = w;
      best = static_cast<int>(f);
    }
  }
  if (best < 0 || !(best_min >= -kBarycentricClamp))
    throw MapBreach("point left the joint chart of collapse " + std::to_string(record), record);
  best_w = best_w.cwiseMax(0.0);
  best_w /= best_w.sum();
  return {to_ids[best], best_w};
}

} // namespace

BarycentricPoint push_point(const BarycentricPoint& p, const CollapseRecord& r) {
  return transfer(p, r.patches.before.face_ids, r.before_slots, r.patches.after.face_ids, r.after_slots, r.uv,
                  r.index);
}

BarycentricPoint pull_point(const BarycentricPoint& p, const CollapseRecord& r) {
  return transfer(p, r.patches.after.face_ids, r.after_slots, r.patches.before.face_ids, r.before_slots, r.uv,
                  r.index);
}

BarycentricPoint push_through(const DecimationResult& dec, int begin, int end, BarycentricPoint p) {
  while (true) {
    int r = dec.killed_by[p.face];
    if (r < 0 || r >= end) return p;
    if (r < begin) throw Error("point lies on a face removed before the mapped span");
    p = push_point(p, dec.records[r]);
  }
}

BarycentricPoint pull_through(const DecimationResult& dec, int begin, int end, BarycentricPoint p) {
  while (true) {
    int r = dec.created_by[p.face];
    if (r < begin) return p;
    if (r >= end) throw Error("point lies on a face created after the mapped span");
    p = pull_point(p, dec.records[r]);
  }
}

std::vector<BarycentricPoint> map_all_fine_vertices(const DecimationResult& dec, int begin, int end,
                                                    std::vector<BarycentricPoint> seeds) {
  for (BarycentricPoint& p : seeds) p = push_through(dec, begin, end, p);
  return seeds;
}

std::vector<int> alive_vertices_at(const DecimationResult& dec, int num_fine_vertices, int records) {
  std::vector<char> alive(num_fine_vertices, 1);
  for (int r = 0; r < records; ++r) alive[dec.records[r].patches.i] = 0;
  std::vector<int> out;
  for (int v = 0; v < num_fine_vertices; ++v)
    if (alive[v]) out.push_back(v);
  return out;
}

std::vector<int> alive_faces_at(const DecimationResult& dec, int records) {
  std::vector<int> out;
  for (int f = 0; f < static_cast<int>(dec.face_table.size()); ++f)
    if (dec.created_by[f] < records && (dec.killed_by[f] < 0 || dec.killed_by[f] >= records)) out.push_back(f);
  return out;
}

std::vector<BarycentricPoint> vertex_seeds(const DecimationResult& dec, const std::vector<int>& vertices,
                                           const std::vector<int>& faces) {
  std::map<int, BarycentricPoint> seed;
  for (int v : vertices) seed[v] = {};
  for (int f : faces) {
    const Face& t = dec.face_table[f];
    for (int c = 0; c < 3; ++c) {
      auto it = seed.find(t[c]);
      if (it == seed.end() || it->second.face >= 0) continue;
      Vec3 w = Vec3::Zero();
      w[c] = 1.0;
      it->second = {f, w};
    }
  }
  std::vector<BarycentricPoint> out;
  for (int v : vertices) {
    if (seed[v].face < 0) throw MeshError("vertex has no incident face at this level", v);
    out.push_back(seed[v]);
  }
  return out;
}

Vec3 point_position(const BarycentricPoint& p, const DecimationResult& dec, const SurfaceMesh& fine) {
  const Face& t = dec.face_table[p.face];
  int r = dec.created_by[p.face];
  Vec3 x = Vec3::Zero();
  for (int c = 0; c < 3; ++c)
    x += p.w[c] * (r < 0 ? fine.position(t[c]) : dec.records[r].patches.after.position_of(t[c]));
  return x;
}

SparseMatrix assemble_prolongation(const std::vector<BarycentricPoint>& mapping, const std::vector<Face>& face_table,
                                   const std::vector<int>& coarse_vertices) {
  std::vector<Triplet> t;
  t.reserve(3 * mapping.size());
  for (std::size_t r = 0; r < mapping.size(); ++r) {
    const Face& f = face_table[mapping[r].face];
    for (int c = 0; c < 3; ++c) {
      auto it = std::lower_bound(coarse_vertices.begin(), coarse_vertices.end(), f[c]);
      if (it == coarse_vertices.end() || *it != f[c]) throw MeshError("mapped face uses a non-coarse vertex", f[c]);
      t.push_back({static_cast<int>(r), static_cast<int>(it - coarse_vertices.begin()), mapping[r].w[c]});
    }
  }
  return SparseMatrix::from_triplets(static_cast<int>(mapping.size()), static_cast<int>(coarse_vertices.size()), t);
}

SparseMatrix onering_average_prolongation(const DecimationResult& dec, int num_fine_vertices, int begin, int end) {
  std::vector<int> rows = alive_vertices_at(dec, num_fine_vertices, begin);
  std::vector<int> cols = alive_vertices_at(dec, num_fine_vertices, end);
  std::vector<std::map<int, double>> weights(num_fine_vertices);
  for (std::size_t c = 0; c < cols.size(); ++c) weights[cols[c]][static_cast<int>(c)] = 1.0;
  for (int r = end - 1; r >= begin; --r) {
    const CollapseRecord& rec = dec.records[r];
    const int i = rec.patches.i;
    std::vector<int> ring;
    for (const Face& f : rec.patches.before.faces) {
      if (std::find(f.begin(), f.end(), i) == f.end()) continue;
      for (int v : f)
        if (v != i) ring.push_back(v);
    }
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
    std::map<int, double> row;
    for (int v : ring)
      for (auto [c, w] : weights[v]) row[c] += w / static_cast<double>(ring.size());
    weights[i] = std::move(row);
  }
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (auto [c, w] : weights[rows[r]]) t.push_back({static_cast<int>(r), c, w});
  return SparseMatrix::from_triplets(static_cast<int>(rows.size()), static_cast<int>(cols.size()), t);
}

std::vector<int> level_targets(int n, double ratio, int min_vertices) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("coarsening ratio must lie in (0, 1)");
  if (min_vertices < 4) throw Error("min_vertices must be at least 4");
  std::vector<int> out;
  int cur = n;
  while (true) {
    int next = static_cast<int>(std::floor(ratio * cur));
    if (next < min_vertices || next >= cur) break;
    out.push_back(next);
    cur = next;
  }
  return out;
}

Hierarchy build_hierarchy(const SurfaceMesh& mesh, const HierarchyConfig& config, DecimationResult* decimation) {
  Hierarchy h;
  h.config = config;
  h.fine = mesh;
  h.target_sizes = level_targets(mesh.num_vertices(), config.ratio, config.min_vertices);
  h.level_sizes = {mesh.num_vertices()};
  h.level_faces = {mesh.num_faces()};
  h.level_records = {0};
  if (h.target_sizes.empty())
    h.warnings.push_back("mesh has " + std::to_string(mesh.num_vertices()) +
                         " vertices; next level would be below floor of " + std::to_string(config.min_vertices));

  DecimationResult dec = decimate(mesh, h.target_sizes, config.decimation);
  const int n = mesh.num_vertices();
  std::vector<int> prev_vertices = alive_vertices_at(dec, n, 0);
  for (std::size_t l = 0; l < h.target_sizes.size(); ++l) {
    int begin = h.level_records.back(), end = dec.snapshot_records[l];
    if (end == begin) {
      h.warnings.push_back("decimation stalled at " + std::to_string(dec.achieved[l]) + " vertices (target " +
                           std::to_string(h.target_sizes[l]) + ")");
      break;
    }
    if (dec.achieved[l] != h.target_sizes[l])
      h.warnings.push_back("level " + std::to_string(l + 1) + " reached " + std::to_string(dec.achieved[l]) +
                           " vertices (target " + std::to_string(h.target_sizes[l]) + ")");
    std::vector<int> coarse_vertices = alive_vertices_at(dec, n, end);
    auto seeds = vertex_seeds(dec, prev_vertices, alive_faces_at(dec, begin));
    auto mapped = map_all_fine_vertices(dec, begin, end, std::move(seeds));
    h.prolongations.push_back(assemble_prolongation(mapped, dec.face_table, coarse_vertices));
    h.level_sizes.push_back(static_cast<int>(coarse_vertices.size()));
    h.level_faces.push_back(static_cast<int>(alive_faces_at(dec, end).size()));
    h.level_records.push_back(end);
    prev_vertices = std::move(coarse_vertices);
    if (dec.achieved[l] != h.target_sizes[l]) break;
  }

  // coarsest mesh and the composite fine -> coarsest map
  const int last = h.level_records.back();
  std::vector<int> coarse_vertices = alive_vertices_at(dec, n, last);
  std::vector<int> coarse_faces = alive_faces_at(dec, last);
  std::vector<Vec3> pts(coarse_vertices.size(), Vec3::Zero());
  std::vector<Face> tris;
  for (int f : coarse_faces) {
    Face t = dec.face_table[f];
    int r = dec.created_by[f];
    for (int& v : t) {
      int c = static_cast<int>(std::lower_bound(coarse_vertices.begin(), coarse_vertices.end(), v) - coarse_vertices.begin());
      pts[c] = r < 0 ? mesh.position(v) : dec.records[r].patches.after.position_of(v);
      v = c;
    }
    tris.push_back(t);
  }
  h.coarse = last == 0 ? mesh : SurfaceMesh(std::move(pts), std::move(tris));

  auto mapped = map_all_fine_vertices(dec, 0, last, vertex_seeds(dec, alive_vertices_at(dec, n, 0), alive_faces_at(dec, 0)));
  for (BarycentricPoint& p : mapped)
    p.face = static_cast<int>(std::lower_bound(coarse_faces.begin(), coarse_faces.end(), p.face) - coarse_faces.begin());
  h.fine_to_coarse = std::move(mapped);

  if (decimation) *decimation = std::move(dec);
  return h;
}

std::vector<SparseMatrix> onering_prolongations(const Hierarchy& h, const DecimationResult& dec) {
  std::vector<SparseMatrix> out;
  for (int l = 1; l < static_cast<int>(h.level_records.size()); ++l)
    out.push_back(onering_average_prolongation(dec, h.fine.num_vertices(), h.level_records[l - 1], h.level_records[l]));
  return out;
}

} // namespace surfmg
