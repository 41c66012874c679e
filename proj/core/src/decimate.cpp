#include "surfmg/decimate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <tuple>

namespace surfmg {

const char* to_string(Strategy s) {
  switch (s) {
  case Strategy::QSlim: return "qslim";
  case Strategy::Midpoint: return "midpoint";
  case Strategy::VertexRemoval: return "vertex-removal";
  }
  return "?";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "qslim") return Strategy::QSlim;
  if (name == "midpoint") return Strategy::Midpoint;
  if (name == "vertex-removal") return Strategy::VertexRemoval;
  throw Error("unknown decimation strategy: " + name);
}

EditableMesh::EditableMesh(const SurfaceMesh& mesh)
    : positions_(mesh.vertices()), faces_(mesh.faces()), vertex_alive_(mesh.num_vertices(), 1),
      face_alive_(mesh.num_faces(), 1), vertex_faces_(mesh.num_vertices()), alive_vertices_(mesh.num_vertices()),
      alive_faces_(mesh.num_faces()), has_boundary_(!mesh.is_closed()) {
  for (int f = 0; f < mesh.num_faces(); ++f)
    for (int v : faces_[f]) vertex_faces_[v].push_back(f);
}

std::vector<int> EditableMesh::neighbors(int v) const {
  std::vector<int> out;
  for (int f : vertex_faces_[v])
    for (int u : faces_[f])
      if (u != v) out.push_back(u);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> EditableMesh::edge_faces(int a, int b) const {
  std::vector<int> out;
  for (int f : vertex_faces_[a]) {
    const Face& t = faces_[f];
    if (t[0] == b || t[1] == b || t[2] == b) out.push_back(f);
  }
  return out;
}

bool EditableMesh::is_boundary_vertex(int v) const {
  for (int u : neighbors(v))
    if (edge_faces(v, u).size() == 1) return true;
  return false;
}

bool EditableMesh::link_condition(int i, int j) const {
  if (i == j || !vertex_alive(i) || !vertex_alive(j)) return false;
  std::vector<int> ef = edge_faces(i, j);
  if (ef.empty()) return false;
  std::vector<int> opposite;
  for (int f : ef)
    for (int v : faces_[f])
      if (v != i && v != j) opposite.push_back(v);
  std::sort(opposite.begin(), opposite.end());
  std::vector<int> ni = neighbors(i), nj = neighbors(j), common;
  std::set_intersection(ni.begin(), ni.end(), nj.begin(), nj.end(), std::back_inserter(common));
  if (common != opposite) return false;
  if (ef.size() == 2 && is_boundary_vertex(i) && is_boundary_vertex(j)) return false;
  const int floor = has_boundary_ ? 2 : 4;
  return alive_faces_ - static_cast<int>(ef.size()) >= floor;
}

namespace {

void fill_side(PatchSide& side, const std::vector<Vec3>& positions, const Vec3* moved, int moved_id) {
  for (const Face& f : side.faces)
    for (int v : f) side.vertices.push_back(v);
  std::sort(side.vertices.begin(), side.vertices.end());
  side.vertices.erase(std::unique(side.vertices.begin(), side.vertices.end()), side.vertices.end());
  for (int v : side.vertices) side.positions.push_back(moved && v == moved_id ? *moved : positions[v]);
  side.loop = patch_boundary_loop(side.faces);
}

} // namespace

CollapsePatches EditableMesh::preview(int i, int j, const Vec3& placement) const {
  CollapsePatches cp;
  cp.i = i;
  cp.j = j;
  std::vector<int> ids = vertex_faces_[i];
  ids.insert(ids.end(), vertex_faces_[j].begin(), vertex_faces_[j].end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  int next_id = face_id_bound();
  int edge_count = 0;
  for (int f : ids) {
    Face t = faces_[f];
    cp.before.face_ids.push_back(f);
    cp.before.faces.push_back(t);
    bool has_i = t[0] == i || t[1] == i || t[2] == i;
    bool has_j = t[0] == j || t[1] == j || t[2] == j;
    if (has_i && has_j) {
      ++edge_count;
      continue;
    }
    for (int& v : t)
      if (v == i) v = j;
    cp.after.face_ids.push_back(next_id++);
    cp.after.faces.push_back(t);
  }
  fill_side(cp.before, positions_, nullptr, -1);
  fill_side(cp.after, positions_, &placement, j);
  cp.edge_boundary = edge_count == 1;
  cp.i_boundary = is_boundary_vertex(i);
  cp.j_boundary = is_boundary_vertex(j);
  return cp;
}

CollapsePatches EditableMesh::collapse(int i, int j, const Vec3& placement) {
  CollapsePatches cp = preview(i, j, placement);
  for (int f : cp.before.face_ids) {
    face_alive_[f] = 0;
    --alive_faces_;
    for (int v : faces_[f]) std::erase(vertex_faces_[v], f);
  }
  for (std::size_t a = 0; a < cp.after.faces.size(); ++a) {
    int f = static_cast<int>(faces_.size());
    faces_.push_back(cp.after.faces[a]);
    face_alive_.push_back(1);
    ++alive_faces_;
    for (int v : cp.after.faces[a]) vertex_faces_[v].push_back(f);
  }
  positions_[j] = placement;
  vertex_alive_[i] = 0;
  --alive_vertices_;
  return cp;
}

std::vector<int> EditableMesh::alive_vertices() const {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(vertex_alive_.size()); ++v)
    if (vertex_alive_[v]) out.push_back(v);
  return out;
}

std::vector<int> EditableMesh::alive_faces() const {
  std::vector<int> out;
  for (int f = 0; f < face_id_bound(); ++f)
    if (face_alive_[f]) out.push_back(f);
  return out;
}

SurfaceMesh EditableMesh::to_mesh(std::vector<int>* vertex_ids) const {
  std::vector<int> ids = alive_vertices();
  std::vector<int> compact(vertex_alive_.size(), -1);
  std::vector<Vec3> pts;
  for (std::size_t c = 0; c < ids.size(); ++c) {
    compact[ids[c]] = static_cast<int>(c);
    pts.push_back(positions_[ids[c]]);
  }
  std::vector<Face> tris;
  for (int f : alive_faces()) {
    const Face& t = faces_[f];
    tris.push_back({compact[t[0]], compact[t[1]], compact[t[2]]});
  }
  if (vertex_ids) *vertex_ids = ids;
  return SurfaceMesh(std::move(pts), std::move(tris));
}

bool link_condition(const SurfaceMesh& mesh, int i, int j) { return EditableMesh(mesh).link_condition(i, j); }

std::pair<EditableMesh, CollapsePatches> collapse_edge(const SurfaceMesh& mesh, int i, int j, const Vec3& placement) {
  EditableMesh em(mesh);
  if (!em.link_condition(i, j)) throw MeshError("collapse violates the link condition", i);
  CollapsePatches cp = em.collapse(i, j, placement);
  return {std::move(em), std::move(cp)};
}

std::vector<Quadric> vertex_quadrics(const SurfaceMesh& mesh) {
  std::vector<Quadric> q(mesh.num_vertices(), Quadric::Zero());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = mesh.face(f);
    Vec3 n = mesh.face_normal(f);
    double area = mesh.face_area(f);
    Eigen::Vector4d p(n.x(), n.y(), n.z(), -n.dot(mesh.position(t[0])));
    Quadric k = area * p * p.transpose();
    for (int v : t) q[v] += k;
  }
  for (int he = 0; he < mesh.num_halfedges(); ++he) {
    if (!mesh.is_boundary_halfedge(he)) continue;
    int f = mesh.face_of(he), a = mesh.tail(he), b = mesh.head(he);
    Vec3 n = (mesh.position(b) - mesh.position(a)).cross(mesh.face_normal(f)).normalized();
    Eigen::Vector4d p(n.x(), n.y(), n.z(), -n.dot(mesh.position(a)));
    Quadric k = 1e3 * mesh.face_area(f) * p * p.transpose();
    q[a] += k;
    q[b] += k;
  }
  return q;
}

double quadric_error(const Quadric& q, const Vec3& p) {
  Eigen::Vector4d v(p.x(), p.y(), p.z(), 1.0);
  return v.dot(q * v);
}

Placement qslim_cost(const Quadric& qi, const Quadric& qj, const Vec3& pi, const Vec3& pj) {
  Quadric k = qi + qj;
  Eigen::Matrix3d a = k.topLeftCorner<3, 3>();
  Vec3 b = k.topRightCorner<3, 1>();
  double scale = a.norm();
  if (scale > 0 && std::abs(a.determinant()) >= 1e-10 * scale * scale * scale) {
    Vec3 v = a.fullPivLu().solve(-b);
    if (v.allFinite()) return {std::max(0.0, quadric_error(k, v)), v};
  }
  Placement best{std::max(0.0, quadric_error(k, 0.5 * (pi + pj))), 0.5 * (pi + pj)};
  for (const Vec3& p : {pi, pj}) {
    double e = std::max(0.0, quadric_error(k, p));
    if (e < best.cost) best = {e, p};
  }
  return best;
}

namespace {

struct Candidate {
  double cost;
  int lo, hi;
  int remove, keep;
  Vec3 placement;
  std::uint32_t stamp_lo, stamp_hi;
  int retries;
};

struct Later {
  bool operator()(const Candidate& a, const Candidate& b) const {
    return std::tie(a.cost, a.lo, a.hi) > std::tie(b.cost, b.lo, b.hi);
  }
};

class Decimator {
public:
  Decimator(const SurfaceMesh& mesh, const DecimationConfig& config)
      : mesh_(mesh), config_(config), quadrics_(vertex_quadrics(mesh)), version_(mesh.num_vertices(), 0) {
    double d = mesh.bbox_diagonal();
    min_area_ = 1e-12 * d * d;
  }

  DecimationResult run(std::vector<int> targets) {
    for (std::size_t t = 1; t < targets.size(); ++t)
      if (targets[t] >= targets[t - 1]) throw Error("decimation targets must be strictly decreasing");
    for (int t : targets)
      if (t < 1) throw Error("decimation target must be positive");
    res_.targets = targets;
    res_.killed_by.assign(mesh_.face_id_bound(), -1);
    res_.created_by.assign(mesh_.face_id_bound(), -1);

    for (int v : mesh_.alive_vertices())
      for (int u : mesh_.neighbors(v))
        if (v < u) push(v, u, 0);

    std::size_t next = 0;
    auto settle = [&] {
      while (next < targets.size() && mesh_.num_vertices() <= targets[next]) {
        res_.snapshot_records.push_back(static_cast<int>(res_.records.size()));
        res_.achieved.push_back(mesh_.num_vertices());
        ++next;
      }
    };
    settle();
    while (next < targets.size() && !queue_.empty()) {
      Candidate c = queue_.top();
      queue_.pop();
      if (!current(c)) continue;
      if (!mesh_.link_condition(c.remove, c.keep)) continue;
      if (try_collapse(c)) {
        settle();
      } else {
        ++res_.rejections;
        if (c.retries < config_.max_retries) {
          c.cost *= config_.retry_inflation;
          ++c.retries;
          queue_.push(c);
        }
      }
    }
    for (; next < targets.size(); ++next) {
      res_.shortfall = true;
      res_.snapshot_records.push_back(static_cast<int>(res_.records.size()));
      res_.achieved.push_back(mesh_.num_vertices());
    }
    res_.face_table = mesh_.face_table();
    res_.coarse = mesh_.to_mesh(&res_.coarse_vertex_ids);
    res_.coarse_face_ids = mesh_.alive_faces();
    return std::move(res_);
  }

private:
  bool current(const Candidate& c) const {
    return mesh_.vertex_alive(c.lo) && mesh_.vertex_alive(c.hi) && version_[c.lo] == c.stamp_lo &&
           version_[c.hi] == c.stamp_hi;
  }

  void push(int lo, int hi, int retries) {
    bool blo = mesh_.is_boundary_vertex(lo), bhi = mesh_.is_boundary_vertex(hi);
    bool eb = mesh_.is_boundary_edge(lo, hi);
    if (!eb && blo && bhi) return;
    const Vec3& plo = mesh_.position(lo);
    const Vec3& phi = mesh_.position(hi);
    Candidate c{0, lo, hi, hi, lo, Vec3::Zero(), version_[lo], version_[hi], retries};
    // with one boundary endpoint the boundary vertex survives
    bool one_boundary = !eb && blo != bhi;
    if (one_boundary && bhi) std::swap(c.remove, c.keep);
    switch (config_.strategy) {
    case Strategy::Midpoint:
      c.cost = (plo - phi).norm();
      c.placement = one_boundary ? mesh_.position(c.keep) : Vec3(0.5 * (plo + phi));
      break;
    case Strategy::QSlim: {
      Placement p = qslim_cost(quadrics_[lo], quadrics_[hi], plo, phi);
      c.cost = p.cost;
      c.placement = p.position;
      break;
    }
    case Strategy::VertexRemoval: {
      Quadric k = quadrics_[lo] + quadrics_[hi];
      double keep_lo = std::max(0.0, quadric_error(k, plo));
      double keep_hi = std::max(0.0, quadric_error(k, phi));
      if (!one_boundary && keep_hi < keep_lo) {
        c.remove = lo;
        c.keep = hi;
      }
      c.cost = c.keep == lo ? keep_lo : keep_hi;
      c.placement = mesh_.position(c.keep);
      break;
    }
    }
    queue_.push(c);
  }

  bool geometry_ok(const CollapsePatches& cp) const {
    std::size_t a = 0;
    for (std::size_t b = 0; b < cp.before.faces.size(); ++b) {
      const Face& t = cp.before.faces[b];
      bool has_i = t[0] == cp.i || t[1] == cp.i || t[2] == cp.i;
      bool has_j = t[0] == cp.j || t[1] == cp.j || t[2] == cp.j;
      if (has_i && has_j) continue;
      const Face& s = cp.after.faces[a++];
      auto normal = [](const PatchSide& side, const Face& f) {
        return Vec3((side.position_of(f[1]) - side.position_of(f[0])).cross(side.position_of(f[2]) - side.position_of(f[0])));
      };
      Vec3 nb = normal(cp.before, t), na = normal(cp.after, s);
      if (0.5 * na.norm() < min_area_) return false;
      if (na.dot(nb) <= 0) return false;
    }
    return true;
  }

  bool try_collapse(const Candidate& c) {
    CollapsePatches cp;
    try {
      cp = mesh_.preview(c.remove, c.keep, c.placement);
    } catch (const MeshError&) {
      return false;
    }
    if (!geometry_ok(cp)) return false;
    FlattenResult fr;
    JointVariable jv;
    try {
      fr = flatten_collapse(cp, config_.flatten, config_.strategy == Strategy::VertexRemoval);
      if (!fr.valid) return false;
      jv = build_joint_variable(cp, fr.joint_case);
    } catch (const FlattenError&) {
      return false;
    } catch (const NumericalError&) {
      return false;
    }

    const int index = static_cast<int>(res_.records.size());
    mesh_.collapse(c.remove, c.keep, c.placement);
    for (int f : cp.before.face_ids) res_.killed_by[f] = index;
    res_.killed_by.resize(mesh_.face_id_bound(), -1);
    res_.created_by.resize(mesh_.face_id_bound(), index);

    CollapseRecord rec;
    rec.index = index;
    rec.joint_case = fr.joint_case;
    rec.before_slots = std::move(jv.before_faces);
    rec.after_slots = std::move(jv.after_faces);
    rec.uv = std::move(fr.uv);
    rec.energy = fr.energy;
    rec.patches = std::move(cp);
    res_.records.push_back(std::move(rec));

    quadrics_[c.keep] += quadrics_[c.remove];
    const std::vector<int>& touched = res_.records.back().patches.after.vertices;
    for (int v : touched) ++version_[v];
    std::vector<std::pair<int, int>> edges;
    for (int v : touched)
      for (int u : mesh_.neighbors(v)) edges.emplace_back(std::min(u, v), std::max(u, v));
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (auto [lo, hi] : edges) push(lo, hi, 0);
    return true;
  }

  EditableMesh mesh_;
  DecimationConfig config_;
  std::vector<Quadric> quadrics_;
  std::vector<std::uint32_t> version_;
  std::priority_queue<Candidate, std::vector<Candidate>, Later> queue_;
  DecimationResult res_;
  double min_area_ = 0;
};

} // namespace

DecimationResult decimate(const SurfaceMesh& mesh, std::vector<int> targets, const DecimationConfig& config) {
  return Decimator(mesh, config).run(std::move(targets));
}

DecimationResult decimate(const SurfaceMesh& mesh, int target, const DecimationConfig& config) {
  return decimate(mesh, std::vector<int>{target}, config);
}

} // namespace surfmg
