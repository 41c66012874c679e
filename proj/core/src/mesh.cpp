#include "surfmg/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace surfmg {

namespace {

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

} // namespace

SurfaceMesh::SurfaceMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  build();
}

void SurfaceMesh::build() {
  const int nv = num_vertices();
  const int nf = num_faces();
  if (nf == 0) throw MeshError("mesh has no faces");

  std::vector<char> referenced(nv, 0);
  for (int f = 0; f < nf; ++f) {
    const Face& t = faces_[f];
    for (int c = 0; c < 3; ++c) {
      if (t[c] < 0 || t[c] >= nv) throw MeshError("face references missing vertex", f);
      referenced[t[c]] = 1;
    }
    if (t[0] == t[1] || t[1] == t[2] || t[2] == t[0])
      throw MeshError("degenerate face (repeated vertex)", f);
  }
  for (int v = 0; v < nv; ++v)
    if (!referenced[v]) throw MeshError("unreferenced vertex", v);

  const double diag = bbox_diagonal();
  for (int f = 0; f < nf; ++f)
    if (face_area(f) < 1e-12 * diag * diag) throw MeshError("degenerate face (zero area)", f);

  std::unordered_map<std::uint64_t, int> undirected;
  undirected.reserve(3 * nf);
  for (int f = 0; f < nf; ++f)
    for (int c = 0; c < 3; ++c) {
      int a = faces_[f][c], b = faces_[f][(c + 1) % 3];
      if (++undirected[edge_key(std::min(a, b), std::max(a, b))] > 2)
        throw MeshError("non-manifold edge (more than two incident faces)", 3 * f + c);
    }
  num_edges_ = static_cast<int>(undirected.size());

  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(3 * nf);
  for (int he = 0; he < num_halfedges(); ++he)
    if (!directed.emplace(edge_key(tail(he), head(he)), he).second)
      throw MeshError("inconsistent face orientation", he / 3);

  twin_.assign(num_halfedges(), -1);
  num_boundary_halfedges_ = 0;
  for (int he = 0; he < num_halfedges(); ++he) {
    auto it = directed.find(edge_key(head(he), tail(he)));
    if (it != directed.end())
      twin_[he] = it->second;
    else
      ++num_boundary_halfedges_;
  }

  std::vector<int> out_count(nv, 0);
  vertex_he_.assign(nv, -1);
  boundary_vertex_.assign(nv, 0);
  for (int he = 0; he < num_halfedges(); ++he) {
    int v = tail(he);
    ++out_count[v];
    if (twin_[he] < 0) {
      if (boundary_vertex_[v]) throw MeshError("non-manifold vertex (multiple boundary fans)", v);
      boundary_vertex_[v] = 1;
      vertex_he_[v] = he;
    } else if (vertex_he_[v] < 0) {
      vertex_he_[v] = he;
    }
  }
  // incoming boundary half-edges also mark their head as boundary
  for (int he = 0; he < num_halfedges(); ++he)
    if (twin_[he] < 0 && !boundary_vertex_[head(he)])
      throw MeshError("non-manifold vertex", head(he));

  for (int v = 0; v < nv; ++v) {
    int start = vertex_he_[v];
    int h = start;
    int visited = 0;
    do {
      ++visited;
      h = twin_[prev(h)];
    } while (h >= 0 && h != start && visited <= out_count[v]);
    if (visited != out_count[v]) throw MeshError("non-manifold vertex (multiple fans)", v);
  }
}

int SurfaceMesh::find_halfedge(int from, int to) const {
  int start = vertex_he_[from];
  int h = start;
  do {
    if (head(h) == to) return h;
    // the last face of a boundary fan still has an incoming edge from `to`
    int p = prev(h);
    if (twin_[p] < 0) break;
    h = twin_[p];
  } while (h != start);
  return -1;
}

bool SurfaceMesh::is_boundary_edge(int a, int b) const {
  int h = find_halfedge(a, b);
  if (h >= 0) return twin_[h] < 0;
  h = find_halfedge(b, a);
  return h >= 0 && twin_[h] < 0;
}

std::vector<int> SurfaceMesh::neighbors(int v) const {
  std::vector<int> out;
  int start = vertex_he_[v];
  int h = start;
  while (true) {
    out.push_back(head(h));
    int p = prev(h);
    if (twin_[p] < 0) {
      out.push_back(tail(p));
      break;
    }
    h = twin_[p];
    if (h == start) break;
  }
  return out;
}

std::vector<int> SurfaceMesh::incident_faces(int v) const {
  std::vector<int> out;
  int start = vertex_he_[v];
  int h = start;
  do {
    out.push_back(face_of(h));
    h = twin_[prev(h)];
  } while (h >= 0 && h != start);
  return out;
}

double SurfaceMesh::face_area(int f) const {
  const Face& t = faces_[f];
  return 0.5 * (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]).norm();
}

Vec3 SurfaceMesh::face_normal(int f) const {
  const Face& t = faces_[f];
  return (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]).normalized();
}

double SurfaceMesh::total_area() const {
  double a = 0;
  for (int f = 0; f < num_faces(); ++f) a += face_area(f);
  return a;
}

double SurfaceMesh::bbox_diagonal() const {
  if (vertices_.empty()) return 0;
  Vec3 lo = vertices_.front(), hi = vertices_.front();
  for (const Vec3& p : vertices_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

std::vector<int> patch_boundary_loop(std::span<const Face> faces) {
  std::unordered_map<std::uint64_t, int> directed;
  for (const Face& t : faces)
    for (int c = 0; c < 3; ++c) directed.emplace(edge_key(t[c], t[(c + 1) % 3]), 0);

  std::unordered_map<int, int> next;
  int start = -1;
  for (const Face& t : faces)
    for (int c = 0; c < 3; ++c) {
      int a = t[c], b = t[(c + 1) % 3];
      if (directed.count(edge_key(b, a))) continue;
      if (!next.emplace(a, b).second) throw MeshError("patch boundary is not a simple loop", a);
      if (start < 0 || a < start) start = a;
    }
  if (start < 0) throw MeshError("patch has no boundary");

  std::vector<int> loop;
  int v = start;
  do {
    loop.push_back(v);
    auto it = next.find(v);
    if (it == next.end()) throw MeshError("patch boundary is open", v);
    v = it->second;
  } while (v != start && loop.size() <= next.size());
  if (loop.size() != next.size()) throw MeshError("patch boundary has several loops", start);
  return loop;
}

std::pair<std::vector<int>, bool> strip_centers(const std::vector<int>& loop,
                                                std::span<const int> centers) {
  auto is_center = [&](int v) { return std::find(centers.begin(), centers.end(), v) != centers.end(); };
  const int n = static_cast<int>(loop.size());
  int first = -1;
  for (int s = 0; s < n; ++s)
    if (!is_center(loop[s]) && is_center(loop[(s + n - 1) % n])) {
      first = s;
      break;
    }
  if (first < 0) return {loop, true};
  std::vector<int> chain;
  for (int s = 0; s < n; ++s) {
    int v = loop[(first + s) % n];
    if (is_center(v)) break;
    chain.push_back(v);
  }
  return {chain, false};
}

bool cyclic_equal(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  const std::size_t n = a.size();
  for (std::size_t shift = 0; shift < n; ++shift) {
    if (b[shift] != a[0]) continue;
    bool same = true;
    for (std::size_t k = 0; k < n && same; ++k) same = a[k] == b[(k + shift) % n];
    if (same) return true;
  }
  return false;
}

namespace {

Neighborhood make_neighborhood(const SurfaceMesh& mesh, std::vector<int> center, std::vector<int> faces) {
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());

  Neighborhood n;
  n.center = std::move(center);
  std::vector<Face> tris;
  for (int f : faces) {
    tris.push_back(mesh.face(f));
    for (int v : mesh.face(f)) n.vertices.push_back(v);
  }
  std::sort(n.vertices.begin(), n.vertices.end());
  n.vertices.erase(std::unique(n.vertices.begin(), n.vertices.end()), n.vertices.end());
  n.faces = std::move(faces);
  // the ring is the whole of a closed surface
  if (static_cast<int>(n.faces.size()) == mesh.num_faces() && mesh.is_closed()) return n;
  auto [chain, closed] = strip_centers(patch_boundary_loop(tris), n.center);
  n.boundary = std::move(chain);
  n.closed = closed;
  return n;
}

} // namespace

Neighborhood vertex_ring(const SurfaceMesh& mesh, int k) {
  if (k < 0 || k >= mesh.num_vertices()) throw MeshError("vertex index out of range", k);
  if (mesh.vertex_halfedge(k) < 0) throw MeshError("isolated vertex", k);
  return make_neighborhood(mesh, {k}, mesh.incident_faces(k));
}

Neighborhood edge_ring(const SurfaceMesh& mesh, int i, int j) {
  if (i < 0 || j < 0 || i >= mesh.num_vertices() || j >= mesh.num_vertices())
    throw MeshError("vertex index out of range");
  if (mesh.find_halfedge(i, j) < 0 && mesh.find_halfedge(j, i) < 0) throw MeshError("not an edge", i);
  std::vector<int> faces = mesh.incident_faces(i);
  auto fj = mesh.incident_faces(j);
  faces.insert(faces.end(), fj.begin(), fj.end());
  return make_neighborhood(mesh, {i, j}, std::move(faces));
}

std::vector<std::vector<int>> boundary_loops(const SurfaceMesh& mesh) {
  std::vector<int> next(mesh.num_vertices(), -1);
  for (int he = 0; he < mesh.num_halfedges(); ++he)
    if (mesh.twin(he) < 0) next[mesh.tail(he)] = mesh.head(he);

  std::vector<std::vector<int>> loops;
  std::vector<char> used(mesh.num_vertices(), 0);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (next[v] < 0 || used[v]) continue;
    std::vector<int> loop;
    int u = v;
    while (!used[u]) {
      used[u] = 1;
      loop.push_back(u);
      u = next[u];
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

MeshQuality quality_stats(const SurfaceMesh& mesh) {
  MeshQuality q;
  q.min_angle_deg = 180;
  double total_len = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = mesh.face(f);
    double longest = 0;
    for (int c = 0; c < 3; ++c) {
      Vec3 a = mesh.position(t[(c + 1) % 3]) - mesh.position(t[c]);
      Vec3 b = mesh.position(t[(c + 2) % 3]) - mesh.position(t[c]);
      double ang = std::atan2(a.cross(b).norm(), a.dot(b)) * 180.0 / std::numbers::pi;
      q.min_angle_deg = std::min(q.min_angle_deg, ang);
      longest = std::max(longest, a.norm());
      total_len += a.norm();
    }
    // longest edge over the altitude onto it, normalized so equilateral = 1
    double area = mesh.face_area(f);
    double aspect = longest * longest / (2.0 * area) * (std::sqrt(3.0) / 2.0);
    q.max_aspect_ratio = std::max(q.max_aspect_ratio, aspect);
  }
  q.mean_edge_length = total_len / (3.0 * mesh.num_faces());
  return q;
}

} // namespace surfmg
