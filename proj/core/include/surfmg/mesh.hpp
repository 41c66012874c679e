#pragma once

#include "surfmg/common.hpp"

#include <span>
#include <vector>

namespace surfmg {

/// Indexed manifold triangle mesh with implicit half-edge adjacency.
///
/// Half-edge `3*f + c` runs from corner `c` of face `f` to corner `c+1`.
/// Construction validates edge/vertex manifoldness, consistent orientation,
/// degenerate faces and unreferenced vertices, and throws MeshError on the
/// first violation. Instances are immutable afterwards.
class SurfaceMesh {
public:
  SurfaceMesh() = default;
  SurfaceMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_halfedges() const { return 3 * num_faces(); }
  int num_edges() const { return num_edges_; }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Vec3& position(int v) const { return vertices_[v]; }
  const Face& face(int f) const { return faces_[f]; }

  int tail(int he) const { return faces_[he / 3][he % 3]; }
  int head(int he) const { return faces_[he / 3][(he % 3 + 1) % 3]; }
  int next(int he) const { return 3 * (he / 3) + (he % 3 + 1) % 3; }
  int prev(int he) const { return 3 * (he / 3) + (he % 3 + 2) % 3; }
  int face_of(int he) const { return he / 3; }
  /// -1 for boundary half-edges.
  int twin(int he) const { return twin_[he]; }

  /// An outgoing half-edge of `v`; for boundary vertices the one whose twin is missing.
  int vertex_halfedge(int v) const { return vertex_he_[v]; }
  int find_halfedge(int from, int to) const;

  bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
  bool is_boundary_halfedge(int he) const { return twin_[he] < 0; }
  bool is_boundary_edge(int a, int b) const;
  bool is_closed() const { return num_boundary_halfedges_ == 0; }

  /// One-ring neighbours in counter-clockwise order.
  std::vector<int> neighbors(int v) const;
  std::vector<int> incident_faces(int v) const;
  int valence(int v) const { return static_cast<int>(neighbors(v).size()); }

  double face_area(int f) const;
  Vec3 face_normal(int f) const;
  double total_area() const;
  double bbox_diagonal() const;

private:
  void build();

  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<int> twin_;
  std::vector<int> vertex_he_;
  std::vector<char> boundary_vertex_;
  int num_edges_ = 0;
  int num_boundary_halfedges_ = 0;
};

/// Vertex or edge one-ring patch.
struct Neighborhood {
  std::vector<int> center;   ///< {k} or {i, j}
  std::vector<int> vertices; ///< sorted, includes the center
  std::vector<int> faces;    ///< sorted
  /// Patch boundary with the center vertices removed: a closed loop when the
  /// center is interior, otherwise an open chain whose ends lie on the mesh boundary.
  std::vector<int> boundary;
  bool closed = true;
};

Neighborhood vertex_ring(const SurfaceMesh& mesh, int k);
Neighborhood edge_ring(const SurfaceMesh& mesh, int i, int j);

/// Ordered boundary loops; each loop follows face orientation.
std::vector<std::vector<int>> boundary_loops(const SurfaceMesh& mesh);

/// Boundary loop of a disk-shaped face patch, following face orientation.
/// Throws MeshError if the patch boundary is not a single simple loop.
std::vector<int> patch_boundary_loop(std::span<const Face> faces);

/// Removes `centers` from a patch boundary loop. Returns the remaining chain
/// starting right after the removed run, and whether the loop was untouched.
std::pair<std::vector<int>, bool> strip_centers(const std::vector<int>& loop,
                                                std::span<const int> centers);

/// True if `a` and `b` are the same cyclic sequence (same direction).
bool cyclic_equal(const std::vector<int>& a, const std::vector<int>& b);

struct MeshQuality {
  double min_angle_deg = 0;
  double max_aspect_ratio = 0;
  double mean_edge_length = 0;
};

MeshQuality quality_stats(const SurfaceMesh& mesh);

/// Signed area of the 2D triangle (a, b, c); positive for counter-clockwise.
inline double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

} // namespace surfmg
