#pragma once

#include "surfmg/flatten.hpp"
#include "surfmg/mesh.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace surfmg {

enum class Strategy { QSlim, Midpoint, VertexRemoval };

const char* to_string(Strategy s);
Strategy parse_strategy(const std::string& name);

/// Face-list mesh that supports edge collapses. Face ids are never reused:
/// a collapse kills every face of the edge one-ring and appends the new
/// vertex one-ring, so a face id always names one fixed triangle.
class EditableMesh {
public:
  explicit EditableMesh(const SurfaceMesh& mesh);

  int num_vertices() const { return alive_vertices_; }
  int num_faces() const { return alive_faces_; }
  int face_id_bound() const { return static_cast<int>(faces_.size()); }
  bool has_boundary() const { return has_boundary_; }

  bool vertex_alive(int v) const { return vertex_alive_[v] != 0; }
  bool face_alive(int f) const { return face_alive_[f] != 0; }
  const Face& face(int f) const { return faces_[f]; }
  const Vec3& position(int v) const { return positions_[v]; }
  const std::vector<Face>& face_table() const { return faces_; }
  const std::vector<int>& incident_faces(int v) const { return vertex_faces_[v]; }

  std::vector<int> neighbors(int v) const; ///< sorted
  std::vector<int> edge_faces(int a, int b) const;
  bool is_boundary_vertex(int v) const;
  bool is_boundary_edge(int a, int b) const { return edge_faces(a, b).size() == 1; }

  /// Common neighbours of i and j are exactly the opposite vertices, an
  /// interior edge does not join two boundary vertices, and at least 4 faces
  /// (closed) or 2 faces (with boundary) remain afterwards.
  bool link_condition(int i, int j) const;

  /// Before/after patches for removing i into j at `placement`, without applying it.
  CollapsePatches preview(int i, int j, const Vec3& placement) const;

  /// Applies a collapse; returns the patches that were replaced.
  CollapsePatches collapse(int i, int j, const Vec3& placement);

  /// Compact mesh of the alive part; `vertex_ids[c]` is the id of compact vertex c.
  SurfaceMesh to_mesh(std::vector<int>* vertex_ids = nullptr) const;

  /// Sorted ids of alive vertices / faces.
  std::vector<int> alive_vertices() const;
  std::vector<int> alive_faces() const;

private:
  std::vector<Vec3> positions_;
  std::vector<Face> faces_;
  std::vector<char> vertex_alive_;
  std::vector<char> face_alive_;
  std::vector<std::vector<int>> vertex_faces_;
  int alive_vertices_ = 0;
  int alive_faces_ = 0;
  bool has_boundary_ = false;
};

bool link_condition(const SurfaceMesh& mesh, int i, int j);

/// Collapses (i, j) on a copy of `mesh`; i is removed and k takes j's id.
/// Throws MeshError if the link condition fails.
std::pair<EditableMesh, CollapsePatches> collapse_edge(const SurfaceMesh& mesh, int i, int j, const Vec3& placement);

using Quadric = Eigen::Matrix4d;

/// Area-weighted face-plane quadrics plus boundary-edge planes weighted 1e3.
std::vector<Quadric> vertex_quadrics(const SurfaceMesh& mesh);
double quadric_error(const Quadric& q, const Vec3& p);

struct Placement {
  double cost = 0;
  Vec3 position = Vec3::Zero();
};

/// Minimizer of (qi + qj); falls back to the best of midpoint and endpoints
/// when the 3x3 block is singular (|det| < 1e-10 relative).
Placement qslim_cost(const Quadric& qi, const Quadric& qj, const Vec3& pi, const Vec3& pj);

/// One accepted collapse with its joint chart.
struct CollapseRecord {
  int index = -1;
  CollapsePatches patches; ///< i removed, j kept
  JointCase joint_case = JointCase::Interior;
  std::vector<Face> before_slots; ///< aligned with patches.before.faces
  std::vector<Face> after_slots;  ///< aligned with patches.after.faces
  std::vector<Vec2> uv;           ///< per slot
  double energy = 0;
};

struct DecimationConfig {
  Strategy strategy = Strategy::Midpoint;
  FlattenConfig flatten;
  int max_retries = 3;
  double retry_inflation = 10.0;
};

struct DecimationResult {
  std::vector<CollapseRecord> records;
  std::vector<Face> face_table; ///< every face id ever created
  std::vector<int> killed_by;   ///< record index that removed the face, -1 if alive at the end
  std::vector<int> created_by;  ///< record index that created the face, -1 for input faces
  std::vector<int> targets;
  std::vector<int> snapshot_records; ///< records applied when each target was reached (or at the stall)
  std::vector<int> achieved;         ///< vertex count at each snapshot
  bool shortfall = false;
  int rejections = 0;
  SurfaceMesh coarse;
  std::vector<int> coarse_vertex_ids; ///< global id of each coarse vertex
  std::vector<int> coarse_face_ids;   ///< global face id of each coarse face
};

/// Greedy collapses in cost order until each target count is reached in turn
/// (targets strictly decreasing). Stops early when no valid candidate is left
/// and flags the shortfall.
DecimationResult decimate(const SurfaceMesh& mesh, std::vector<int> targets, const DecimationConfig& config = {});
DecimationResult decimate(const SurfaceMesh& mesh, int target, const DecimationConfig& config = {});

} // namespace surfmg
