#pragma once

#include "surfmg/decimate.hpp"
#include "surfmg/sparse.hpp"

#include <string>
#include <vector>

namespace surfmg {

/// Point on a face, weights aligned with the face's corners.
struct BarycentricPoint {
  int face = -1;
  Vec3 w = Vec3(1, 0, 0);
};

/// The chart lookup left every triangle by more than the clamp tolerance.
class MapBreach : public Error {
public:
  MapBreach(const std::string& what, int record) : Error(what), record_(record) {}
  int record() const { return record_; }

private:
  int record_;
};

/// Negative barycentric weights down to this value are clamped to zero.
inline constexpr double kBarycentricClamp = 1e-9;

/// Moves a point across one collapse (before -> after). Points on faces the
/// collapse did not touch come back unchanged.
BarycentricPoint push_point(const BarycentricPoint& p, const CollapseRecord& record);
/// after -> before.
BarycentricPoint pull_point(const BarycentricPoint& p, const CollapseRecord& record);

/// Barycentric coordinates of `p` in triangle (a, b, c).
Vec3 barycentric(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c);

/// Pushes each point through the records in [begin, end), visiting only the
/// records that kill the point's current face.
std::vector<BarycentricPoint> map_all_fine_vertices(const DecimationResult& dec, int begin, int end,
                                                    std::vector<BarycentricPoint> seeds);
BarycentricPoint push_through(const DecimationResult& dec, int begin, int end, BarycentricPoint p);
/// Pulls a point living on a face alive after record `end - 1` back to the state before record `begin`.
BarycentricPoint pull_through(const DecimationResult& dec, int begin, int end, BarycentricPoint p);

/// Vertices and faces alive after the first `records` collapses, sorted by id.
std::vector<int> alive_vertices_at(const DecimationResult& dec, int num_fine_vertices, int records);
std::vector<int> alive_faces_at(const DecimationResult& dec, int records);

/// One seed per vertex in `vertices`: its smallest incident face among `faces`, corner weight 1.
std::vector<BarycentricPoint> vertex_seeds(const DecimationResult& dec, const std::vector<int>& vertices,
                                           const std::vector<int>& faces);

/// 3D position of a point, using the geometry its face had when created.
Vec3 point_position(const BarycentricPoint& p, const DecimationResult& dec, const SurfaceMesh& fine);

/// Rows are mapped points, columns are `coarse_vertices` (sorted global ids).
/// Exact zeros are dropped, everything else kept.
SparseMatrix assemble_prolongation(const std::vector<BarycentricPoint>& mapping, const std::vector<Face>& face_table,
                                   const std::vector<int>& coarse_vertices);

/// Uniform one-ring averaging composed over the collapses in [begin, end):
/// each removed vertex takes the mean of its neighbours at removal time.
SparseMatrix onering_average_prolongation(const DecimationResult& dec, int num_fine_vertices, int begin, int end);

struct HierarchyConfig {
  double ratio = 0.25;
  int min_vertices = 500;
  DecimationConfig decimation;
};

/// n_{l+1} = floor(ratio * n_l); stops before a level would fall below min_vertices.
std::vector<int> level_targets(int n, double ratio, int min_vertices);

struct Hierarchy {
  HierarchyConfig config;
  std::vector<int> target_sizes; ///< intended n_1..n_H
  std::vector<int> level_sizes;  ///< achieved n_0..n_H
  std::vector<int> level_faces;
  std::vector<int> level_records; ///< collapses applied to reach each level, 0 for the fine level
  std::vector<SparseMatrix> prolongations; ///< P_1..P_H, P_h is n_{h-1} x n_h
  SurfaceMesh fine;
  SurfaceMesh coarse;
  /// Fine vertex -> coarsest-mesh face (compact index) with weights.
  std::vector<BarycentricPoint> fine_to_coarse;
  std::vector<std::string> warnings;

  int levels() const { return static_cast<int>(prolongations.size()); }
};

/// `decimation` receives the underlying decimation when not null.
Hierarchy build_hierarchy(const SurfaceMesh& mesh, const HierarchyConfig& config = {},
                          DecimationResult* decimation = nullptr);

/// One-ring-average prolongations for the same level spans as `h`.
std::vector<SparseMatrix> onering_prolongations(const Hierarchy& h, const DecimationResult& dec);

/// Writes/reads the `.ssph` container.
void save_hierarchy(const Hierarchy& h, const std::string& path);
void save_hierarchy(const Hierarchy& h, std::ostream& out);
Hierarchy load_hierarchy(const std::string& path);
Hierarchy load_hierarchy(std::istream& in);

} // namespace surfmg
