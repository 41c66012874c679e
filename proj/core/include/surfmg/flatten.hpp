#pragma once

#include "surfmg/mesh.hpp"

#include <limits>
#include <vector>

namespace surfmg {

/// One side of a collapse: the edge one-ring before, or the vertex one-ring after.
struct PatchSide {
  std::vector<int> face_ids;  ///< global face ids
  std::vector<Face> faces;    ///< global vertex ids, aligned with face_ids
  std::vector<int> vertices;  ///< sorted global vertex ids
  std::vector<Vec3> positions; ///< aligned with vertices
  std::vector<int> loop;      ///< patch boundary loop, face orientation

  int local(int v) const; ///< index into `vertices`, -1 if absent
  const Vec3& position_of(int v) const { return positions[local(v)]; }
};

/// Before/after patches of collapsing edge (i, j). Vertex i is removed and
/// the surviving vertex k reuses j's id, so `after` refers to k as `j`.
struct CollapsePatches {
  PatchSide before;
  PatchSide after;
  int i = -1;
  int j = -1;
  bool i_boundary = false;
  bool j_boundary = false;
  bool edge_boundary = false;
};

/// How the surviving vertex k is tied into the shared chart.
///   Interior: k gets its own slot.
///   KAtI / KAtJ: k shares the slot of i / j. For a boundary edge this also
///     makes the removed endpoint colinear with its boundary neighbours.
///   Colinear: boundary edge only; p, i, k, j, q all lie on one line.
enum class JointCase { Interior, KAtI, KAtJ, Colinear };

const char* to_string(JointCase c);

struct Pin {
  int slot;
  Vec2 uv;
};

struct JointVariable {
  JointCase joint_case = JointCase::Interior;
  int num_slots = 0;
  std::vector<int> before_slot; ///< aligned with before.vertices
  std::vector<int> after_slot;  ///< aligned with after.vertices
  std::vector<Face> before_faces; ///< slot triples, aligned with before.faces
  std::vector<Face> after_faces;
  std::vector<std::array<Vec3, 3>> before_rest;
  std::vector<std::array<Vec3, 3>> after_rest;
  std::vector<int> before_loop; ///< patch boundary loops as slots; same curve in UV
  std::vector<int> after_loop;
  std::vector<int> colinear; ///< slots whose v coordinate is fixed to 0, in line order
  std::vector<Pin> pins;
};

enum class EnergyKind { LSCM, ARAP };

const char* to_string(EnergyKind e);

struct FlattenConfig {
  EnergyKind energy = EnergyKind::LSCM;
  int arap_max_iters = 10;
  double arap_tol = 1e-6;
};

struct FlattenResult {
  JointCase joint_case = JointCase::Interior;
  std::vector<Vec2> uv; ///< per slot
  double energy = 0;
  bool valid = false;
  int iterations = 0;
  std::vector<double> energy_history; ///< ARAP only, starting with the initializer
  std::vector<double> distortion_before;
  std::vector<double> distortion_after;
};

/// Throws MeshError if the patch loops disagree or the case does not fit the
/// edge type (Interior needs both endpoints inside; a boundary endpoint must
/// share its slot with k; Colinear needs a boundary edge).
JointVariable build_joint_variable(const CollapsePatches& patches, JointCase joint_case);

/// Joint LSCM over both patches. Throws NumericalError on a rank-deficient system.
FlattenResult flatten_lscm(const JointVariable& joint);

/// Local-global ARAP started from `init` (typically the LSCM result).
FlattenResult flatten_arap(const JointVariable& joint, const std::vector<Vec2>& init, int max_iters = 10,
                           double tol = 1e-6);

FlattenResult flatten_joint(const JointVariable& joint, const FlattenConfig& config);

/// Flattens all three boundary-edge cases and returns the valid one with the
/// least energy. Throws FlattenError when none is valid.
FlattenResult boundary_collapse_best_of_three(const CollapsePatches& patches, const FlattenConfig& config);

/// Picks the case from the patch type: Interior for interior endpoints, k
/// shares the boundary endpoint's slot, best of three for boundary edges.
/// With `keep_subset` k always shares j's slot (half-edge collapse).
FlattenResult flatten_collapse(const CollapsePatches& patches, const FlattenConfig& config, bool keep_subset = false);

/// Base-method scheme: flatten the before patch alone, then the after patch
/// with every before slot held fixed.
FlattenResult flatten_sequential(const JointVariable& joint, EnergyKind energy = EnergyKind::LSCM);

class FlattenError : public Error {
public:
  using Error::Error;
};

/// True iff every face has signed UV area > 1e-12 * (UV bounding-box area).
bool check_uv_validity(const std::vector<Vec2>& uv, const std::vector<Face>& faces);

/// True iff the closed polyline is simple and counter-clockwise. Consecutive
/// colinear vertices are allowed, fold-backs are not.
bool is_simple_loop(const std::vector<Vec2>& uv, const std::vector<int>& loop);

/// Both patches valid and the shared boundary simple.
bool joint_valid(const JointVariable& joint, const std::vector<Vec2>& uv);

/// sigma_1 / sigma_2 of the rest-to-UV map per face; +inf for degenerate or flipped faces.
std::vector<double> quasiconformal_distortion(const std::vector<std::array<Vec3, 3>>& rest,
                                              const std::vector<Face>& faces, const std::vector<Vec2>& uv);

/// Area-weighted mean of the per-face distortion over both patches.
double mean_distortion(const JointVariable& joint, const FlattenResult& result);

double lscm_energy(const JointVariable& joint, const std::vector<Vec2>& uv);
double arap_energy(const JointVariable& joint, const std::vector<Vec2>& uv);

} // namespace surfmg
