#include "surfmg/flatten.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace surfmg {

int PatchSide::local(int v) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
  return (it != vertices.end() && *it == v) ? static_cast<int>(it - vertices.begin()) : -1;
}

const char* to_string(JointCase c) {
  switch (c) {
  case JointCase::Interior: return "interior";
  case JointCase::KAtI: return "k-at-i";
  case JointCase::KAtJ: return "k-at-j";
  case JointCase::Colinear: return "colinear";
  }
  return "?";
}

const char* to_string(EnergyKind e) { return e == EnergyKind::LSCM ? "lscm" : "arap"; }

namespace {

// Rest triangle in a local isometric frame. J = sum_c u_c g_c^T maps rest to UV.
struct Tri {
  Face s;
  std::array<Vec2, 3> g;
  double area;
};

Tri make_tri(const Face& slots, const std::array<Vec3, 3>& p) {
  Vec3 e1 = p[1] - p[0], e2 = p[2] - p[0];
  Vec3 n = e1.cross(e2);
  double l1 = e1.norm(), nn = n.norm();
  if (!(l1 > 0) || !(nn > 1e-300)) throw NumericalError("degenerate rest triangle in flattening");
  Vec3 x = e1 / l1;
  Vec3 y = n.cross(x) / nn;
  Eigen::Matrix2d xm;
  xm << l1, e2.dot(x), 0.0, e2.dot(y);
  Eigen::Matrix2d g = xm.inverse();
  Tri t;
  t.s = slots;
  t.g[1] = g.row(0).transpose();
  t.g[2] = g.row(1).transpose();
  t.g[0] = -(t.g[1] + t.g[2]);
  t.area = 0.5 * nn;
  return t;
}

Eigen::Matrix2d jacobian(const Tri& t, const Vector& x) {
  Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
  for (int c = 0; c < 3; ++c) {
    Vec2 u(x[2 * t.s[c]], x[2 * t.s[c] + 1]);
    j += u * t.g[c].transpose();
  }
  return j;
}

double closest_rotation_angle(const Eigen::Matrix2d& j) { return std::atan2(j(1, 0) - j(0, 1), j(0, 0) + j(1, 1)); }

double tri_arap(const Tri& t, const Vector& x) {
  Eigen::Matrix2d j = jacobian(t, x);
  double th = closest_rotation_angle(j);
  Eigen::Matrix2d r;
  r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  return t.area * (j - r).squaredNorm();
}

double tri_lscm(const Tri& t, const Vector& x) {
  Eigen::Matrix2d j = jacobian(t, x);
  double a = j(0, 0) - j(1, 1), b = j(0, 1) + j(1, 0);
  return 0.5 * t.area * (a * a + b * b);
}

struct Problem {
  int num_slots = 0;
  std::vector<Tri> tris;
  std::vector<char> fixed; // per coordinate
  Vector values;           // fixed values, and the starting point elsewhere

  explicit Problem(int n) : num_slots(n), fixed(2 * n, 0), values(Vector::Zero(2 * n)) {}

  std::vector<int> free_columns() const {
    std::vector<char> used(2 * num_slots, 0);
    for (const Tri& t : tris)
      for (int s : t.s) used[2 * s] = used[2 * s + 1] = 1;
    std::vector<int> cols;
    for (int c = 0; c < 2 * num_slots; ++c)
      if (used[c] && !fixed[c]) cols.push_back(c);
    return cols;
  }
};

// Least squares over free coordinates: rows of `a` act on all 2S coordinates.
class Reduced {
public:
  Reduced(const Problem& p, const Eigen::MatrixXd& a) : cols_(p.free_columns()) {
    af_.resize(a.rows(), static_cast<Eigen::Index>(cols_.size()));
    for (std::size_t c = 0; c < cols_.size(); ++c) af_.col(static_cast<Eigen::Index>(c)) = a.col(cols_[c]);
    base_ = p.values;
    for (int c : cols_) base_[c] = 0.0;
    offset_ = a * base_;
    if (cols_.empty()) return;
    qr_.compute(af_);
    if (qr_.rank() < static_cast<Eigen::Index>(cols_.size()))
      throw NumericalError("rank-deficient flattening system");
  }

  // argmin |A x - target| with fixed coordinates held.
  Vector solve(const Vector& target) const {
    if (cols_.empty()) return base_;
    Vector y = qr_.solve(target - offset_);
    Vector x = base_;
    for (std::size_t c = 0; c < cols_.size(); ++c) x[cols_[c]] = y[static_cast<Eigen::Index>(c)];
    return x;
  }

private:
  std::vector<int> cols_;
  Eigen::MatrixXd af_;
  Vector base_;
  Vector offset_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
};

Vector solve_lscm(const Problem& p) {
  const Eigen::Index rows = 2 * static_cast<Eigen::Index>(p.tris.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, 2 * p.num_slots);
  for (std::size_t t = 0; t < p.tris.size(); ++t) {
    const Tri& tri = p.tris[t];
    double w = std::sqrt(0.5 * tri.area);
    for (int c = 0; c < 3; ++c) {
      int s = tri.s[c];
      const Vec2& g = tri.g[c];
      // a - d and b + c of the Jacobian
      a(2 * t, 2 * s) += w * g.x();
      a(2 * t, 2 * s + 1) -= w * g.y();
      a(2 * t + 1, 2 * s) += w * g.y();
      a(2 * t + 1, 2 * s + 1) += w * g.x();
    }
  }
  Reduced red(p, a);
  return red.solve(Vector::Zero(rows));
}

double total(const Problem& p, const Vector& x, double (*f)(const Tri&, const Vector&)) {
  double e = 0;
  for (const Tri& t : p.tris) e += f(t, x);
  return e;
}

Vector solve_arap(const Problem& p, const Vector& init, int max_iters, double tol, std::vector<double>& history,
                  int& iterations) {
  const Eigen::Index rows = 4 * static_cast<Eigen::Index>(p.tris.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, 2 * p.num_slots);
  for (std::size_t t = 0; t < p.tris.size(); ++t) {
    const Tri& tri = p.tris[t];
    double w = std::sqrt(tri.area);
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < 2; ++r)
        for (int col = 0; col < 2; ++col) a(4 * t + 2 * r + col, 2 * tri.s[c] + r) += w * tri.g[c][col];
  }
  Reduced red(p, a);

  Vector x = init;
  for (int c = 0; c < 2 * p.num_slots; ++c)
    if (p.fixed[c]) x[c] = p.values[c];
  double e = total(p, x, tri_arap);
  history.assign(1, e);
  // energies below this are round-off of an exact isometry
  double area = 0;
  for (const Tri& tri : p.tris) area += tri.area;
  const double zero = 1e-24 * area;
  iterations = 0;
  Vector target(rows);
  for (int it = 0; it < max_iters; ++it) {
    for (std::size_t t = 0; t < p.tris.size(); ++t) {
      const Tri& tri = p.tris[t];
      double th = closest_rotation_angle(jacobian(tri, x));
      double w = std::sqrt(tri.area), cs = std::cos(th), sn = std::sin(th);
      target.segment<4>(4 * static_cast<Eigen::Index>(t)) << w * cs, -w * sn, w * sn, w * cs;
    }
    Vector nx = red.solve(target);
    double ne = total(p, nx, tri_arap);
    ++iterations;
    // the global step is exact, so a rise can only be round-off
    if (ne > e) break;
    x = nx;
    history.push_back(ne);
    bool done = ne <= zero || (e - ne) <= tol * e;
    e = ne;
    if (done) break;
  }
  return x;
}

std::vector<Vec2> to_uv(const Vector& x) {
  std::vector<Vec2> uv(x.size() / 2);
  for (std::size_t s = 0; s < uv.size(); ++s) uv[s] = Vec2(x[2 * s], x[2 * s + 1]);
  return uv;
}

Vector from_uv(const std::vector<Vec2>& uv) {
  Vector x(2 * uv.size());
  for (std::size_t s = 0; s < uv.size(); ++s) x.segment<2>(2 * s) = uv[s];
  return x;
}

void add_tris(Problem& p, const std::vector<Face>& faces, const std::vector<std::array<Vec3, 3>>& rest) {
  for (std::size_t f = 0; f < faces.size(); ++f) p.tris.push_back(make_tri(faces[f], rest[f]));
}

void add_constraints(Problem& p, const JointVariable& joint) {
  for (int s : joint.colinear) {
    p.fixed[2 * s + 1] = 1;
    p.values[2 * s + 1] = 0.0;
  }
  for (const Pin& pin : joint.pins) {
    p.fixed[2 * pin.slot] = p.fixed[2 * pin.slot + 1] = 1;
    p.values[2 * pin.slot] = pin.uv.x();
    p.values[2 * pin.slot + 1] = pin.uv.y();
  }
}

Problem joint_problem(const JointVariable& joint) {
  Problem p(joint.num_slots);
  add_tris(p, joint.before_faces, joint.before_rest);
  add_tris(p, joint.after_faces, joint.after_rest);
  add_constraints(p, joint);
  return p;
}

void finish(const JointVariable& joint, FlattenResult& r) {
  r.joint_case = joint.joint_case;
  r.valid = joint_valid(joint, r.uv);
  r.distortion_before = quasiconformal_distortion(joint.before_rest, joint.before_faces, r.uv);
  r.distortion_after = quasiconformal_distortion(joint.after_rest, joint.after_faces, r.uv);
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= p.y() &&
         p.y() <= std::max(a.y(), b.y());
}

int orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  double v = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  return (v > 0) - (v < 0);
}

bool segments_touch(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0) {
    if (o1 != 0 || o2 != 0) return true;
  }
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

} // namespace

bool check_uv_validity(const std::vector<Vec2>& uv, const std::vector<Face>& faces) {
  if (faces.empty()) return true;
  Vec2 lo = uv[faces[0][0]], hi = lo;
  for (const Face& f : faces)
    for (int s : f) {
      if (!uv[s].allFinite()) return false;
      lo = lo.cwiseMin(uv[s]);
      hi = hi.cwiseMax(uv[s]);
    }
  double eps = 1e-12 * (hi - lo).prod();
  for (const Face& f : faces)
    if (!(signed_area(uv[f[0]], uv[f[1]], uv[f[2]]) > eps)) return false;
  return true;
}

bool is_simple_loop(const std::vector<Vec2>& uv, const std::vector<int>& loop) {
  const int n = static_cast<int>(loop.size());
  if (n < 3) return false;
  double area = 0;
  for (int a = 0; a < n; ++a) {
    const Vec2& p = uv[loop[a]];
    const Vec2& q = uv[loop[(a + 1) % n]];
    area += p.x() * q.y() - q.x() * p.y();
  }
  if (!(area > 0)) return false;
  for (int a = 0; a < n; ++a) {
    const Vec2& p0 = uv[loop[a]];
    const Vec2& p1 = uv[loop[(a + 1) % n]];
    const Vec2& p2 = uv[loop[(a + 2) % n]];
    if (p0 == p1) return false;
    if (orient(p0, p1, p2) == 0 && (p1 - p0).dot(p2 - p1) < 0) return false;
    for (int b = a + 2; b < n; ++b) {
      if ((b + 1) % n == a) continue;
      if (segments_touch(p0, p1, uv[loop[b]], uv[loop[(b + 1) % n]])) return false;
    }
  }
  return true;
}

bool joint_valid(const JointVariable& joint, const std::vector<Vec2>& uv) {
  return check_uv_validity(uv, joint.before_faces) && check_uv_validity(uv, joint.after_faces) &&
         is_simple_loop(uv, joint.before_loop) && is_simple_loop(uv, joint.after_loop);
}

std::vector<double> quasiconformal_distortion(const std::vector<std::array<Vec3, 3>>& rest,
                                              const std::vector<Face>& faces, const std::vector<Vec2>& uv) {
  std::vector<double> out(faces.size(), std::numeric_limits<double>::infinity());
  Vector x = from_uv(uv);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    Tri t;
    try {
      t = make_tri(faces[f], rest[f]);
    } catch (const NumericalError&) {
      continue;
    }
    Eigen::Matrix2d j = jacobian(t, x);
    if (!(j.determinant() > 0)) continue;
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(j);
    Vec2 sv = svd.singularValues();
    if (sv[1] > 0) out[f] = sv[0] / sv[1];
  }
  return out;
}

double mean_distortion(const JointVariable& joint, const FlattenResult& result) {
  double num = 0, den = 0;
  auto accumulate = [&](const std::vector<std::array<Vec3, 3>>& rest, const std::vector<double>& d) {
    for (std::size_t f = 0; f < rest.size(); ++f) {
      double a = 0.5 * (rest[f][1] - rest[f][0]).cross(rest[f][2] - rest[f][0]).norm();
      num += a * d[f];
      den += a;
    }
  };
  accumulate(joint.before_rest, result.distortion_before);
  accumulate(joint.after_rest, result.distortion_after);
  return num / den;
}

double lscm_energy(const JointVariable& joint, const std::vector<Vec2>& uv) {
  return total(joint_problem(joint), from_uv(uv), tri_lscm);
}

double arap_energy(const JointVariable& joint, const std::vector<Vec2>& uv) {
  return total(joint_problem(joint), from_uv(uv), tri_arap);
}

JointVariable build_joint_variable(const CollapsePatches& cp, JointCase jc) {
  const int i = cp.i, j = cp.j;
  if (jc == JointCase::Colinear && !cp.edge_boundary) throw MeshError("colinear case needs a boundary edge", i);
  if (cp.edge_boundary && jc == JointCase::Interior) throw MeshError("boundary edge needs a snapped or colinear k", i);
  if (!cp.edge_boundary) {
    if (cp.i_boundary && cp.j_boundary) throw MeshError("interior edge joining two boundary vertices", i);
    if (cp.i_boundary && jc != JointCase::KAtI) throw MeshError("k must share the boundary endpoint's slot", i);
    if (cp.j_boundary && jc != JointCase::KAtJ) throw MeshError("k must share the boundary endpoint's slot", j);
  }

  JointVariable jv;
  jv.joint_case = jc;
  const PatchSide& bs = cp.before;
  const PatchSide& as = cp.after;
  const int nb = static_cast<int>(bs.vertices.size());
  jv.before_slot.resize(nb);
  for (int s = 0; s < nb; ++s) jv.before_slot[s] = s;
  jv.num_slots = nb;
  const int slot_i = bs.local(i), slot_j = bs.local(j);
  if (slot_i < 0 || slot_j < 0) throw MeshError("collapse endpoints missing from before patch", i);
  int slot_k = -1;
  switch (jc) {
  case JointCase::KAtI: slot_k = slot_i; break;
  case JointCase::KAtJ: slot_k = slot_j; break;
  default: slot_k = jv.num_slots++; break;
  }
  jv.after_slot.resize(as.vertices.size());
  for (std::size_t s = 0; s < as.vertices.size(); ++s) {
    int v = as.vertices[s];
    if (v == j) {
      jv.after_slot[s] = slot_k;
    } else {
      int b = bs.local(v);
      if (b < 0 || v == i) throw MeshError("after patch vertex missing from before patch", v);
      jv.after_slot[s] = b;
    }
  }

  auto map_faces = [](const PatchSide& side, const std::vector<int>& slot, std::vector<Face>& out,
                      std::vector<std::array<Vec3, 3>>& rest) {
    for (const Face& f : side.faces) {
      Face sf;
      std::array<Vec3, 3> r;
      for (int c = 0; c < 3; ++c) {
        int l = side.local(f[c]);
        sf[c] = slot[l];
        r[c] = side.positions[l];
      }
      out.push_back(sf);
      rest.push_back(r);
    }
  };
  map_faces(bs, jv.before_slot, jv.before_faces, jv.before_rest);
  map_faces(as, jv.after_slot, jv.after_faces, jv.after_rest);
  for (int v : bs.loop) jv.before_loop.push_back(jv.before_slot[bs.local(v)]);
  for (int v : as.loop) jv.after_loop.push_back(jv.after_slot[as.local(v)]);

  // the loops must trace the same slots once the collapsed vertices are ignored
  auto without = [](std::vector<int> loop, std::initializer_list<int> drop) {
    std::erase_if(loop, [&](int s) { return std::find(drop.begin(), drop.end(), s) != drop.end(); });
    return loop;
  };
  bool same = cyclic_equal(without(jv.before_loop, {slot_i, slot_j, slot_k}), without(jv.after_loop, {slot_i, slot_j, slot_k}));
  if (!cp.edge_boundary) same = same && cyclic_equal(jv.before_loop, jv.after_loop);
  if (!same) throw MeshError("before and after patch boundaries differ", i);

  if (!cp.edge_boundary) {
    const std::vector<int>& loop = bs.loop;
    const int m = static_cast<int>(loop.size());
    int a = loop[0], b = loop[m / 2];
    double d = (bs.position_of(a) - bs.position_of(b)).norm();
    jv.pins = {{jv.before_slot[bs.local(a)], Vec2(0, 0)}, {jv.before_slot[bs.local(b)], Vec2(d, 0)}};
    return jv;
  }

  // boundary edge a -> b in loop order, with neighbours p before a and q after b
  const std::vector<int>& loop = bs.loop;
  const int m = static_cast<int>(loop.size());
  int pos_i = static_cast<int>(std::find(loop.begin(), loop.end(), i) - loop.begin());
  int pos_j = static_cast<int>(std::find(loop.begin(), loop.end(), j) - loop.begin());
  if (pos_i == m || pos_j == m) throw MeshError("boundary edge endpoints missing from patch loop", i);
  int pa = loop[(pos_i + 1) % m] == j ? pos_i : pos_j;
  int a = loop[pa], b = loop[(pa + 1) % m];
  int p = loop[(pa + m - 1) % m], q = loop[(pa + 2) % m];
  if (p == q || p == b || q == a) throw MeshError("boundary edge patch too small", i);

  const int k_marker = -1;
  std::vector<int> chain;
  int snapped = jc == JointCase::KAtI ? i : (jc == JointCase::KAtJ ? j : k_marker);
  if (snapped == a)
    chain = {a, b, q};
  else if (snapped == b)
    chain = {p, a, b};
  else
    chain = {p, a, k_marker, b, q};

  double length = 0;
  int prev = -2;
  for (int v : chain) {
    if (v == k_marker) continue;
    if (prev != -2) length += (bs.position_of(v) - bs.position_of(prev)).norm();
    prev = v;
  }
  for (int v : chain) jv.colinear.push_back(v == k_marker ? slot_k : jv.before_slot[bs.local(v)]);
  jv.pins = {{jv.colinear.front(), Vec2(0, 0)}, {jv.colinear.back(), Vec2(length, 0)}};
  return jv;
}

FlattenResult flatten_lscm(const JointVariable& joint) {
  FlattenResult r;
  Vector x = solve_lscm(joint_problem(joint));
  r.uv = to_uv(x);
  r.energy = lscm_energy(joint, r.uv);
  r.iterations = 1;
  finish(joint, r);
  return r;
}

FlattenResult flatten_arap(const JointVariable& joint, const std::vector<Vec2>& init, int max_iters, double tol) {
  if (static_cast<int>(init.size()) != joint.num_slots) throw DimensionError("ARAP initializer has wrong slot count");
  FlattenResult r;
  Problem p = joint_problem(joint);
  Vector x = solve_arap(p, from_uv(init), max_iters, tol, r.energy_history, r.iterations);
  r.uv = to_uv(x);
  r.energy = r.energy_history.back();
  finish(joint, r);
  return r;
}

FlattenResult flatten_joint(const JointVariable& joint, const FlattenConfig& config) {
  FlattenResult r = flatten_lscm(joint);
  if (config.energy == EnergyKind::ARAP) r = flatten_arap(joint, r.uv, config.arap_max_iters, config.arap_tol);
  return r;
}

FlattenResult boundary_collapse_best_of_three(const CollapsePatches& patches, const FlattenConfig& config) {
  if (!patches.edge_boundary) throw Error("best-of-three needs a boundary edge");
  FlattenResult best;
  bool found = false;
  for (JointCase jc : {JointCase::KAtI, JointCase::KAtJ, JointCase::Colinear}) {
    FlattenResult r;
    try {
      r = flatten_joint(build_joint_variable(patches, jc), config);
    } catch (const NumericalError&) {
      continue;
    }
    if (!r.valid) continue;
    if (!found || r.energy < best.energy) {
      best = std::move(r);
      found = true;
    }
  }
  if (!found) throw FlattenError("no valid flattening for boundary edge collapse");
  return best;
}

FlattenResult flatten_collapse(const CollapsePatches& patches, const FlattenConfig& config, bool keep_subset) {
  if (keep_subset) return flatten_joint(build_joint_variable(patches, JointCase::KAtJ), config);
  if (patches.edge_boundary) return boundary_collapse_best_of_three(patches, config);
  JointCase jc = patches.i_boundary ? JointCase::KAtI : (patches.j_boundary ? JointCase::KAtJ : JointCase::Interior);
  return flatten_joint(build_joint_variable(patches, jc), config);
}

FlattenResult flatten_sequential(const JointVariable& joint, EnergyKind energy) {
  Problem first(joint.num_slots);
  add_tris(first, joint.before_faces, joint.before_rest);
  add_constraints(first, joint);
  Vector x = solve_lscm(first);
  std::vector<double> hist;
  int iters = 0;
  if (energy == EnergyKind::ARAP) x = solve_arap(first, x, 10, 1e-6, hist, iters);

  Problem second(joint.num_slots);
  add_tris(second, joint.after_faces, joint.after_rest);
  add_constraints(second, joint);
  for (const Face& f : joint.before_faces)
    for (int s : f) {
      second.fixed[2 * s] = second.fixed[2 * s + 1] = 1;
      second.values.segment<2>(2 * s) = x.segment<2>(2 * s);
    }
  Vector y = solve_lscm(second);
  if (energy == EnergyKind::ARAP) y = solve_arap(second, y, 10, 1e-6, hist, iters);

  FlattenResult r;
  r.uv = to_uv(y);
  r.energy = energy == EnergyKind::LSCM ? lscm_energy(joint, r.uv) : arap_energy(joint, r.uv);
  finish(joint, r);
  return r;
}

} // namespace surfmg
