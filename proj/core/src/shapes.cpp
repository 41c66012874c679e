#include "surfmg/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace surfmg::shapes {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Face> grid_faces(int nx, int ny, bool alternate, int stride) {
  std::vector<Face> faces;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int a = j * stride + i, b = a + 1, c = a + stride + 1, d = a + stride;
      if (alternate && (i + j) % 2 == 1) {
        faces.push_back({a, b, d});
        faces.push_back({b, c, d});
      } else {
        faces.push_back({a, b, c});
        faces.push_back({a, c, d});
      }
    }
  return faces;
}

} // namespace

SurfaceMesh icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : v) p.normalize();
  std::vector<Face> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                         {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                         {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  return SurfaceMesh(std::move(v), std::move(f));
}

SurfaceMesh icosphere(int levels) {
  SurfaceMesh base = icosahedron();
  std::vector<Vec3> v = base.vertices();
  std::vector<Face> f = base.faces();
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      int id = static_cast<int>(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<Face> next;
    next.reserve(4 * f.size());
    for (const Face& t : f) {
      int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  return SurfaceMesh(std::move(v), std::move(f));
}

SurfaceMesh grid(int nx, int ny, double width, double height, bool alternate) {
  std::vector<Vec3> v;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) v.emplace_back(width * i / nx, height * j / ny, 0.0);
  return SurfaceMesh(std::move(v), grid_faces(nx, ny, alternate, nx + 1));
}

SurfaceMesh height_field(int nx, int ny, const std::function<double(double, double)>& h) {
  std::vector<Vec3> v;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      double x = static_cast<double>(i) / nx, y = static_cast<double>(j) / ny;
      v.emplace_back(x, y, h(x, y));
    }
  return SurfaceMesh(std::move(v), grid_faces(nx, ny, false, nx + 1));
}

SurfaceMesh annulus(int rings, int segments, double inner, double outer) {
  std::vector<Vec3> v;
  for (int r = 0; r <= rings; ++r) {
    double rad = inner + (outer - inner) * r / rings;
    for (int s = 0; s < segments; ++s) {
      double a = 2 * kPi * (s + 0.5 * (r % 2)) / segments;
      v.emplace_back(rad * std::cos(a), rad * std::sin(a), 0.0);
    }
  }
  std::vector<Face> f;
  for (int r = 0; r < rings; ++r)
    for (int s = 0; s < segments; ++s) {
      int a = r * segments + s, b = r * segments + (s + 1) % segments;
      int c = (r + 1) * segments + (s + 1) % segments, d = (r + 1) * segments + s;
      if (r % 2 == 0) {
        f.push_back({a, b, d});
        f.push_back({b, c, d});
      } else {
        f.push_back({a, b, c});
        f.push_back({a, c, d});
      }
    }
  return SurfaceMesh(std::move(v), std::move(f));
}

SurfaceMesh cylinder(int rings, int segments, double radius, double length) {
  std::vector<Vec3> v;
  for (int r = 0; r <= rings; ++r)
    for (int s = 0; s < segments; ++s) {
      double a = 2 * kPi * (s + 0.5 * (r % 2)) / segments;
      v.emplace_back(radius * std::cos(a), radius * std::sin(a), length * r / rings);
    }
  std::vector<Face> f;
  for (int r = 0; r < rings; ++r)
    for (int s = 0; s < segments; ++s) {
      int a = r * segments + s, b = r * segments + (s + 1) % segments;
      int c = (r + 1) * segments + (s + 1) % segments, d = (r + 1) * segments + s;
      if (r % 2 == 0) {
        f.push_back({a, b, d});
        f.push_back({b, c, d});
      } else {
        f.push_back({a, b, c});
        f.push_back({a, c, d});
      }
    }
  return SurfaceMesh(std::move(v), std::move(f));
}

SurfaceMesh torus(int nu, int nv, double major, double minor) {
  std::vector<Vec3> v;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      double u = 2 * kPi * i / nu, w = 2 * kPi * (j + 0.5 * (i % 2)) / nv;
      double r = major + minor * std::cos(w);
      v.emplace_back(r * std::cos(u), r * std::sin(u), minor * std::sin(w));
    }
  std::vector<Face> f;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      int i1 = (i + 1) % nu, j1 = (j + 1) % nv;
      int a = i * nv + j, b = i1 * nv + j, c = i1 * nv + j1, d = i * nv + j1;
      f.push_back({a, b, c});
      f.push_back({a, c, d});
    }
  return SurfaceMesh(std::move(v), std::move(f));
}

SurfaceMesh bumpy_sphere(int levels, double amplitude) {
  SurfaceMesh s = icosphere(levels);
  std::vector<Vec3> v = s.vertices();
  for (Vec3& p : v) {
    double bump = std::sin(3 * p.x() + 1.0) * std::cos(2 * p.y() - 0.5) + 0.5 * std::sin(5 * p.z() + 2 * p.x());
    p *= 1.0 + amplitude * bump;
    p.x() *= 1.2; // mild anisotropy
  }
  return SurfaceMesh(std::move(v), s.faces());
}

SurfaceMesh sphere_cap(int levels, double cut) {
  SurfaceMesh s = icosphere(levels);
  std::vector<Face> kept;
  for (const Face& t : s.faces()) {
    bool above = true;
    for (int c : t) above = above && s.position(c).z() > cut;
    if (above) kept.push_back(t);
  }
  return compact(s.vertices(), kept);
}

SurfaceMesh triangular_bipyramid() {
  std::vector<Vec3> v = {{0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {-0.5, 0.8660254037844386, 0},
                         {-0.5, -0.8660254037844386, 0}};
  // top = 0, bottom = 1, equator = 2,3,4
  std::vector<Face> f = {{0, 2, 3}, {0, 3, 4}, {0, 4, 2}, {1, 3, 2}, {1, 4, 3}, {1, 2, 4}};
  return SurfaceMesh(std::move(v), std::move(f));
}

SurfaceMesh compact(const std::vector<Vec3>& vertices, const std::vector<Face>& faces) {
  std::vector<int> remap(vertices.size(), -1);
  std::vector<Vec3> v;
  std::vector<Face> f;
  for (const Face& t : faces) {
    Face out{};
    for (int c = 0; c < 3; ++c) {
      if (remap[t[c]] < 0) {
        remap[t[c]] = static_cast<int>(v.size());
        v.push_back(vertices[t[c]]);
      }
      out[c] = remap[t[c]];
    }
    f.push_back(out);
  }
  return SurfaceMesh(std::move(v), std::move(f));
}

} // namespace surfmg::shapes
