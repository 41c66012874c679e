#pragma once

#include "surfmg/mesh.hpp"

#include <functional>

namespace surfmg::shapes {

/// Regular icosahedron inscribed in the unit sphere.
SurfaceMesh icosahedron();

/// Icosahedron subdivided `levels` times (1-to-4 split, projected to the unit
/// sphere): 10 * 4^levels + 2 vertices.
SurfaceMesh icosphere(int levels);

/// Flat regular grid on [0, width] x [0, height] with (nx+1)(ny+1) vertices.
/// `alternate` flips the diagonal in a checkerboard, giving valence-6/valence-4
/// mixes; false yields the regular valence-6 pattern in the interior.
SurfaceMesh grid(int nx, int ny, double width = 1.0, double height = 1.0, bool alternate = false);

/// Grid displaced along z by `height(x, y)`.
SurfaceMesh height_field(int nx, int ny, const std::function<double(double, double)>& height);

/// Flat annulus with `rings` x `segments` quads split into triangles.
SurfaceMesh annulus(int rings, int segments, double inner = 0.5, double outer = 1.0);

/// Open cylinder (two boundary loops).
SurfaceMesh cylinder(int rings, int segments, double radius = 0.5, double length = 1.0);

SurfaceMesh torus(int major_segments, int minor_segments, double major = 1.0, double minor = 0.35);

/// Icosphere with a smooth radial bump field: a deterministic stand-in for
/// organic scanned shapes.
SurfaceMesh bumpy_sphere(int levels, double amplitude = 0.15);

/// Upper part of an icosphere (z > cut), re-indexed; open mesh with one boundary loop.
SurfaceMesh sphere_cap(int levels, double cut = 0.0);

/// Two tetrahedral caps glued along a triangle (the triangle itself is not a face).
SurfaceMesh triangular_bipyramid();

/// Removes unreferenced vertices and re-indexes faces.
SurfaceMesh compact(const std::vector<Vec3>& vertices, const std::vector<Face>& faces);

} // namespace surfmg::shapes
