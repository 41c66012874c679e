#pragma once

#include "surfmg/mesh.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace surfmg {

/// Raw vertex/face arrays as read from an OBJ file, before validation.
struct ObjData {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
};

/// Parses the `v` and `f` records of an ASCII OBJ stream; everything else is
/// ignored. `f a/b/c` keeps the vertex index only, negative indices are
/// resolved relative to the current vertex count. Faces with more than three
/// corners are rejected.
ObjData parse_obj(std::istream& in);

/// Reads and validates a mesh. Throws ParseError or MeshError.
SurfaceMesh load_obj(const std::filesystem::path& path);

void write_obj(std::ostream& out, const std::vector<Vec3>& vertices, const std::vector<Face>& faces);
void write_obj(const std::filesystem::path& path, const SurfaceMesh& mesh);
std::string to_obj_string(const SurfaceMesh& mesh);

/// Single-column per-vertex scalar CSV.
std::vector<double> read_scalar_csv(const std::filesystem::path& path);
void write_scalar_csv(const std::filesystem::path& path, const Vector& values);

} // namespace surfmg
