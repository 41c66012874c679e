#include "support.hpp"

#include <doctest.h>

#include <surfmg/obj_io.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace surfmg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "surfmg_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string serialized(const Hierarchy& h) {
  std::ostringstream out;
  save_hierarchy(h, out);
  return out.str();
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("hierarchy round trip") {
  const Hierarchy& h = testing::regression_hierarchy(0, 100);
  REQUIRE(h.levels() >= 1);
  std::string bytes = serialized(h);
  std::istringstream in(bytes);
  Hierarchy back = load_hierarchy(in);
  CHECK(back.level_sizes == h.level_sizes);
  CHECK(back.target_sizes == h.target_sizes);
  CHECK(back.fine.vertices() == h.fine.vertices());
  CHECK(back.fine.faces() == h.fine.faces());
  CHECK(back.coarse.faces() == h.coarse.faces());
  REQUIRE(back.prolongations.size() == h.prolongations.size());
  for (std::size_t l = 0; l < h.prolongations.size(); ++l)
    CHECK(testing::max_relative_entry_difference(back.prolongations[l], h.prolongations[l]) == 0.0);
  REQUIRE(back.fine_to_coarse.size() == h.fine_to_coarse.size());
  for (std::size_t v = 0; v < h.fine_to_coarse.size(); ++v) {
    CHECK(back.fine_to_coarse[v].face == h.fine_to_coarse[v].face);
    CHECK(back.fine_to_coarse[v].w == h.fine_to_coarse[v].w);
  }
  CHECK(back.config.ratio == h.config.ratio);
  CHECK(back.config.min_vertices == h.config.min_vertices);
  // saving again reproduces the bytes
  CHECK(serialized(back) == bytes);

  fs::path p = scratch("round.ssph");
  save_hierarchy(h, p.string());
  CHECK(load_hierarchy(p.string()).level_sizes == h.level_sizes);
}

TEST_CASE("identical inputs give identical hierarchy bytes") {
  HierarchyConfig cfg;
  cfg.min_vertices = 60;
  SurfaceMesh m = shapes::bumpy_sphere(2);
  CHECK(serialized(build_hierarchy(m, cfg)) == serialized(build_hierarchy(m, cfg)));
}

TEST_CASE("corrupt hierarchy files are rejected") {
  const Hierarchy& h = testing::regression_hierarchy(0, 100);
  std::string bytes = serialized(h);

  std::istringstream empty("");
  CHECK_THROWS_AS(load_hierarchy(empty), ParseError);
  std::istringstream wrong("obj 1\n");
  CHECK_THROWS_AS(load_hierarchy(wrong), ParseError);
  std::istringstream future("ssph 999\n");
  CHECK_THROWS_AS(load_hierarchy(future), ParseError);
  std::istringstream truncated(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(load_hierarchy(truncated), ParseError);

  std::string broken = bytes;
  auto pos = broken.find("\"level_sizes\"");
  REQUIRE(pos != std::string::npos);
  broken[pos + 1] = 'X';
  std::istringstream bad_header(broken);
  CHECK_THROWS_AS(load_hierarchy(bad_header), ParseError);

  CHECK_THROWS_AS(load_hierarchy(scratch("missing.ssph").string() + ".nope"), ParseError);
}

TEST_CASE("scalar csv") {
  fs::path p = scratch("values.csv");
  Vector v(4);
  v << 0.1, -2.5, 1e-300, 3.0 / 7.0;
  write_scalar_csv(p, v);
  auto back = read_scalar_csv(p);
  REQUIRE(back.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(back[i] == v[i]);

  {
    std::ofstream out(p);
    out << "value\n1\n\n# note\n2.5\n";
  }
  CHECK(read_scalar_csv(p) == std::vector<double>{1.0, 2.5});
  {
    std::ofstream out(p);
    out << "1\nabc\n";
  }
  CHECK_THROWS_AS(read_scalar_csv(p), ParseError);
  CHECK_THROWS_AS(read_scalar_csv(scratch("absent.csv")), ParseError);
}

TEST_CASE("obj file round trip") {
  SurfaceMesh m = shapes::torus(10, 6);
  fs::path p = scratch("torus.obj");
  write_obj(p, m);
  SurfaceMesh back = load_obj(p);
  CHECK(back.faces() == m.faces());
  CHECK(back.vertices() == m.vertices());
}

} // TEST_SUITE
