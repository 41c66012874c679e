#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <surfmg/obj_io.hpp>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace surfmg;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

fs::path workdir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "surfmg_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

Run run(const std::string& args) {
  const std::string out = path("stdout.txt"), err = path("stderr.txt");
  const std::string cmd = std::string("\"") + SURFMG_CLI_PATH + "\" " + args + " >\"" + out + "\" 2>\"" + err + "\"";
  int status = std::system(cmd.c_str());
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(out), slurp(err)};
}

json manifest(const std::string& primary) { return json::parse(slurp(primary + ".manifest.json")); }

/// OBJ file plus a built hierarchy, cached by name.
std::string hierarchy_for(const std::string& name, const SurfaceMesh& mesh, const std::string& flags) {
  static std::set<std::string> built;
  const std::string h = path(name + ".ssph");
  if (built.insert(name).second) {
    write_obj(path(name + ".obj"), mesh);
    Run r = run("build --input " + path(name + ".obj") + " --out " + h + " " + flags);
    REQUIRE(r.code == 0);
  }
  return h;
}

std::string sphere_hierarchy() { return hierarchy_for("sphere", shapes::icosphere(3), "--min-verts 100"); }
std::string grid_hierarchy() { return hierarchy_for("grid500", shapes::grid(19, 24), "--min-verts 100"); }

Vector read_csv(const std::string& p) {
  auto v = read_scalar_csv(p);
  return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<std::vector<std::string>> read_table(const std::string& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors") {
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("build --input x.obj").code == 1);
  CHECK(run("build --input x.obj --out y.ssph --decimation random").code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("build") {
  SUBCASE("icosahedron below the floor") {
    write_obj(path("ico.obj"), shapes::icosahedron());
    Run r = run("build --input " + path("ico.obj") + " --out " + path("ico.ssph"));
    CHECK(r.code == 0);
    CHECK(r.err.find("below floor") != std::string::npos);
    CHECK(r.out.find("levels: 12") != std::string::npos);
    json m = manifest(path("ico.ssph"));
    CHECK(m["subcommand"] == "build");
    CHECK(m["config"]["ratio"] == 0.25);
    CHECK(m["config"]["min_vertices"] == 500);
    CHECK(m["config"]["level_sizes"] == json::array({12}));
  }
  SUBCASE("eight thousand vertices") {
    SurfaceMesh g = shapes::grid(79, 99);
    REQUIRE(g.num_vertices() == 8000);
    write_obj(path("g8000.obj"), g);
    Run r = run("build --input " + path("g8000.obj") + " --out " + path("g8000.ssph"));
    CHECK(r.code == 0);
    CHECK(r.out.find("levels: 8000 → 2000 → 500") != std::string::npos);
  }
  SUBCASE("unreadable input") {
    {
      std::ofstream bad(path("bad.obj"));
      bad << "v 0 0 0\nv 1 0 0\nf 1 2 9\n";
    }
    Run r = run("build --input " + path("bad.obj") + " --out " + path("bad.ssph"));
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
    CHECK(run("build --input " + path("nowhere.obj") + " --out " + path("bad.ssph")).code == 2);
  }
}

TEST_CASE("solve") {
  const std::string h = grid_hierarchy();
  const SurfaceMesh mesh = shapes::grid(19, 24);
  const int n = mesh.num_vertices();

  SUBCASE("zero right-hand side") {
    write_scalar_csv(path("zero.csv"), Vector::Zero(n));
    Run r = run("solve --hierarchy " + h + " --rhs " + path("zero.csv") + " --out " + path("x0.csv") + " --report " +
                path("c0.csv"));
    CHECK(r.code == 0);
    CHECK(read_csv(path("x0.csv")).cwiseAbs().maxCoeff() == 0.0);
    CHECK(manifest(path("x0.csv"))["result"]["cycles"] == 0);
  }
  SUBCASE("tolerance above the initial residual") {
    write_scalar_csv(path("f.csv"), testing::smooth_function(mesh));
    Run r = run("solve --hierarchy " + h + " --rhs " + path("f.csv") + " --tol 2 --out " + path("xt.csv") +
                " --report " + path("ct.csv"));
    CHECK(r.code == 0);
    CHECK(read_csv(path("xt.csv")).cwiseAbs().maxCoeff() == 0.0);
    CHECK(read_table(path("ct.csv")).size() == 2);
  }
  SUBCASE("constrained solve matches the dense oracle") {
    Vector f = testing::smooth_function(mesh);
    write_scalar_csv(path("f.csv"), f);
    std::vector<int> idx;
    for (int v = 0; v < n; ++v)
      if (mesh.is_boundary_vertex(v)) idx.push_back(v);
    Vector iv(static_cast<Eigen::Index>(idx.size())), vals(iv.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      iv[static_cast<Eigen::Index>(k)] = idx[k];
      vals[static_cast<Eigen::Index>(k)] = mesh.position(idx[k]).x() * mesh.position(idx[k]).y();
    }
    write_scalar_csv(path("idx.csv"), iv);
    write_scalar_csv(path("vals.csv"), vals);
    Run r = run("solve --hierarchy " + h + " --rhs " + path("f.csv") + " --tol 1e-12 --max-cycles 200 --dirichlet " +
                path("idx.csv") + " " + path("vals.csv") + " --out " + path("xd.csv") + " --report " +
                path("cd.csv"));
    CHECK(r.code == 0);
    Vector ref = testing::dense_constrained_solve(cotan_laplacian(mesh), spmv(lumped_mass(mesh), f), idx, vals);
    CHECK(testing::relative_error(read_csv(path("xd.csv")), ref) < 1e-10);
    auto table = read_table(path("cd.csv"));
    CHECK(table[0] == std::vector<std::string>{"cycle", "residual", "cumulative_ms"});
  }
  SUBCASE("non-convergence keeps the best iterate") {
    write_scalar_csv(path("f.csv"), testing::smooth_function(mesh));
    Run r = run("solve --hierarchy " + h + " --rhs " + path("f.csv") + " --tol 1e-15 --max-cycles 1 --out " +
                path("xn.csv") + " --report " + path("cn.csv"));
    CHECK(r.code == 3);
    CHECK(read_csv(path("xn.csv")).size() == n);
  }
  SUBCASE("dimension mismatch") {
    write_scalar_csv(path("short.csv"), Vector::Ones(5));
    CHECK(run("solve --hierarchy " + h + " --rhs " + path("short.csv") + " --out " + path("xs.csv")).code == 2);
  }
}

TEST_CASE("smooth") {
  const std::string h = sphere_hierarchy();
  const SurfaceMesh mesh = shapes::icosphere(3);
  std::mt19937 rng(5);
  std::normal_distribution<double> noise(0.0, 0.3);
  Vector f = testing::smooth_function(mesh);
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] += noise(rng);
  write_scalar_csv(path("noisy.csv"), f);
  const std::string list = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  Run r = run("smooth --hierarchy " + h + " --fn " + path("noisy.csv") + " --alpha-list " + list +
              " --tol 1e-10 --out-prefix " + path("sm"));
  REQUIRE(r.code == 0);
  json m = manifest(path("sm"));
  CHECK(m["sweep"]["galerkin_triple_products"] == 0);
  CHECK(m["setup"].contains("ms"));
  REQUIRE(m["sweep"]["runs"].size() == 10);

  CHECK(testing::relative_error(read_csv(path("sm.alpha_0.csv")), f) < 1e-9);
  SparseMatrix l = cotan_laplacian(mesh);
  double prev = std::numeric_limits<double>::infinity();
  for (const json& run_entry : m["sweep"]["runs"]) {
    Vector x = read_csv(run_entry["output"].get<std::string>());
    double e = x.dot(spmv(l, x));
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("flow") {
  const std::string h = sphere_hierarchy();
  Run zero = run("flow --hierarchy " + h + " --steps 0 --out-prefix " + path("fz"));
  REQUIRE(zero.code == 0);
  SurfaceMesh copy = load_obj(path("fz_0000.obj"));
  SurfaceMesh mesh = shapes::icosphere(3);
  CHECK(copy.faces() == mesh.faces());
  for (int v = 0; v < mesh.num_vertices(); ++v) CHECK((copy.position(v) - mesh.position(v)).norm() < 1e-15);

  const std::string bumpy = hierarchy_for("bumpy", shapes::bumpy_sphere(3), "--min-verts 100");
  Run r = run("flow --hierarchy " + bumpy + " --steps 4 --delta 1e-3 --tol 1e-10 --out-prefix " + path("fb"));
  REQUIRE(r.code == 0);
  json m = manifest(path("fb"));
  CHECK(m["hierarchy_builds"] == 1);
  REQUIRE(m["steps"].size() == 4);
  double prev = sphericity_error(positions_of(shapes::bumpy_sphere(3)));
  for (int s = 1; s <= 4; ++s) {
    double e = sphericity_error(positions_of(load_obj(path("fb_000" + std::to_string(s) + ".obj"))));
    CHECK(e <= prev);
    prev = e;
  }

  const std::string open = grid_hierarchy();
  CHECK(run("flow --hierarchy " + open + " --steps 1 --out-prefix " + path("fo")).code == 2);
}

TEST_CASE("bench") {
  const std::string h = sphere_hierarchy();
  Run r = run("bench --hierarchy " + h + " --baselines gs,onering --out " + path("bench.csv"));
  REQUIRE(r.code == 0);
  auto table = read_table(path("bench.csv"));
  REQUIRE(!table.empty());
  CHECK(table[0] == std::vector<std::string>{"method", "cycle", "residual", "cumulative_ms"});
  std::set<std::string> methods;
  for (std::size_t i = 1; i < table.size(); ++i) {
    REQUIRE(table[i].size() == 4);
    methods.insert(table[i][0]);
  }
  CHECK(methods == std::set<std::string>{"intrinsic", "gs", "onering"});
  json m = manifest(path("bench.csv"));
  CHECK(m["methods"]["intrinsic"]["converged"] == true);
  CHECK(m["methods"]["intrinsic"]["cycles"].get<int>() <= m["methods"]["onering"]["cycles"].get<int>());
  CHECK(m["methods"]["intrinsic"]["phases"].contains("relax_ms"));
}

TEST_CASE("export-map") {
  const std::string h = sphere_hierarchy();
  Run r = run("export-map --hierarchy " + h + " --out " + path("map.csv"));
  REQUIRE(r.code == 0);
  auto table = read_table(path("map.csv"));
  CHECK(table[0] == std::vector<std::string>{"vertex", "face", "w1", "w2", "w3"});
  CHECK(table.size() == 642 + 1);
  for (std::size_t i = 1; i < table.size(); ++i) {
    double s = std::stod(table[i][2]) + std::stod(table[i][3]) + std::stod(table[i][4]);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }

  REQUIRE(run("export-map --hierarchy " + path("ico.ssph") + " --out " + path("imap.csv")).code == 0);
  SurfaceMesh ico = shapes::icosahedron();
  auto itable = read_table(path("imap.csv"));
  REQUIRE(itable.size() == 13);
  for (int v = 0; v < 12; ++v) {
    const auto& row = itable[static_cast<std::size_t>(v + 1)];
    const Face& f = ico.face(std::stoi(row[1]));
    int corner = static_cast<int>(std::find(f.begin(), f.end(), v) - f.begin());
    REQUIRE(corner < 3);
    CHECK(std::stod(row[2 + corner]) == 1.0);
  }
  CHECK(fs::exists(path("imap.csv") + ".manifest.json"));
}

} // TEST_SUITE
