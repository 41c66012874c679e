#include "surfmg/obj_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace surfmg {

namespace {

int parse_index(const std::string& token, int vertex_count, int line_no) {
  std::string head = token.substr(0, token.find('/'));
  int idx = 0;
  auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
  if (ec != std::errc() || ptr != head.data() + head.size() || idx == 0)
    throw ParseError("line " + std::to_string(line_no) + ": bad face index '" + token + "'");
  return idx > 0 ? idx - 1 : vertex_count + idx;
}

} // namespace

ObjData parse_obj(std::istream& in) {
  ObjData data;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z))
        throw ParseError("line " + std::to_string(line_no) + ": malformed vertex record");
      data.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) idx.push_back(parse_index(tok, static_cast<int>(data.vertices.size()), line_no));
      if (idx.size() != 3)
        throw ParseError("line " + std::to_string(line_no) + ": only triangular faces are supported (got " +
                         std::to_string(idx.size()) + " corners)");
      for (int i : idx)
        if (i < 0 || i >= static_cast<int>(data.vertices.size()))
          throw ParseError("line " + std::to_string(line_no) + ": face index out of range");
      data.faces.push_back({idx[0], idx[1], idx[2]});
    }
  }
  return data;
}

SurfaceMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  ObjData data = parse_obj(in);
  if (data.faces.empty()) throw ParseError("'" + path.string() + "' contains no faces");
  return SurfaceMesh(std::move(data.vertices), std::move(data.faces));
}

void write_obj(std::ostream& out, const std::vector<Vec3>& vertices, const std::vector<Face>& faces) {
  out << std::setprecision(17);
  for (const Vec3& p : vertices) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const Face& t : faces) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_obj(const std::filesystem::path& path, const SurfaceMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_obj(out, mesh.vertices(), mesh.faces());
}

std::string to_obj_string(const SurfaceMesh& mesh) {
  std::ostringstream ss;
  write_obj(ss, mesh.vertices(), mesh.faces());
  return ss.str();
}

std::vector<double> read_scalar_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::size_t used = 0;
    try {
      values.push_back(std::stod(line, &used));
    } catch (const std::exception&) {
      // tolerate a single header line
      if (values.empty() && line_no == 1) continue;
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": not a number");
    }
  }
  return values;
}

void write_scalar_csv(const std::filesystem::path& path, const Vector& values) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < values.size(); ++i) out << values[i] << '\n';
}

} // namespace surfmg
