#include "surfmg/matrix_market.hpp"
#include "surfmg/obj_io.hpp"
#include "surfmg/selfparam.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace surfmg {

namespace {

constexpr int kFormatVersion = 1;

void write_section(std::ostream& out, const std::string& name, const std::string& body) {
  out << "section " << name << ' ' << body.size() << '\n' << body;
}

EnergyKind parse_energy(const std::string& s) {
  if (s == "lscm") return EnergyKind::LSCM;
  if (s == "arap") return EnergyKind::ARAP;
  throw ParseError("unknown flattening energy: " + s);
}

} // namespace

void save_hierarchy(const Hierarchy& h, std::ostream& out) {
  using nlohmann::json;
  const auto& dc = h.config.decimation;
  json header = {
      {"format", "ssph"},
      {"version", kFormatVersion},
      {"levels", h.levels()},
      {"fine_vertices", h.fine.num_vertices()},
      {"fine_faces", h.fine.num_faces()},
      {"coarse_vertices", h.coarse.num_vertices()},
      {"coarse_faces", h.coarse.num_faces()},
      {"target_sizes", h.target_sizes},
      {"level_sizes", h.level_sizes},
      {"level_faces", h.level_faces},
      {"level_records", h.level_records},
      {"config",
       {{"ratio", h.config.ratio},
        {"min_vertices", h.config.min_vertices},
        {"strategy", to_string(dc.strategy)},
        {"energy", to_string(dc.flatten.energy)},
        {"arap_max_iters", dc.flatten.arap_max_iters},
        {"arap_tol", dc.flatten.arap_tol},
        {"max_retries", dc.max_retries},
        {"retry_inflation", dc.retry_inflation}}},
      {"provenance", {{"generator", "surfmg"}, {"generator_version", "0.1.0"}}},
      {"warnings", h.warnings},
  };
  out << "ssph " << kFormatVersion << '\n';
  write_section(out, "header", header.dump(2) + "\n");
  write_section(out, "fine_mesh", to_obj_string(h.fine));
  write_section(out, "coarse_mesh", to_obj_string(h.coarse));
  for (int l = 0; l < h.levels(); ++l) {
    std::ostringstream mm;
    write_matrix_market(mm, h.prolongations[l]);
    write_section(out, "prolongation " + std::to_string(l + 1), mm.str());
  }
  std::ostringstream map;
  map << std::setprecision(17) << "fine_vertex,coarse_face,w1,w2,w3\n";
  for (std::size_t v = 0; v < h.fine_to_coarse.size(); ++v) {
    const auto& p = h.fine_to_coarse[v];
    map << v << ',' << p.face << ',' << p.w[0] << ',' << p.w[1] << ',' << p.w[2] << '\n';
  }
  write_section(out, "map", map.str());
}

void save_hierarchy(const Hierarchy& h, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  save_hierarchy(h, out);
  if (!out) throw Error("failed writing " + path);
}

Hierarchy load_hierarchy(std::istream& in) {
  using nlohmann::json;
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "ssph") throw ParseError("not an ssph hierarchy file");
  if (version != kFormatVersion) throw ParseError("unsupported ssph version " + std::to_string(version));
  in.ignore(1);

  Hierarchy h;
  json header;
  bool have_header = false, have_fine = false, have_coarse = false;
  std::map<int, SparseMatrix> pro;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word, name;
    ls >> word >> name;
    if (word != "section") throw ParseError("expected a section line, got: " + line);
    int level = 0;
    if (name == "prolongation") ls >> level;
    std::size_t size = 0;
    if (!(ls >> size)) throw ParseError("section '" + name + "' lacks a byte count");
    std::string body(size, '\0');
    if (!in.read(body.data(), static_cast<std::streamsize>(size))) throw ParseError("truncated section '" + name + "'");
    std::istringstream bs(body);
    if (name == "header") {
      try {
        header = json::parse(body);
      } catch (const json::exception& e) {
        throw ParseError(std::string("bad ssph header: ") + e.what());
      }
      have_header = true;
    } else if (name == "fine_mesh" || name == "coarse_mesh") {
      ObjData d = parse_obj(bs);
      SurfaceMesh m(std::move(d.vertices), std::move(d.faces));
      (name == "fine_mesh" ? h.fine : h.coarse) = std::move(m);
      (name == "fine_mesh" ? have_fine : have_coarse) = true;
    } else if (name == "prolongation") {
      pro[level] = read_matrix_market(bs);
    } else if (name == "map") {
      std::getline(bs, line);
      while (std::getline(bs, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        int v = 0;
        BarycentricPoint p;
        if (!(row >> v >> p.face >> p.w[0] >> p.w[1] >> p.w[2])) throw ParseError("bad map row: " + line);
        h.fine_to_coarse.push_back(p);
      }
    }
  }
  if (!have_header || !have_fine || !have_coarse) throw ParseError("ssph file is missing required sections");

  try {
    const json& c = header.at("config");
    h.config.ratio = c.at("ratio");
    h.config.min_vertices = c.at("min_vertices");
    h.config.decimation.strategy = parse_strategy(c.at("strategy"));
    h.config.decimation.flatten.energy = parse_energy(c.at("energy"));
    h.config.decimation.flatten.arap_max_iters = c.at("arap_max_iters");
    h.config.decimation.flatten.arap_tol = c.at("arap_tol");
    h.config.decimation.max_retries = c.at("max_retries");
    h.config.decimation.retry_inflation = c.at("retry_inflation");
    h.target_sizes = header.at("target_sizes").get<std::vector<int>>();
    h.level_sizes = header.at("level_sizes").get<std::vector<int>>();
    h.level_faces = header.at("level_faces").get<std::vector<int>>();
    h.level_records = header.at("level_records").get<std::vector<int>>();
    h.warnings = header.at("warnings").get<std::vector<std::string>>();
    const int levels = header.at("levels");
    for (int l = 1; l <= levels; ++l) {
      auto it = pro.find(l);
      if (it == pro.end()) throw ParseError("missing prolongation " + std::to_string(l));
      h.prolongations.push_back(std::move(it->second));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad ssph header: ") + e.what());
  }

  if (h.fine.num_vertices() != h.level_sizes.front()) throw ParseError("fine mesh size disagrees with header");
  for (int l = 0; l < h.levels(); ++l) {
    const SparseMatrix& p = h.prolongations[l];
    if (p.rows() != h.level_sizes[l] || p.cols() != h.level_sizes[l + 1])
      throw ParseError("prolongation " + std::to_string(l + 1) + " has wrong dimensions");
  }
  return h;
}

Hierarchy load_hierarchy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  return load_hierarchy(in);
}

} // namespace surfmg
