#include "manifest.hpp"

#include <surfmg/common.hpp>

#include <Eigen/Core>

#include <fstream>

namespace surfmg::cli {

Manifest::Manifest(const std::string& subcommand) {
  data["subcommand"] = subcommand;
  data["versions"] = {
      {"surfmg", "0.1.0"},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"compiler", __VERSION__},
  };
}

void Manifest::write(const std::string& primary_output) const {
  const std::string path = primary_output + ".manifest.json";
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << data.dump(2) << '\n';
}

} // namespace surfmg::cli
