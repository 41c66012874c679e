#pragma once

#include <json.hpp>

#include <chrono>
#include <string>

namespace surfmg::cli {

/// Run record written as `<primary output>.manifest.json`.
struct Manifest {
  nlohmann::ordered_json data;

  explicit Manifest(const std::string& subcommand);

  void write(const std::string& primary_output) const;
};

class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

} // namespace surfmg::cli
