#pragma once

#include <Eigen/Core>

#include <array>
#include <stdexcept>
#include <string>

namespace surfmg {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vector = Eigen::VectorXd;

/// Vertex-index triple, counter-clockwise.
using Face = std::array<int, 3>;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported input file.
class ParseError : public Error {
public:
  using Error::Error;
};

/// Topology or geometry violation; `index` names the offending vertex/face/edge when known.
class MeshError : public Error {
public:
  MeshError(const std::string& what, int index = -1) : Error(what), index_(index) {}
  int index() const { return index_; }

private:
  int index_;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

/// Zero pivots, singular systems, failed factorizations.
class NumericalError : public Error {
public:
  NumericalError(const std::string& what, int index = -1) : Error(what), index_(index) {}
  int index() const { return index_; }

private:
  int index_;
};

} // namespace surfmg
