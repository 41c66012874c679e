#pragma once

#include "surfmg/coloring.hpp"

namespace surfmg {

enum class Ordering { Natural, Colored };

/// In-place forward Gauss-Seidel sweeps in natural row order.
/// Throws NumericalError naming the row of a zero diagonal.
void gauss_seidel(const SparseMatrix& a, Vector& x, const Vector& b, int sweeps);

/// Functional form; the colored ordering builds a coloring on the fly.
Vector gauss_seidel(const SparseMatrix& a, Vector x, const Vector& b, int sweeps, Ordering ordering);

/// Multi-color Gauss-Seidel.
///
/// The matrix is reordered once so that each color forms a contiguous block;
/// a sweep then visits the colors in order. Rows of one color never read each
/// other, so with `threads > 1` a color block is split across threads and the
/// iterates are bitwise identical to the single-threaded sweep, which in turn
/// equals natural Gauss-Seidel on the permuted system.
class ColoredGaussSeidel {
public:
  ColoredGaussSeidel() = default;
  explicit ColoredGaussSeidel(const SparseMatrix& a);
  ColoredGaussSeidel(const SparseMatrix& a, Coloring coloring);

  void relax(Vector& x, const Vector& b, int sweeps, int threads = 1) const;

  const Coloring& coloring() const { return coloring_; }
  const SparseMatrix& permuted() const { return permuted_; }

private:
  Coloring coloring_;
  SparseMatrix permuted_;
};

/// x <- x + omega D^{-1} (b - A x), repeated `sweeps` times.
void damped_jacobi(const SparseMatrix& a, Vector& x, const Vector& b, int sweeps, double omega);

} // namespace surfmg
