#pragma once

#include "surfmg/sparse.hpp"

#include <vector>

namespace surfmg {

/// Proper coloring of the symmetrized off-diagonal pattern of a matrix.
struct Coloring {
  std::vector<int> color;         ///< color id per node
  int count = 0;                  ///< number of colors k
  std::vector<int> order;         ///< order[new] = old, nodes grouped by color
  std::vector<int> color_offsets; ///< color c occupies order[color_offsets[c] .. color_offsets[c+1])
};

/// Greedy coloring: nodes are visited by descending degree (ties by ascending
/// index); each takes the first palette color unused by its painted
/// neighbours, which is then moved to the back of the palette. A new color is
/// appended when none is free.
Coloring greedy_color(const SparseMatrix& a);

/// Symmetrized adjacency lists of the off-diagonal nonzeros.
std::vector<std::vector<int>> adjacency(const SparseMatrix& a);

bool is_proper(const Coloring& coloring, const SparseMatrix& a);

} // namespace surfmg
