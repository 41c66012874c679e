#include "surfmg/coloring.hpp"

#include <algorithm>
#include <numeric>

namespace surfmg {

std::vector<std::vector<int>> adjacency(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("coloring: matrix must be square");
  std::vector<std::vector<int>> adj(a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j : a.row_indices(i))
      if (j != i) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
  for (auto& n : adj) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  return adj;
}

Coloring greedy_color(const SparseMatrix& a) {
  const auto adj = adjacency(a);
  const int n = a.rows();

  std::vector<int> nodes(n);
  std::iota(nodes.begin(), nodes.end(), 0);
  std::stable_sort(nodes.begin(), nodes.end(),
                   [&](int x, int y) { return adj[x].size() > adj[y].size(); });

  Coloring out;
  out.color.assign(n, -1);
  std::vector<int> palette;
  std::vector<int> seen_stamp; // per color: last node that saw it among its neighbours
  for (int node : nodes) {
    for (int nb : adj[node])
      if (out.color[nb] >= 0) seen_stamp[out.color[nb]] = node;
    auto it = std::find_if(palette.begin(), palette.end(), [&](int c) { return seen_stamp[c] != node; });
    int c;
    if (it == palette.end()) {
      c = static_cast<int>(seen_stamp.size());
      seen_stamp.push_back(-1);
      palette.push_back(c);
    } else {
      c = *it;
      palette.erase(it);
      palette.push_back(c);
    }
    out.color[node] = c;
  }
  out.count = static_cast<int>(seen_stamp.size());

  out.color_offsets.assign(out.count + 1, 0);
  for (int c : out.color) ++out.color_offsets[c + 1];
  std::partial_sum(out.color_offsets.begin(), out.color_offsets.end(), out.color_offsets.begin());
  out.order.assign(n, 0);
  std::vector<int> fill(out.color_offsets.begin(), out.color_offsets.end() - 1);
  for (int i = 0; i < n; ++i) out.order[fill[out.color[i]]++] = i;
  return out;
}

bool is_proper(const Coloring& coloring, const SparseMatrix& a) {
  for (int i = 0; i < a.rows(); ++i) {
    if (coloring.color[i] < 0 || coloring.color[i] >= coloring.count) return false;
    for (int j : a.row_indices(i))
      if (j != i && coloring.color[i] == coloring.color[j]) return false;
  }
  return true;
}

} // namespace surfmg
