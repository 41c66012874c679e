#include "surfmg/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace surfmg {

void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  out << std::setprecision(17);
  for (int i = 0; i < a.rows(); ++i) {
    auto idx = a.row_indices(i);
    auto val = a.row_values(i);
    for (std::size_t k = 0; k < idx.size(); ++k) out << i + 1 << ' ' << idx[k] + 1 << ' ' << val[k] << '\n';
  }
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_matrix_market(out, a);
}

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("Matrix Market: empty stream");
  std::string lower = line;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower.rfind("%%matrixmarket", 0) != 0 || lower.find("coordinate") == std::string::npos)
    throw ParseError("Matrix Market: expected a coordinate header");
  const bool pattern = lower.find("pattern") != std::string::npos;
  const bool symmetric = lower.find("symmetric") != std::string::npos;

  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  std::istringstream dims(line);
  int rows = 0, cols = 0, nnz = 0;
  if (!(dims >> rows >> cols >> nnz)) throw ParseError("Matrix Market: bad size line");

  std::vector<Triplet> t;
  t.reserve(symmetric ? 2 * nnz : nnz);
  for (int k = 0; k < nnz; ++k) {
    int i, j;
    double v = 1.0;
    if (!(in >> i >> j)) throw ParseError("Matrix Market: truncated entry list");
    if (!pattern && !(in >> v)) throw ParseError("Matrix Market: missing value");
    t.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) t.push_back({j - 1, i - 1, v});
  }
  return SparseMatrix::from_triplets(rows, cols, t);
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return read_matrix_market(in);
}

} // namespace surfmg
