#pragma once

#include "surfmg/sparse.hpp"

#include <filesystem>
#include <iosfwd>

namespace surfmg {

/// Coordinate/real/general Matrix Market, 17 significant digits.
void write_matrix_market(std::ostream& out, const SparseMatrix& a);
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a);

/// Accepts coordinate real/integer/pattern matrices, general or symmetric.
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::filesystem::path& path);

} // namespace surfmg
