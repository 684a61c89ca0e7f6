#pragma once

#include <filesystem>
#include <iosfwd>

#include "randskel/matsource.hpp"

namespace randskel {

/// Reads a real Matrix Market file (coordinate or array; real, integer or
/// pattern field; general, symmetric or skew-symmetric). Coordinate files
/// load as sparse sources, array files as dense ones. Symmetric storage is
/// expanded. Errors carry the 1-based line number.
MatrixSource load_matrix_market(const std::filesystem::path& path);
MatrixSource read_matrix_market(std::istream& in);

/// Coordinate/general for sparse sources, array/general otherwise. Values
/// are written with 17 significant digits so a reload is exact.
void write_matrix_market(const std::filesystem::path& path, const MatrixSource& a);
void write_matrix_market(std::ostream& out, const MatrixSource& a);
void write_matrix_market(std::ostream& out, const Matrix& a);

} // namespace randskel
