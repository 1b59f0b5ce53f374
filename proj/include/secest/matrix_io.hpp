#pragma once

#include <iosfwd>
#include <string>

#include "secest/linalg.hpp"

namespace secest {

// Fixture text format: a header line "rows cols" followed by rows*cols
// whitespace-separated decimals in row-major order. A vector is stored as
// a single column (rows x 1). Blank lines and lines starting with '#' are
// ignored. Values are written with 17 significant digits so a write/read
// cycle is exact.

Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);
Vector read_vector_file(const std::string& path);

void write_matrix(std::ostream& out, const Matrix& m);
void write_matrix_file(const std::string& path, const Matrix& m);

}  // namespace secest
