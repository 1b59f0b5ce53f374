#include "secest/matrix_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "secest/errors.hpp"

namespace secest {

namespace {

std::string strip_comments(std::istream& in) {
  std::ostringstream body;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    body << line << '\n';
  }
  return body.str();
}

}  // namespace

Matrix read_matrix(std::istream& in) {
  std::istringstream tokens(strip_comments(in));
  long rows = -1;
  long cols = -1;
  if (!(tokens >> rows >> cols) || rows < 0 || cols < 0) {
    throw DimensionError("matrix file: missing or invalid 'rows cols' header");
  }
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      if (!(tokens >> m(i, j))) {
        throw DimensionError("matrix file: expected " + std::to_string(rows * cols) +
                             " values");
      }
    }
  }
  std::string extra;
  if (tokens >> extra) throw DimensionError("matrix file: trailing data after values");
  return m;
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOFailure("cannot open " + path);
  return read_matrix(in);
}

Vector read_vector_file(const std::string& path) {
  const Matrix m = read_matrix_file(path);
  if (m.cols() != 1) throw DimensionError(path + ": a vector must have exactly one column");
  return m.col(0);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ' ';
      out << m(i, j);
    }
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw IOFailure("cannot write " + path);
  write_matrix(out, m);
}

}  // namespace secest
