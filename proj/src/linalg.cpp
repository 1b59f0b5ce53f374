#include "secest/linalg.hpp"

#include <algorithm>
#include <limits>

#include "secest/errors.hpp"

namespace secest {

namespace {

Vector singular_values(const Matrix& m) {
  if (m.size() == 0) return Vector();
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

}  // namespace

double rank_tolerance(const Matrix& m) {
  const Vector sv = singular_values(m);
  if (sv.size() == 0) return 0.0;
  const double dim = static_cast<double>(std::max(m.rows(), m.cols()));
  return dim * std::numeric_limits<double>::epsilon() * sv(0);
}

int numerical_rank(const Matrix& m) {
  const Vector sv = singular_values(m);
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double dim = static_cast<double>(std::max(m.rows(), m.cols()));
  const double tol = dim * std::numeric_limits<double>::epsilon() * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++rank;
  }
  return rank;
}

double smallest_singular_value(const Matrix& m) {
  if (m.size() == 0 || m.cols() > m.rows()) return 0.0;
  const Vector sv = singular_values(m);
  return sv(sv.size() - 1);
}

Matrix stack_observability(const Matrix& a, const Matrix& c, int steps) {
  if (steps < 1) throw DimensionError("observability horizon must be at least 1");
  if (a.rows() != a.cols() || c.cols() != a.rows()) {
    throw DimensionError("observability: A must be square and match the columns of C");
  }
  const Eigen::Index p = c.rows();
  Matrix out(p * steps, a.cols());
  Matrix block = c;
  for (int k = 0; k < steps; ++k) {
    out.middleRows(p * k, p) = block;
    if (k + 1 < steps) block = block * a;
  }
  return out;
}

}  // namespace secest
