#pragma once

#include <Eigen/Dense>

namespace secest {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Singular values below max(rows, cols) * eps * sigma_max count as zero.
double rank_tolerance(const Matrix& m);

int numerical_rank(const Matrix& m);

/// Zero for an empty matrix or one with more columns than rows.
double smallest_singular_value(const Matrix& m);

/// Rows [C; CA; ...; CA^(steps-1)] with powers built incrementally.
Matrix stack_observability(const Matrix& a, const Matrix& c, int steps);

}  // namespace secest
