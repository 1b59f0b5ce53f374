#pragma once

#include "secest/linalg.hpp"

namespace secest {

struct SimplexOptions {
  /// Phase-one objective (sum of artificials) above this, scaled by
  /// 1 + |b|_inf, means the equality system has no nonnegative solution.
  double feasibility_tol = 1e-8;
  double pivot_tol = 1e-9;
  double cost_tol = 1e-11;
  /// Zero means 50 * (rows + cols) + 1000.
  int max_iterations = 0;
};

struct SimplexResult {
  Vector x;
  double objective = 0.0;
  int iterations = 0;
};

/// Dense two-phase tableau simplex for
///
///   min c'x  subject to  A x = b,  x >= 0
///
/// Pivoting follows Bland's rule (lowest eligible index enters, ties in the
/// ratio test leave by lowest basic index), so the result is a deterministic
/// function of the inputs. The final basic solution is re-solved from the
/// original columns to shed tableau round-off.
///
/// Throws Infeasible or SolverFailure (iteration budget exhausted or the
/// problem is unbounded).
SimplexResult solve_standard_form(const Matrix& a, const Vector& b, const Vector& c,
                                  const SimplexOptions& options = {});

}  // namespace secest
