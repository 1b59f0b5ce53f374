#pragma once

#include <vector>

#include "secest/sparse_decoder.hpp"

namespace secest {

/// x(k+1) = A x(k), y(k) = C x(k) + e(k).
class LinearSystem {
 public:
  LinearSystem(Matrix a, Matrix c);

  const Matrix& a() const { return a_; }
  const Matrix& c() const { return c_; }
  int states() const { return static_cast<int>(a_.rows()); }
  int outputs() const { return static_cast<int>(c_.rows()); }
  /// Rank of [C; CA; ...; CA^(n-1)].
  int observability_rank() const { return observability_rank_; }

 private:
  Matrix a_;
  Matrix c_;
  int observability_rank_ = 0;
};

struct StackedObservation {
  Vector y;
  Matrix phi;
  int horizon = 0;
};

Matrix build_observability(const LinearSystem& sys, int horizon);

/// Stacks y(0..T-1) into Y alongside Phi. Throws Unobservable when Phi has
/// rank below the state dimension.
StackedObservation stack_observation(const LinearSystem& sys, const std::vector<Vector>& y_seq);

struct LinearEstimate {
  Vector x0;
  /// Block k holds the estimate of e(k).
  std::vector<Vector> attacks;
  SparseSolution stacked;
};

LinearEstimate secure_estimate_linear(const LinearSystem& sys, const std::vector<Vector>& y_seq);

/// Both uniqueness conditions for a window of `horizon` steps with at most
/// `s` attacked entries in total: Phi has full column rank and every 2s
/// columns of its annihilator are independent.
bool check_window_recoverability(const LinearSystem& sys, int horizon, int s);

/// x(k) = A^k x0.
Vector propagate(const LinearSystem& sys, const Vector& x0, int steps);

}  // namespace secest
