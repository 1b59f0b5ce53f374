#include "secest/linear_estimator.hpp"

#include <string>

#include "secest/errors.hpp"

namespace secest {

LinearSystem::LinearSystem(Matrix a, Matrix c) : a_(std::move(a)), c_(std::move(c)) {
  if (a_.rows() != a_.cols()) throw DimensionError("linear system: A must be square");
  if (c_.cols() != a_.cols()) throw DimensionError("linear system: C columns must match A");
  if (a_.rows() == 0) throw DimensionError("linear system: empty state");
  observability_rank_ = numerical_rank(stack_observability(a_, c_, states()));
}

Matrix build_observability(const LinearSystem& sys, int horizon) {
  return stack_observability(sys.a(), sys.c(), horizon);
}

StackedObservation stack_observation(const LinearSystem& sys, const std::vector<Vector>& y_seq) {
  const int horizon = static_cast<int>(y_seq.size());
  if (horizon < 1) throw DimensionError("stack: empty measurement sequence");
  const int p = sys.outputs();
  StackedObservation out;
  out.horizon = horizon;
  out.phi = build_observability(sys, horizon);
  out.y.resize(static_cast<Eigen::Index>(p) * horizon);
  for (int k = 0; k < horizon; ++k) {
    if (y_seq[static_cast<size_t>(k)].size() != p) {
      throw DimensionError("stack: y(" + std::to_string(k) + ") has the wrong length");
    }
    out.y.segment(static_cast<Eigen::Index>(p) * k, p) = y_seq[static_cast<size_t>(k)];
  }
  if (numerical_rank(out.phi) < sys.states()) {
    throw Unobservable("stacked observability matrix is rank deficient; x(0) is not "
                       "determined even without attacks");
  }
  return out;
}

LinearEstimate secure_estimate_linear(const LinearSystem& sys, const std::vector<Vector>& y_seq) {
  const StackedObservation st = stack_observation(sys, y_seq);
  const DecodeResult dec = decode(st.phi, st.y);
  LinearEstimate out;
  out.x0 = dec.x0;
  out.stacked = dec.error;
  const int p = sys.outputs();
  for (int k = 0; k < st.horizon; ++k) {
    out.attacks.emplace_back(dec.error.error_vector.segment(static_cast<Eigen::Index>(p) * k, p));
  }
  return out;
}

bool check_window_recoverability(const LinearSystem& sys, int horizon, int s) {
  const Matrix phi = build_observability(sys, horizon);
  if (numerical_rank(phi) < sys.states()) return false;
  if (phi.rows() <= phi.cols()) return s == 0;
  const Annihilator ann = compute_annihilator(phi);
  return certify_recoverability(ann.omega, s);
}

Vector propagate(const LinearSystem& sys, const Vector& x0, int steps) {
  Vector x = x0;
  for (int k = 0; k < steps; ++k) x = sys.a() * x;
  return x;
}

}  // namespace secest
