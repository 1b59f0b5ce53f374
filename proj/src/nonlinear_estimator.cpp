#include "secest/nonlinear_estimator.hpp"

#include <string>

#include "secest/errors.hpp"

namespace secest {

namespace {

void validate(const NonlinearSystem& sys, const std::vector<Vector>& y_seq,
              const std::vector<Vector>& in_seq) {
  if (sys.a.rows() != sys.a.cols() || sys.c.cols() != sys.a.cols()) {
    throw DimensionError("nonlinear system: inconsistent A/C shapes");
  }
  if (!sys.g) throw DimensionError("nonlinear system: output map is not set");
  if (y_seq.empty()) throw DimensionError("nonlinear transform: empty measurement sequence");
  if (y_seq.size() != in_seq.size()) {
    throw DimensionError("nonlinear transform: measurement and input sequences differ in length");
  }
  for (size_t k = 0; k < y_seq.size(); ++k) {
    if (y_seq[k].size() != sys.c.rows()) {
      throw DimensionError("nonlinear transform: y(" + std::to_string(k) + ") has the wrong length");
    }
    if (in_seq[k].size() != sys.a.rows()) {
      throw DimensionError("nonlinear transform: input " + std::to_string(k) +
                           " has the wrong length");
    }
  }
  if (sys.h && (sys.h->rows() != sys.a.rows() || sys.h->cols() != sys.c.rows())) {
    throw DimensionError("nonlinear system: H must be n x p");
  }
}

// Shared Y and Phi construction. `drift` accumulates
// sum_{m<k} A^(k-1-m) (g(y(m)) + in(m)) one step at a time.
LinearizedStack stack_history(const NonlinearSystem& sys, const std::vector<Vector>& y_seq,
                              const std::vector<Vector>& in_seq) {
  const int horizon = static_cast<int>(y_seq.size());
  const Eigen::Index p = sys.c.rows();
  LinearizedStack out;
  out.horizon = horizon;
  out.phi = stack_observability(sys.a, sys.c, horizon);
  out.y.resize(p * horizon);
  Vector drift = Vector::Zero(sys.a.rows());
  for (int k = 0; k < horizon; ++k) {
    const auto idx = static_cast<size_t>(k);
    out.y.segment(p * k, p) = y_seq[idx] - sys.c * drift;
    if (k + 1 < horizon) {
      const Vector gk = sys.g(y_seq[idx]);
      if (gk.size() != sys.a.rows()) throw DimensionError("output map returned the wrong length");
      drift = sys.a * drift + gk + in_seq[idx];
    }
  }
  return out;
}

}  // namespace

LinearizedStack transform_with_mapping(const NonlinearSystem& sys, const std::vector<Vector>& y_seq,
                                       const std::vector<Vector>& u_seq) {
  validate(sys, y_seq, u_seq);
  LinearizedStack out = stack_history(sys, y_seq, u_seq);
  out.psi = Matrix::Identity(out.y.size(), out.y.size());
  return out;
}

LinearizedStack transform_feedback_linearized(const NonlinearSystem& sys,
                                              const std::vector<Vector>& y_seq,
                                              const std::vector<Vector>& v_seq) {
  validate(sys, y_seq, v_seq);
  LinearizedStack out = stack_history(sys, y_seq, v_seq);
  const Eigen::Index p = sys.c.rows();
  const int horizon = out.horizon;
  out.psi = Matrix::Identity(p * horizon, p * horizon);
  if (!sys.h) return out;

  // lag j -> C A^(j-1) H for j >= 1
  Matrix a_power = Matrix::Identity(sys.a.rows(), sys.a.cols());
  for (int lag = 1; lag < horizon; ++lag) {
    const Matrix block = sys.c * a_power * (*sys.h);
    for (int col = 0; col + lag < horizon; ++col) {
      out.psi.block(p * (col + lag), p * col, p, p) = block;
    }
    a_power = sys.a * a_power;
  }
  return out;
}

DecodeResult decode_linearized(const LinearizedStack& stack) {
  return decode(stack.phi, stack.psi, stack.y);
}

}  // namespace secest
