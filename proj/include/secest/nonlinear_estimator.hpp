#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "secest/sparse_decoder.hpp"

namespace secest {

/// Output map g: R^p -> R^n reproducing the nonlinear drift from the
/// (possibly corrupted) measurement. Must be pure.
using OutputMap = std::function<Vector(const Vector&)>;

/// x(k+1) = A x(k) + f(x(k), e(k)) + u(k),  y(k) = C x(k) + e(k)
///
/// Two drift decompositions are supported:
///  - f = g(y)                    (no H)
///  - f = g(y) + h1(x) + H e      (H present; the plant applies
///                                 u = -h1(x) + v so only g and H e remain)
struct NonlinearSystem {
  Matrix a;
  Matrix c;
  OutputMap g;
  std::optional<Matrix> h;

  int states() const { return static_cast<int>(a.rows()); }
  int outputs() const { return static_cast<int>(c.rows()); }
};

/// Y = Phi x(0) + Psi E. Psi is block lower triangular with identity
/// diagonal blocks; it is exactly the identity when no H is involved.
struct LinearizedStack {
  Vector y;
  Matrix phi;
  Matrix psi;
  int horizon = 0;
};

/// Row block k: y(k) - C * sum_{m<k} A^(k-1-m) (g(y(m)) + u(m)).
LinearizedStack transform_with_mapping(const NonlinearSystem& sys, const std::vector<Vector>& y_seq,
                                       const std::vector<Vector>& u_seq);

/// Same history subtraction with the residual inputs v(k); Psi gets the
/// blocks C A^(j) H below the diagonal. A system without H is treated as H = 0.
LinearizedStack transform_feedback_linearized(const NonlinearSystem& sys,
                                              const std::vector<Vector>& y_seq,
                                              const std::vector<Vector>& v_seq);

DecodeResult decode_linearized(const LinearizedStack& stack);

}  // namespace secest
