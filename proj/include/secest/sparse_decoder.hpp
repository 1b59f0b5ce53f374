#pragma once

#include <optional>
#include <vector>

#include "secest/linalg.hpp"

namespace secest {

/// Entries with magnitude above this belong to a solution's support.
inline constexpr double kZeroThreshold = 1e-6;

/// A coding matrix of full column rank together with the corrupted
/// measurements y = C x + e it produced.
class CodingProblem {
 public:
  /// Throws DimensionError on a length mismatch or fewer rows than columns,
  /// RankDeficient when the matrix has numerical rank below its column count.
  CodingProblem(Matrix coding_matrix, Vector measurements);

  const Matrix& coding_matrix() const { return coding_; }
  const Vector& measurements() const { return measurements_; }

 private:
  Matrix coding_;
  Vector measurements_;
};

/// Left annihilator of a full-column-rank matrix Phi, taken from the
/// trailing columns of its full Householder QR factor. The leading factor
/// is kept so the state can be recovered once the error is known.
struct Annihilator {
  Matrix omega;  ///< (m - n) x m, orthonormal rows, omega * Phi = 0
  Matrix q1;     ///< m x n
  Matrix r1;     ///< n x n upper triangular
  int source_rank = 0;

  /// Solves R1 x = Q1' v.
  Vector recover(const Vector& v) const;
};

struct SparseSolution {
  Vector error_vector;
  std::vector<int> support;
  double residual_norm = 0.0;
  double objective = 0.0;  ///< unweighted l1 norm of error_vector
};

struct L1Options {
  /// Optional positive per-column weights w; minimizes sum w_i |E_i|.
  Vector column_weights;
  double feasibility_tol = 1e-8;
};

/// Throws DimensionError when rows <= cols, RankDeficient when rank < cols.
Annihilator compute_annihilator(const Matrix& phi);

/// min |E|_1 subject to M E = y, solved as a linear program over
/// E = E+ - E-. Throws Infeasible or SolverFailure.
SparseSolution l1_minimize(const Matrix& m, const Vector& y, const L1Options& options = {});

/// Exhaustive search over supports of size 0..q_max in lexicographic order;
/// the first support whose least-squares fit has residual below 1e-8 wins.
/// Limited to at most 24 columns and q_max <= 4 (TooLarge otherwise).
std::optional<SparseSolution> l0_bruteforce(const Matrix& m, const Vector& y, int q_max);

/// True iff every subset of 2s columns of M has full column rank
/// (smallest singular value above 1e-10). s = 0 is always certified.
bool certify_recoverability(const Matrix& m, int s);

struct DecodeResult {
  Vector x0;
  SparseSolution error;
};

/// Recovers x from Y = Phi x + E with E sparse.
DecodeResult decode(const Matrix& phi, const Vector& y, const L1Options& options = {});

/// Recovers x from Y = Phi x + Psi E with E sparse: annihilate Phi, solve
/// the l1 problem on Omega Psi, then back-substitute through R1.
DecodeResult decode(const Matrix& phi, const Matrix& psi, const Vector& y,
                    const L1Options& options = {});

}  // namespace secest
