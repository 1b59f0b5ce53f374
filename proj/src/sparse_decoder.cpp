#include "secest/sparse_decoder.hpp"

#include <cmath>
#include <string>

#include "secest/errors.hpp"
#include "secest/simplex.hpp"

namespace secest {

namespace {

constexpr int kMaxEnumeratedColumns = 24;
constexpr int kMaxBruteforceSparsity = 4;
constexpr double kSubsetBudget = 2e6;
constexpr double kExactResidual = 1e-8;
constexpr double kSubsetSingularFloor = 1e-10;

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Advances idx to the next k-subset of {0..n-1} in lexicographic order.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[static_cast<size_t>(i)];
  for (int j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  return true;
}

std::vector<int> support_of(const Vector& e) {
  std::vector<int> s;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    if (std::abs(e(i)) > kZeroThreshold) s.push_back(static_cast<int>(i));
  }
  return s;
}

Matrix select_columns(const Matrix& m, const std::vector<int>& cols) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(cols[k]);
  return out;
}

}  // namespace

CodingProblem::CodingProblem(Matrix coding_matrix, Vector measurements)
    : coding_(std::move(coding_matrix)), measurements_(std::move(measurements)) {
  if (coding_.rows() != measurements_.size()) {
    throw DimensionError("coding problem: measurement length differs from row count");
  }
  if (coding_.rows() < coding_.cols()) {
    throw DimensionError("coding problem: fewer rows than columns");
  }
  if (numerical_rank(coding_) < coding_.cols()) {
    throw RankDeficient("coding problem: coding matrix lacks full column rank");
  }
}

Vector Annihilator::recover(const Vector& v) const {
  return r1.triangularView<Eigen::Upper>().solve(q1.transpose() * v);
}

Annihilator compute_annihilator(const Matrix& phi) {
  const Eigen::Index m = phi.rows();
  const Eigen::Index n = phi.cols();
  if (m <= n) {
    throw DimensionError("annihilator: need more rows than columns (got " + std::to_string(m) +
                         "x" + std::to_string(n) + ")");
  }
  const int rank = numerical_rank(phi);
  if (rank < n) {
    throw RankDeficient("annihilator: numerical rank " + std::to_string(rank) + " < " +
                        std::to_string(n));
  }
  Eigen::HouseholderQR<Matrix> qr(phi);
  const Matrix q = qr.householderQ() * Matrix::Identity(m, m);
  Annihilator out;
  out.q1 = q.leftCols(n);
  out.omega = q.rightCols(m - n).transpose();
  out.r1 = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  out.source_rank = static_cast<int>(n);
  return out;
}

SparseSolution l1_minimize(const Matrix& m, const Vector& y, const L1Options& options) {
  if (m.rows() != y.size()) throw DimensionError("l1: constraint rows differ from rhs length");
  const Eigen::Index c = m.cols();
  Vector w = Vector::Ones(c);
  if (options.column_weights.size() > 0) {
    if (options.column_weights.size() != c) throw DimensionError("l1: weight count mismatch");
    if ((options.column_weights.array() <= 0.0).any()) {
      throw DimensionError("l1: column weights must be positive");
    }
    w = options.column_weights;
  }

  Matrix scaled = m * w.cwiseInverse().asDiagonal();
  Matrix lp(m.rows(), 2 * c);
  lp << scaled, -scaled;
  SimplexOptions sopt;
  sopt.feasibility_tol = options.feasibility_tol;
  const SimplexResult res = solve_standard_form(lp, y, Vector::Ones(2 * c), sopt);

  SparseSolution out;
  out.error_vector = (res.x.head(c) - res.x.tail(c)).cwiseQuotient(w);
  out.support = support_of(out.error_vector);
  out.residual_norm = (m * out.error_vector - y).norm();
  out.objective = out.error_vector.lpNorm<1>();
  return out;
}

std::optional<SparseSolution> l0_bruteforce(const Matrix& m, const Vector& y, int q_max) {
  if (m.rows() != y.size()) throw DimensionError("l0: constraint rows differ from rhs length");
  const int cols = static_cast<int>(m.cols());
  if (cols > kMaxEnumeratedColumns || q_max > kMaxBruteforceSparsity) {
    throw TooLarge("l0 brute force limited to 24 columns and sparsity 4");
  }
  if (q_max < 0) throw DimensionError("l0: negative sparsity bound");

  for (int size = 0; size <= std::min(q_max, cols); ++size) {
    std::vector<int> idx(static_cast<size_t>(size));
    for (int i = 0; i < size; ++i) idx[static_cast<size_t>(i)] = i;
    do {
      Vector e = Vector::Zero(cols);
      if (size > 0) {
        const Matrix sub = select_columns(m, idx);
        const Vector coef = sub.colPivHouseholderQr().solve(y);
        for (int k = 0; k < size; ++k) e(idx[static_cast<size_t>(k)]) = coef(k);
      }
      const double res = (m * e - y).norm();
      if (res < kExactResidual) {
        SparseSolution out;
        out.error_vector = e;
        out.support = support_of(e);
        out.residual_norm = res;
        out.objective = e.lpNorm<1>();
        return out;
      }
    } while (size > 0 && next_combination(idx, cols));
  }
  return std::nullopt;
}

bool certify_recoverability(const Matrix& m, int s) {
  if (s < 0) throw DimensionError("certify: negative sparsity");
  if (s == 0) return true;
  const int cols = static_cast<int>(m.cols());
  const int k = 2 * s;
  if (k > m.rows()) return false;
  if (k > cols) throw DimensionError("certify: 2s exceeds the column count");
  if (cols > kMaxEnumeratedColumns || binomial(cols, k) > kSubsetBudget) {
    throw TooLarge("certify: subset enumeration over budget");
  }
  std::vector<int> idx(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
  do {
    if (smallest_singular_value(select_columns(m, idx)) <= kSubsetSingularFloor) return false;
  } while (next_combination(idx, cols));
  return true;
}

DecodeResult decode(const Matrix& phi, const Vector& y, const L1Options& options) {
  return decode(phi, Matrix::Identity(phi.rows(), phi.rows()), y, options);
}

DecodeResult decode(const Matrix& phi, const Matrix& psi, const Vector& y,
                    const L1Options& options) {
  if (phi.rows() != y.size() || psi.rows() != y.size()) {
    throw DimensionError("decode: measurement length differs from matrix rows");
  }
  const Annihilator ann = compute_annihilator(phi);
  const Vector y_tilde = ann.omega * y;
  DecodeResult out;
  out.error = l1_minimize(ann.omega * psi, y_tilde, options);
  out.x0 = ann.recover(y - psi * out.error.error_vector);
  return out;
}

}  // namespace secest
