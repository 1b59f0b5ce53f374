#include "secest/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "secest/errors.hpp"

namespace secest {

namespace {

class Tableau {
 public:
  Tableau(const Matrix& a, const Vector& b) : rows_(a.rows()), structural_(a.cols()) {
    const Eigen::Index total = structural_ + rows_;
    t_ = Matrix::Zero(rows_ + 1, total + 1);
    basis_.resize(static_cast<size_t>(rows_));
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const double sign = b(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(structural_) = sign * a.row(i);
      t_(i, structural_ + i) = 1.0;
      t_(i, total) = sign * b(i);
      basis_[static_cast<size_t>(i)] = structural_ + i;
    }
  }

  Eigen::Index rhs_col() const { return t_.cols() - 1; }
  Eigen::Index cost_row() const { return rows_; }

  void load_phase_one_costs() {
    t_.row(rows_).setZero();
    for (Eigen::Index i = 0; i < rows_; ++i) {
      t_.row(rows_).head(structural_) -= t_.row(i).head(structural_);
      t_(rows_, rhs_col()) -= t_(i, rhs_col());
    }
  }

  void load_costs(const Vector& c) {
    t_.row(rows_).setZero();
    t_.row(rows_).head(structural_) = c.transpose();
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index bi = basis_[static_cast<size_t>(i)];
      const double cb = bi < structural_ ? c(bi) : 0.0;
      if (cb != 0.0) t_.row(rows_) -= cb * t_.row(i);
    }
  }

  double objective_value() const { return -t_(rows_, rhs_col()); }

  void pivot(Eigen::Index r, Eigen::Index col) {
    t_.row(r) /= t_(r, col);
    for (Eigen::Index i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    t_(r, col) = 1.0;
    basis_[static_cast<size_t>(r)] = col;
  }

  // Runs Bland-rule iterations over columns [0, eligible). Returns false when
  // the objective is unbounded below. With `bounded` set (phase one), a
  // column without a pivot only reflects round-off and is skipped instead.
  bool optimize(Eigen::Index eligible, const SimplexOptions& opt, int& iterations,
                int budget, bool bounded = false) {
    std::vector<bool> skipped(static_cast<size_t>(eligible), false);
    for (;;) {
      Eigen::Index entering = -1;
      for (Eigen::Index j = 0; j < eligible; ++j) {
        if (!skipped[static_cast<size_t>(j)] && t_(rows_, j) < -opt.cost_tol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return true;

      Eigen::Index leaving = -1;
      double best = 0.0;
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const double coef = t_(i, entering);
        if (coef <= opt.pivot_tol) continue;
        const double ratio = t_(i, rhs_col()) / coef;
        if (leaving < 0 || ratio < best - 1e-14 * (1.0 + std::abs(best)) ||
            (std::abs(ratio - best) <= 1e-14 * (1.0 + std::abs(best)) &&
             basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leaving)])) {
          leaving = i;
          best = ratio;
        }
      }
      if (leaving < 0) {
        if (!bounded) return false;
        skipped[static_cast<size_t>(entering)] = true;
        continue;
      }
      std::fill(skipped.begin(), skipped.end(), false);
      if (++iterations > budget) {
        throw SolverFailure("simplex: iteration budget exhausted");
      }
      pivot(leaving, entering);
    }
  }

  // Pivot basic artificials out wherever a structural column allows it.
  // Rows where none does are redundant and keep a zero artificial.
  void expel_artificials(double tol) {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[static_cast<size_t>(i)] < structural_) continue;
      for (Eigen::Index j = 0; j < structural_; ++j) {
        if (std::abs(t_(i, j)) > tol) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  const std::vector<Eigen::Index>& basis() const { return basis_; }
  double rhs(Eigen::Index i) const { return t_(i, rhs_col()); }
  Eigen::Index structural() const { return structural_; }

 private:
  Eigen::Index rows_;
  Eigen::Index structural_;
  Matrix t_;
  std::vector<Eigen::Index> basis_;
};

// Recompute basic values from the original columns.
Vector polish(const Matrix& a, const Vector& b, const Tableau& tab, const Vector& raw) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index bi : tab.basis()) {
    if (bi < tab.structural()) cols.push_back(bi);
  }
  if (cols.empty()) return raw;
  Matrix basic(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t k = 0; k < cols.size(); ++k) basic.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
  const Vector xb = basic.colPivHouseholderQr().solve(b);
  Vector x = Vector::Zero(raw.size());
  for (size_t k = 0; k < cols.size(); ++k) {
    const double v = xb(static_cast<Eigen::Index>(k));
    if (v < -1e-9 * (1.0 + std::abs(raw(cols[k])))) return raw;
    x(cols[k]) = std::max(v, 0.0);
  }
  const double raw_res = (a * raw - b).lpNorm<Eigen::Infinity>();
  const double new_res = (a * x - b).lpNorm<Eigen::Infinity>();
  return new_res <= raw_res ? x : raw;
}

}  // namespace

SimplexResult solve_standard_form(const Matrix& a, const Vector& b, const Vector& c,
                                  const SimplexOptions& options) {
  if (a.rows() != b.size() || a.cols() != c.size()) {
    throw DimensionError("simplex: inconsistent problem dimensions");
  }
  const int budget = options.max_iterations > 0
                         ? options.max_iterations
                         : static_cast<int>(50 * (a.rows() + a.cols()) + 1000);
  SimplexResult result;
  result.x = Vector::Zero(a.cols());
  if (a.rows() == 0) {
    // Only the nonnegativity constraints remain.
    for (Eigen::Index j = 0; j < c.size(); ++j) {
      if (c(j) < 0.0) throw SolverFailure("simplex: objective unbounded below");
    }
    return result;
  }

  Tableau tab(a, b);
  tab.load_phase_one_costs();
  tab.optimize(a.cols() + a.rows(), options, result.iterations, budget, true);
  const double scale = 1.0 + b.lpNorm<Eigen::Infinity>();
  if (tab.objective_value() > options.feasibility_tol * scale) {
    throw Infeasible("no nonnegative solution satisfies the equality constraints");
  }
  tab.expel_artificials(1e-9);

  tab.load_costs(c);
  if (!tab.optimize(a.cols(), options, result.iterations, budget)) {
    throw SolverFailure("simplex: objective unbounded below");
  }

  Vector raw = Vector::Zero(a.cols());
  for (size_t i = 0; i < tab.basis().size(); ++i) {
    const Eigen::Index bi = tab.basis()[i];
    if (bi < a.cols()) raw(bi) = std::max(tab.rhs(static_cast<Eigen::Index>(i)), 0.0);
  }
  result.x = polish(a, b, tab, raw);
  if ((a * result.x - b).lpNorm<Eigen::Infinity>() > options.feasibility_tol * scale) {
    throw Infeasible("simplex: final basic solution violates the equality constraints");
  }
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace secest
