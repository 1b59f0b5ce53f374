#include "secest/wacs_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "secest/errors.hpp"

namespace secest {

ChannelLayout::ChannelLayout(const ReducedNetwork& red)
    : n_(red.generators()), links_(red.edge_count()) {
  int meas = 0;
  int comm = 0;
  int eps = 0;
  for (int i = 0; i < n_; ++i) {
    neighbors_.push_back(red.neighbors(i));
    const int li = static_cast<int>(neighbors_.back().size());
    meas_offset_.push_back(meas);
    comm_offset_.push_back(comm);
    eps_offset_.push_back(eps);
    meas += 1 + li;
    comm += li;
    eps += 2 * li;
  }
}

int ChannelLayout::position(int i, int j) const {
  if (i < 0 || i >= n_ || j < 0 || j >= n_) {
    throw DimensionError("channel (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                         ") is outside the network");
  }
  if (i == j) return 0;
  const auto& nb = neighbors_[static_cast<size_t>(i)];
  const auto it = std::lower_bound(nb.begin(), nb.end(), j);
  if (it == nb.end() || *it != j) {
    throw DimensionError("generators " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                         " are not neighbours");
  }
  return 1 + static_cast<int>(it - nb.begin());
}

int ChannelLayout::measurement_row(int i, int j) const {
  const int pos = position(i, j);
  return meas_offset_[static_cast<size_t>(i)] + pos;
}

int ChannelLayout::comm_index(int i, int j) const {
  if (i == j) throw DimensionError("self channels carry no communication corruption");
  return comm_offset_[static_cast<size_t>(i)] + position(i, j) - 1;
}

int ChannelLayout::monitor_index(int i, int j) const {
  return 2 * links_ + measurement_row(i, j);
}

int ChannelLayout::eps_cos_index(int i, int j) const {
  if (i == j) throw DimensionError("self channels carry no coupling term");
  return eps_offset_[static_cast<size_t>(i)] + position(i, j) - 1;
}

int ChannelLayout::eps_sin_index(int i, int j) const {
  const int li = static_cast<int>(neighbors(i).size());
  return eps_cos_index(i, j) + li;
}

Vector ChannelLayout::pack_measurements(const ChannelMatrix& ym) const {
  if (ym.rows() != n_ || ym.cols() != n_) throw DimensionError("measurement table has wrong size");
  Vector y(measurement_size());
  for (int i = 0; i < n_; ++i) {
    y(measurement_row(i, i)) = ym(i, i);
    for (int j : neighbors(i)) y(measurement_row(i, j)) = ym(i, j);
  }
  if (!y.allFinite()) throw MissingMeasurement("measurement snapshot has missing entries");
  return y;
}

ChannelMatrix ChannelLayout::unpack_measurements(const Vector& y) const {
  if (y.size() != measurement_size()) throw DimensionError("packed measurements have wrong length");
  ChannelMatrix ym = ChannelMatrix::Constant(n_, n_, std::nan(""));
  for (int i = 0; i < n_; ++i) {
    ym(i, i) = y(measurement_row(i, i));
    for (int j : neighbors(i)) ym(i, j) = y(measurement_row(i, j));
  }
  return ym;
}

Vector ChannelLayout::pack_corruption(const Matrix& ec, const Matrix& em) const {
  if (ec.rows() != n_ || ec.cols() != n_ || em.rows() != n_ || em.cols() != n_) {
    throw DimensionError("corruption tables have wrong size");
  }
  Vector e = Vector::Zero(corruption_size());
  for (int i = 0; i < n_; ++i) {
    if (ec(i, i) != 0.0) throw DimensionError("e^c_ii must be zero");
    e(monitor_index(i, i)) = em(i, i);
    for (int j : neighbors(i)) {
      e(comm_index(i, j)) = ec(i, j);
      e(monitor_index(i, j)) = em(i, j);
    }
  }
  return e;
}

void ChannelLayout::unpack_corruption(const Vector& e, Matrix& ec, Matrix& em) const {
  if (e.size() != corruption_size()) throw DimensionError("corruption vector has wrong length");
  ec = Matrix::Zero(n_, n_);
  em = Matrix::Zero(n_, n_);
  for (int i = 0; i < n_; ++i) {
    em(i, i) = e(monitor_index(i, i));
    for (int j : neighbors(i)) {
      ec(i, j) = e(comm_index(i, j));
      em(i, j) = e(monitor_index(i, j));
    }
  }
}

Matrix ChannelLayout::channel_sums(const Vector& e) const {
  Matrix ec;
  Matrix em;
  unpack_corruption(e, ec, em);
  return ec + em;
}

WacsSystem assemble_wacs(const ReducedNetwork& red, const PlantParams& params, double step) {
  const int n = red.generators();
  if (static_cast<int>(params.generators.size()) != n) {
    throw DimensionError("assemble_wacs: one parameter set per generator is required");
  }
  if (!(step > 0.0)) throw DimensionError("assemble_wacs: T_s must be positive");
  WacsSystem w{ChannelLayout(red), step, params.nominal_speed, {}, {}, {}, {}, {}, {}, {}, {}};
  const ChannelLayout& lay = w.layout;
  const int links = lay.links();
  const int p = lay.measurement_size();
  w.a = Matrix::Zero(2 * n, 2 * n);
  w.q = Vector::Zero(2 * n);
  for (int i = 0; i < n; ++i) {
    const GeneratorParams& g = params.generators[static_cast<size_t>(i)];
    w.a(2 * i, 2 * i) = 1.0;
    w.a(2 * i, 2 * i + 1) = step;
    w.a(2 * i + 1, 2 * i + 1) = speed_decay(g, step);
    w.q(2 * i) = -step * params.nominal_speed;
    w.q(2 * i + 1) = speed_offset(g, params.nominal_speed, step);
  }
  w.c = Matrix::Zero(p, 2 * n);
  w.d1 = Matrix::Zero(p, 2 * links);
  for (int i = 0; i < n; ++i) {
    w.c(lay.measurement_row(i, i), 2 * i) = 1.0;
    for (int j : lay.neighbors(i)) {
      w.c(lay.measurement_row(i, j), 2 * j) = 1.0;
      w.d1(lay.measurement_row(i, j), lay.comm_index(i, j)) = 1.0;
    }
  }
  w.d2 = Matrix::Identity(p, p);
  w.d.resize(p, 2 * links + p);
  w.d << w.d1, w.d2;
  w.phase = Matrix::Zero(n, n);
  w.gain = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j : lay.neighbors(i)) {
      w.phase(i, j) = red.phase(i, j);
      w.gain(i, j) = coupling_gain(red, params.generators[static_cast<size_t>(i)], i, j, step);
    }
  }
  return w;
}

CouplingMatrix coupling_matrix(const WacsSystem& wacs, const ChannelMatrix& ym,
                               const Matrix* correction) {
  const ChannelLayout& lay = wacs.layout;
  const int n = lay.generators();
  if (ym.rows() != n || ym.cols() != n) throw DimensionError("coupling matrix: table size");
  CouplingMatrix out;
  out.h = Matrix::Zero(2 * n, lay.epsilon_size());
  out.gs = Matrix::Zero(n, n);
  out.gc = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (std::isnan(ym(i, i))) throw MissingMeasurement("coupling matrix: missing y_ii");
    for (int j : lay.neighbors(i)) {
      if (std::isnan(ym(i, j))) throw MissingMeasurement("coupling matrix: missing y_ij");
      double z = wacs.phase(i, j) + ym(i, i) - ym(i, j);
      if (correction) z += (*correction)(i, j);
      out.gs(i, j) = wacs.gain(i, j) * std::sin(z);
      out.gc(i, j) = wacs.gain(i, j) * std::cos(z);
      out.h(2 * i + 1, lay.eps_cos_index(i, j)) = out.gs(i, j);
      out.h(2 * i + 1, lay.eps_sin_index(i, j)) = -out.gc(i, j);
    }
  }
  return out;
}

Vector epsilon_from_corruption(const WacsSystem& wacs, const Vector& corruption,
                               const Matrix* correction) {
  const ChannelLayout& lay = wacs.layout;
  Vector eps = Vector::Zero(lay.epsilon_size());
  for (int i = 0; i < lay.generators(); ++i) {
    for (int j : lay.neighbors(i)) {
      const double u = corruption(lay.monitor_index(i, i)) - corruption(lay.monitor_index(i, j));
      double e = corruption(lay.comm_index(i, j));
      if (correction) e -= (*correction)(i, j);
      eps(lay.eps_cos_index(i, j)) = std::cos(u - e) - std::cos(u);
      eps(lay.eps_sin_index(i, j)) = std::sin(u - e) - std::sin(u);
    }
  }
  return eps;
}

StackedWacsSystem stack_and_annihilate(const WacsSystem& wacs, const std::vector<Vector>& y_window,
                                       const std::vector<Matrix>& h_window) {
  const int horizon = static_cast<int>(y_window.size());
  if (horizon < 2) throw DimensionError("stack_and_annihilate: window must span at least 2 steps");
  if (static_cast<int>(h_window.size()) < horizon - 1) {
    throw DimensionError("stack_and_annihilate: need H(k) for every step but the last");
  }
  const ChannelLayout& lay = wacs.layout;
  const Eigen::Index p = lay.measurement_size();
  const Eigen::Index ce = lay.corruption_size();
  const Eigen::Index ne = lay.epsilon_size();
  const Eigen::Index nx = wacs.a.rows();

  StackedWacsSystem out;
  out.horizon = horizon;
  out.phi = stack_observability(wacs.a, wacs.c, horizon);
  out.y_bar.resize(p * horizon);
  Vector drift = Vector::Zero(nx);
  for (int k = 0; k < horizon; ++k) {
    const Vector& yk = y_window[static_cast<size_t>(k)];
    if (yk.size() != p) throw DimensionError("stack_and_annihilate: Y(k) has the wrong length");
    out.y_bar.segment(p * k, p) = yk - wacs.c * drift;
    drift = wacs.a * drift + wacs.q;
  }

  out.psi1 = Matrix::Zero(p * horizon, ce * horizon);
  for (int k = 0; k < horizon; ++k) out.psi1.block(p * k, ce * k, p, ce) = wacs.d;

  std::vector<Matrix> ca_pow{wacs.c};
  for (int j = 1; j + 1 < horizon; ++j) ca_pow.push_back(ca_pow.back() * wacs.a);
  out.psi2 = Matrix::Zero(p * horizon, ne * (horizon - 1));
  for (int m = 0; m + 1 < horizon; ++m) {
    const Matrix& h = h_window[static_cast<size_t>(m)];
    if (h.rows() != nx || h.cols() != ne) {
      throw DimensionError("stack_and_annihilate: H(k) has the wrong shape");
    }
    for (int k = m + 1; k < horizon; ++k) {
      out.psi2.block(p * k, ne * m, p, ne) = ca_pow[static_cast<size_t>(k - 1 - m)] * h;
    }
  }
  out.psi.resize(p * horizon, out.psi1.cols() + out.psi2.cols());
  out.psi << out.psi1, out.psi2;
  out.annihilator = compute_annihilator(out.phi);
  return out;
}

CorrectableBound correctable_bound(long generators, long links, long horizon) {
  if (generators < 1 || links < 1 || horizon < 1) {
    throw DimensionError("correctable_bound: N, L and T must be positive");
  }
  const long n = generators;
  const long l = links;
  const long t = horizon;
  auto floor_div = [](long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
  auto ceil_div = [&](long a, long b) { return -floor_div(-a, b); };
  CorrectableBound b;
  b.q_max = floor_div((n + 2 * l) * t - 2 * n, 2);
  b.q_bar = floor_div(n * t + 2 * l * t - 2 * n, 2 * t);
  b.measurements_per_step = floor_div(n * t + 2 * l * t - 2 * n, 4 * t);
  b.max_average = ceil_div(n + 2 * l - 4, 4);
  return b;
}

WindowEstimate estimate_window(const WacsSystem& wacs, const StackedWacsSystem& stacked) {
  const ChannelLayout& lay = wacs.layout;
  const int horizon = stacked.horizon;
  const Eigen::Index ce = lay.corruption_size();
  const Eigen::Index ne = lay.epsilon_size();
  const Matrix& omega = stacked.annihilator.omega;
  const Matrix m = omega * stacked.psi;
  const Vector y = omega * stacked.y_bar;

  const Vector norms = m.colwise().norm().transpose();
  const double floor = 1e-12 * std::max(norms.maxCoeff(), 1e-300);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < norms.size(); ++j) {
    if (norms(j) > floor) kept.push_back(j);
  }
  Matrix mk(m.rows(), static_cast<Eigen::Index>(kept.size()));
  L1Options opts;
  opts.column_weights.resize(mk.cols());
  for (size_t c = 0; c < kept.size(); ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    mk.col(ci) = m.col(kept[c]);
    opts.column_weights(ci) = norms(kept[c]);
  }
  const SparseSolution sol = l1_minimize(mk, y, opts);

  WindowEstimate out;
  out.e_bar = Vector::Zero(m.cols());
  for (size_t c = 0; c < kept.size(); ++c) {
    out.e_bar(kept[c]) = sol.error_vector(static_cast<Eigen::Index>(c));
  }
  out.residual_norm = sol.residual_norm;
  for (int k = 0; k < horizon; ++k) out.corruption.push_back(out.e_bar.segment(ce * k, ce));
  for (int k = 0; k + 1 < horizon; ++k) {
    out.epsilon.push_back(out.e_bar.segment(ce * horizon + ne * k, ne));
  }
  out.initial_state = stacked.annihilator.recover(stacked.y_bar - stacked.psi * out.e_bar);

  const CorrectableBound bound = correctable_bound(lay.generators(), lay.links(), horizon);
  long channels = 0;
  for (const Vector& e : out.corruption) {
    channels += (lay.channel_sums(e).array().abs() > kZeroThreshold).count();
  }
  out.certified = channels <= bound.measurements_per_step * horizon;
  return out;
}

std::string to_string(AttackType t) {
  switch (t) {
    case AttackType::comm:
      return "c-attack";
    case AttackType::monitor:
      return "m-attack";
    case AttackType::none:
      break;
  }
  return "none";
}

Vector two_step_residual(const WacsSystem& wacs, const TwoStepInputs& in, const Vector& eps_lagged) {
  const Matrix ca = wacs.c * wacs.a;
  return in.measurement - ca * (wacs.a * in.state_lagged) - ca * wacs.q - wacs.c * wacs.q -
         ca * (in.coupling_lagged * eps_lagged) - wacs.d * in.corruption_current;
}

AttackEstimate classify_two_step(const WacsSystem& wacs, const TwoStepInputs& in, int step) {
  const ChannelLayout& lay = wacs.layout;
  const int n = lay.generators();
  const Matrix* corr = in.correction_lagged.size() > 0 ? &in.correction_lagged : nullptr;
  AttackEstimate out;
  out.step = step;

  if (in.corruption_lagged.lpNorm<Eigen::Infinity>() < kZeroThreshold) {
    out.corruption = Vector::Zero(lay.corruption_size());
    out.epsilon = Vector::Zero(lay.epsilon_size());
    out.applied_epsilon = epsilon_from_corruption(wacs, out.corruption, corr);
    return out;
  }

  const Matrix sums = lay.channel_sums(in.corruption_lagged);
  const Matrix zero = Matrix::Zero(n, n);
  Matrix comm_part = sums;
  bool self_hit = false;
  for (int i = 0; i < n; ++i) {
    self_hit = self_hit || std::abs(sums(i, i)) > kZeroThreshold;
    comm_part(i, i) = 0.0;
  }
  Matrix monitor_part = sums;

  const Vector e_comm = lay.pack_corruption(comm_part, zero);
  const Vector e_monitor = lay.pack_corruption(zero, monitor_part);
  const Vector eps_comm = epsilon_from_corruption(wacs, e_comm, corr);
  const Vector eps_monitor = epsilon_from_corruption(wacs, e_monitor, corr);
  out.residual_comm = two_step_residual(wacs, in, eps_comm).norm();
  out.residual_monitor = two_step_residual(wacs, in, eps_monitor).norm();

  const bool comm = !self_hit && out.residual_comm < out.residual_monitor;
  if (comm) {
    out.type = AttackType::comm;
    out.corruption = e_comm;
    out.applied_epsilon = eps_comm;
  } else {
    out.type = AttackType::monitor;
    out.corruption = e_monitor;
    out.applied_epsilon = eps_monitor;
  }
  out.epsilon = epsilon_from_corruption(wacs, out.corruption);
  return out;
}

WacsEstimator::WacsEstimator(WacsSystem wacs, int window, bool dispatch_corrections)
    : wacs_(std::move(wacs)), window_(window), dispatch_(dispatch_corrections) {
  if (window_ < 3) throw DimensionError("WACS estimator: window must span at least 3 steps");
}

const WacsEstimator::Snapshot& WacsEstimator::at(long step) const {
  return history_[static_cast<size_t>(step - first_kept_)];
}

Matrix WacsEstimator::correction_for(const AttackEstimate& est) const {
  Matrix ec;
  Matrix em;
  wacs_.layout.unpack_corruption(est.corruption, ec, em);
  return ec;
}

WacsEstimator::StepReport WacsEstimator::step(const ChannelMatrix& ym) {
  const ChannelLayout& lay = wacs_.layout;
  const int n = lay.generators();
  const long k = next_step_++;
  StepReport report;
  report.correction = Matrix::Zero(n, n);

  history_.push_back(Snapshot{lay.pack_measurements(ym), Matrix(), Matrix()});
  // H(k) depends on the correction dispatched at k, which is only known once
  // the commit for k-2 is done; it is filled in before returning.
  auto finish = [&]() {
    history_.back().correction = report.correction;
    history_.back().h = coupling_matrix(wacs_, ym, &report.correction).h;
    while (static_cast<long>(history_.size()) > window_ + 1) {
      history_.pop_front();
      ++first_kept_;
    }
  };

  const long start = k - window_ + 1;
  if (start < 0) {
    finish();
    return report;
  }
  report.window_full = true;

  std::vector<Vector> ys;
  std::vector<Matrix> hs;
  for (long j = start; j <= k; ++j) {
    ys.push_back(at(j).y);
    if (j < k) hs.push_back(at(j).h);
  }
  WindowEstimate est;
  try {
    est = estimate_window(wacs_, stack_and_annihilate(wacs_, ys, hs));
  } catch (...) {
    finish();
    throw;
  }
  report.certified = est.certified;
  report.attack_at_previous =
      est.corruption[static_cast<size_t>(window_ - 2)].lpNorm<Eigen::Infinity>() > kZeroThreshold;
  report.attack_at_current =
      est.corruption[static_cast<size_t>(window_ - 1)].lpNorm<Eigen::Infinity>() > kZeroThreshold;

  if (!state_ || next_commit_ < start) {
    state_ = est.initial_state;
    next_commit_ = start;
  }
  for (long j = next_commit_; j <= k - 2; ++j) {
    const Snapshot& lag = at(j);
    TwoStepInputs in{est.corruption[static_cast<size_t>(j - start)],
                     est.corruption[static_cast<size_t>(j + 2 - start)],
                     *state_,
                     at(j + 2).y,
                     lag.h,
                     lag.correction};
    AttackEstimate a = classify_two_step(wacs_, in, static_cast<int>(j));
    state_ = wacs_.a * *state_ + wacs_.q + lag.h * a.applied_epsilon;
    next_commit_ = j + 1;
    report.committed.push_back(std::move(a));
  }
  if (dispatch_ && !report.committed.empty() && report.committed.back().step == k - 2) {
    report.correction = correction_for(report.committed.back());
  }
  finish();
  return report;
}

}  // namespace secest
