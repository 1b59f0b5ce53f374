#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "secest/grid_model.hpp"
#include "secest/sparse_decoder.hpp"

namespace secest {

/// Index bookkeeping for the channel-indexed vectors the WACS works with.
///
/// Measurements Y(k), length N + 2L, generator by generator:
///   [y_ii; y_i,N_i(1); ...; y_i,N_i(l_i)]   with N_i ascending.
/// Corruptions E(k), length N + 4L:
///   [E^c_1; ...; E^c_N; E^m_1; ...; E^m_N]
///   E^c_i = [e^c_i,N_i(1..l_i)],  E^m_i = [e^m_ii; e^m_i,N_i(1..l_i)]
/// Linearised channel terms eps(k), length 4L:
///   [eps_1; ...; eps_N],  eps_i = [eps^c_i,N_i(1..l_i); eps^s_i,N_i(1..l_i)]
class ChannelLayout {
 public:
  explicit ChannelLayout(const ReducedNetwork& red);

  int generators() const { return n_; }
  int links() const { return links_; }
  int measurement_size() const { return n_ + 2 * links_; }
  int corruption_size() const { return n_ + 4 * links_; }
  int epsilon_size() const { return 4 * links_; }
  const std::vector<int>& neighbors(int i) const { return neighbors_[static_cast<size_t>(i)]; }

  /// Row of y_ij in Y(k); j == i selects the self measurement.
  int measurement_row(int i, int j) const;
  int comm_index(int i, int j) const;     ///< e^c_ij in E(k), j != i
  int monitor_index(int i, int j) const;  ///< e^m_ij in E(k)
  int eps_cos_index(int i, int j) const;
  int eps_sin_index(int i, int j) const;

  Vector pack_measurements(const ChannelMatrix& ym) const;
  ChannelMatrix unpack_measurements(const Vector& y) const;
  /// Corruption vector from channel matrices (NaN-free; non-neighbour
  /// entries are ignored, e^c_ii must be zero).
  Vector pack_corruption(const Matrix& ec, const Matrix& em) const;
  void unpack_corruption(const Vector& e, Matrix& ec, Matrix& em) const;
  /// Per-channel sums e^c_ij + e^m_ij as an N x N matrix.
  Matrix channel_sums(const Vector& e) const;

 private:
  int n_ = 0;
  int links_ = 0;
  std::vector<std::vector<int>> neighbors_;
  std::vector<int> meas_offset_;
  std::vector<int> comm_offset_;
  std::vector<int> eps_offset_;
  int position(int i, int j) const;  // 0 for j == i, 1 + rank of j in N_i
};

/// Discretised enlarged system
///   X(k+1) = A X(k) + q + H(k) eps(k),   Y(k) = C X(k) + D E(k).
struct WacsSystem {
  ChannelLayout layout;
  double step = 0.0;
  double nominal_speed = 0.0;
  Matrix a;   ///< 2N x 2N, blkdiag [[1, T_s], [0, alpha_i]]
  Vector q;   ///< 2N, [-T_s omega_s; beta_i] blocks
  Matrix c;   ///< (N+2L) x 2N, selects theta_j for every y_ij
  Matrix d1;  ///< (N+2L) x 2L
  Matrix d2;  ///< identity of size N+2L
  Matrix d;   ///< [D1, D2]
  Matrix phase;  ///< phi_ij of the reduced network
  Matrix gain;   ///< G~_ij = -T_s E_i E_j |y_ij| / (2 H_i)
};

WacsSystem assemble_wacs(const ReducedNetwork& red, const PlantParams& params, double step);

/// H(k) for one time step. gs/gc hold G^s_ij and G^c_ij. Row 2i+1 of H
/// carries h_i' = [G^s_i,N_i(..), -G^c_i,N_i(..)] so that H eps adds
/// sum_j (G^s_ij eps^c_ij - G^c_ij eps^s_ij) to omega_i.
struct CouplingMatrix {
  Matrix h;
  Matrix gs;
  Matrix gc;
};

/// `correction` (optional) is the offset each generator subtracted from
/// its received angle e^c_ij at that step; the WACS knows it because it
/// dispatched it.
CouplingMatrix coupling_matrix(const WacsSystem& wacs, const ChannelMatrix& ym,
                               const Matrix* correction = nullptr);

/// eps^c_ij = cos(u - e) - cos(u), eps^s_ij = sin(u - e) - sin(u) with
/// u = e^m_ii - e^m_ij and e = e^c_ij minus any dispatched correction.
Vector epsilon_from_corruption(const WacsSystem& wacs, const Vector& corruption,
                               const Matrix* correction = nullptr);

struct StackedWacsSystem {
  int horizon = 0;
  Vector y_bar;
  Matrix phi;
  Matrix psi1;
  Matrix psi2;
  Matrix psi;  ///< [Psi1, Psi2]
  Annihilator annihilator;
};

/// y_window holds Y(0..T-1) in packed form, h_window holds H(0..T-2)
/// (extra trailing entries are ignored). Throws DimensionError for T < 2
/// and RankDeficient when Phi lacks full column rank.
StackedWacsSystem stack_and_annihilate(const WacsSystem& wacs, const std::vector<Vector>& y_window,
                                       const std::vector<Matrix>& h_window);

struct CorrectableBound {
  long q_max = 0;                 ///< floor((N+2L)T/2 - N)
  long q_bar = 0;                 ///< floor(N/2 + L - N/T)
  long measurements_per_step = 0; ///< floor(N/4 + L/2 - N/(2T))
  long max_average = 0;           ///< ceil(N/4 + L/2 - 1)
};

CorrectableBound correctable_bound(long generators, long links, long horizon);

struct WindowEstimate {
  Vector e_bar;
  std::vector<Vector> corruption;  ///< E(0..T-1)
  std::vector<Vector> epsilon;     ///< eps(0..T-2), one non-unique representative
  Vector initial_state;            ///< X at the window start
  /// Nonzero channels in the window stay within the per-step bound times T.
  bool certified = true;
  double residual_norm = 0.0;
};

/// Solves min |E_bar|_1 s.t. Omega Y_bar = Omega Psi E_bar. Columns are
/// scaled to unit norm (a weighted l1 problem) because the eps columns are
/// smaller than the corruption columns by a factor of roughly T_s * G~;
/// columns that vanish after annihilation are pinned to zero.
WindowEstimate estimate_window(const WacsSystem& wacs, const StackedWacsSystem& stacked);

enum class AttackType { none, comm, monitor };
std::string to_string(AttackType t);

struct AttackEstimate {
  int step = 0;
  Vector corruption;  ///< E(k), N + 4L
  Vector epsilon;     ///< eps(k), 4L, caused by the attack alone
  /// eps(k) including any dispatched correction; drives the state rollout.
  Vector applied_epsilon;
  AttackType type = AttackType::none;
  /// Two-step residual norms for the c-attack and m-attack hypotheses.
  double residual_comm = 0.0;
  double residual_monitor = 0.0;
};

struct TwoStepInputs {
  Vector corruption_lagged;   ///< E_est(k-2)
  Vector corruption_current;  ///< E_est(k)
  Vector state_lagged;        ///< X(k-2)
  Vector measurement;         ///< Y(k)
  Matrix coupling_lagged;     ///< H(k-2)
  Matrix correction_lagged;   ///< dispatched e^c offsets at k-2 (empty = none)
};

/// Two-step residual Y(k) - C A^2 X(k-2) - C A q - C q - C A H(k-2) eps(k-2) - D E(k).
Vector two_step_residual(const WacsSystem& wacs, const TwoStepInputs& in, const Vector& eps_lagged);

/// Picks the hypothesis (c-attack: e^m := 0, e^c := e^c + e^m; m-attack:
/// e^c := 0, e^m := e^c + e^m) with the smaller two-step residual. The
/// c-attack needs a strict win. A corrupted self-measurement y_ii can
/// only be an m-attack.
AttackEstimate classify_two_step(const WacsSystem& wacs, const TwoStepInputs& in, int step);

/// Sliding-window estimator run by the WACS. Feed one measurement snapshot
/// per step; at step k it commits the estimate for k-2 (the first full
/// window commits every step up to k-2 at once).
class WacsEstimator {
 public:
  /// With `dispatch_corrections` the estimator hands the generators the
  /// committed e^c(k-2) at every step k; they subtract it from their
  /// received angles. Throws DimensionError for window < 3.
  WacsEstimator(WacsSystem wacs, int window, bool dispatch_corrections);

  struct StepReport {
    std::vector<AttackEstimate> committed;
    bool window_full = false;
    bool certified = true;
    /// Nonzero corruption seen at k-1 / k (not yet committed).
    bool attack_at_previous = false;
    bool attack_at_current = false;
    /// Offsets the generators subtract from y^c(k) this step (N x N).
    Matrix correction;
  };

  /// Processes Y(k). Estimation failures propagate; the snapshot is kept
  /// and the next step resumes (re-anchoring if commits fell out of the
  /// window).
  StepReport step(const ChannelMatrix& ym);

  const WacsSystem& system() const { return wacs_; }
  int window() const { return window_; }
  int steps_seen() const { return static_cast<int>(next_step_); }
  /// Committed state X for the next step to be committed, if any.
  const std::optional<Vector>& committed_state() const { return state_; }

 private:
  struct Snapshot {
    Vector y;
    Matrix h;
    Matrix correction;
  };
  const Snapshot& at(long step) const;
  Matrix correction_for(const AttackEstimate& est) const;

  WacsSystem wacs_;
  int window_;
  bool dispatch_;
  long next_step_ = 0;
  long first_kept_ = 0;
  std::deque<Snapshot> history_;
  std::optional<Vector> state_;  // X(next_commit_)
  long next_commit_ = 0;
};

}  // namespace secest
