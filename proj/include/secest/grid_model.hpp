#pragma once

#include <complex>
#include <vector>

#include "secest/linalg.hpp"

namespace secest {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// A transmission line with admittance g + j b between two buses (0-based).
struct Line {
  int from = 0;
  int to = 0;
  double g = 0.0;  ///< conductance, >= 0
  double b = 0.0;  ///< susceptance, > 0
};

struct Shunt {
  int bus = 0;
  double g = 0.0;
  double b = 0.0;
};

/// Buses 0..N-1 are generator terminals, N..q-1 load buses.
struct BusNetwork {
  int bus_count = 0;
  int generator_count = 0;
  std::vector<Line> lines;
  std::vector<Shunt> shunts;
  std::vector<double> internal_voltage;  ///< E_i per generator, p.u.

  /// Throws NetworkParseError on bad indices, sign violations or a
  /// disconnected graph.
  void validate() const;
  ComplexMatrix admittance_matrix() const;
};

struct GeneratorParams {
  double inertia = 1.0;           ///< H_i, seconds
  double damping = 0.0;           ///< d_i
  double storage_gain = 0.0;      ///< F_i >= 0
  double mechanical_power = 0.0;  ///< P_i^m, p.u.
};

struct PlantParams {
  double nominal_speed = 0.0;  ///< omega_s, rad/s
  std::vector<GeneratorParams> generators;

  void validate() const;
};

/// Generator-only network left after eliminating the load buses.
class ReducedNetwork {
 public:
  ReducedNetwork(ComplexMatrix reduced_admittance, std::vector<double> voltages);

  int generators() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  /// Equivalent line admittance between generators i != j.
  Complex admittance(int i, int j) const { return y_(i, j); }
  double magnitude(int i, int j) const { return magnitude_(i, j); }
  double phase(int i, int j) const { return phase_(i, j); }
  double voltage(int i) const { return voltages_[static_cast<size_t>(i)]; }
  const std::vector<double>& voltages() const { return voltages_; }
  /// Ascending generator indices.
  const std::vector<int>& neighbors(int i) const { return neighbors_[static_cast<size_t>(i)]; }
  bool adjacent(int i, int j) const;
  /// Edges (i, j) with i < j, lexicographic.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  bool connected() const;

 private:
  int n_ = 0;
  ComplexMatrix y_;
  Matrix magnitude_;
  Matrix phase_;
  std::vector<double> voltages_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<std::pair<int, int>> edges_;
};

/// Schur complement of the load block of the bus admittance matrix. Throws
/// SingularLoadBlock or Disconnected.
ReducedNetwork kron_reduce(const BusNetwork& net);

struct GridState {
  Vector theta;  ///< rad
  Vector omega;  ///< rad/s

  /// [theta_1, omega_1, theta_2, omega_2, ...]
  Vector stacked() const;
  static GridState from_stacked(const Vector& x);
};

/// Received-measurement table: entry (i, j) is what generator i holds for
/// theta_j. Only the diagonal and neighbour entries are meaningful; NaN
/// marks a missing value.
using ChannelMatrix = Matrix;

Vector electrical_power(const ReducedNetwork& red, const Vector& theta);

double storage_control(const GeneratorParams& gen, double nominal_speed, double omega,
                       double p_meas);

/// Electrical power of generator i evaluated on its received angles.
/// Throws MissingMeasurement if a neighbour entry is NaN.
double p_meas(const ReducedNetwork& red, int i, const Eigen::Ref<const Eigen::RowVectorXd>& yc_row);

/// True angles plus channel corruption; the diagonal is always the local
/// angle itself.
ChannelMatrix received_measurements(const ReducedNetwork& red, const Vector& theta,
                                    const Matrix& corruption);

/// alpha_i = 1 - T_s (d_i + F_i) / (2 H_i)
double speed_decay(const GeneratorParams& gen, double step);
/// beta_i = T_s (d_i + F_i) omega_s / (2 H_i); see euler_step.
double speed_offset(const GeneratorParams& gen, double nominal_speed, double step);
/// G~_ij = -T_s E_i E_j |y_ij| / (2 H_i)
double coupling_gain(const ReducedNetwork& red, const GeneratorParams& gen, int i, int j,
                     double step);

/// One forward-Euler step of the swing dynamics under the storage control
/// law:
///
///   theta+ = theta + T_s (omega - omega_s)
///   omega+ = omega_s + alpha (omega - omega_s) + sum_j f_ij
///   f_ij   = G~_ij [sin(theta_i - theta_j + phi_ij) - sin(yc_ii - yc_ij + phi_ij)]
///
/// which is omega+ = alpha omega + beta. Damping acts on the speed
/// deviation, so (theta*, omega_s) is a fixed point whenever the received
/// angles are clean.
GridState euler_step(const ReducedNetwork& red, const PlantParams& params, const GridState& state,
                     const ChannelMatrix& yc, double step);

/// Sets every P_i^m to the electrical power at `theta` so that angles
/// `theta` with nominal speed form an equilibrium.
void balance_mechanical_power(PlantParams& params, const ReducedNetwork& red, const Vector& theta);

}  // namespace secest
