#include "secest/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "secest/errors.hpp"

namespace secest {

namespace {

bool graph_connected(int n, const std::vector<std::vector<int>>& adj) {
  if (n == 0) return true;
  std::vector<bool> seen(static_cast<size_t>(n), false);
  std::queue<int> todo;
  todo.push(0);
  seen[0] = true;
  int count = 1;
  while (!todo.empty()) {
    const int u = todo.front();
    todo.pop();
    for (int v : adj[static_cast<size_t>(u)]) {
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = true;
        ++count;
        todo.push(v);
      }
    }
  }
  return count == n;
}

}  // namespace

void BusNetwork::validate() const {
  if (generator_count < 1) throw NetworkParseError("network needs at least one generator");
  if (bus_count < generator_count) {
    throw NetworkParseError("network has fewer buses than generators");
  }
  if (static_cast<int>(internal_voltage.size()) != generator_count) {
    throw NetworkParseError("one internal voltage per generator is required");
  }
  std::vector<std::vector<int>> adj(static_cast<size_t>(bus_count));
  for (const Line& l : lines) {
    if (l.from < 0 || l.to < 0 || l.from >= bus_count || l.to >= bus_count) {
      throw NetworkParseError("line references a bus outside 1.." + std::to_string(bus_count));
    }
    if (l.from == l.to) throw NetworkParseError("line connects a bus to itself");
    if (!(l.g >= 0.0)) throw NetworkParseError("line conductance must be >= 0");
    if (!(l.b > 0.0)) throw NetworkParseError("line susceptance must be > 0");
    adj[static_cast<size_t>(l.from)].push_back(l.to);
    adj[static_cast<size_t>(l.to)].push_back(l.from);
  }
  for (const Shunt& s : shunts) {
    if (s.bus < 0 || s.bus >= bus_count) throw NetworkParseError("shunt on unknown bus");
  }
  if (!graph_connected(bus_count, adj)) throw NetworkParseError("bus network is not connected");
}

ComplexMatrix BusNetwork::admittance_matrix() const {
  ComplexMatrix y = ComplexMatrix::Zero(bus_count, bus_count);
  for (const Line& l : lines) {
    const Complex yl(l.g, l.b);
    y(l.from, l.from) += yl;
    y(l.to, l.to) += yl;
    y(l.from, l.to) -= yl;
    y(l.to, l.from) -= yl;
  }
  for (const Shunt& s : shunts) y(s.bus, s.bus) += Complex(s.g, s.b);
  return y;
}

void PlantParams::validate() const {
  if (!(nominal_speed > 0.0)) throw NetworkParseError("nominal speed must be positive");
  for (const GeneratorParams& g : generators) {
    if (!(g.inertia > 0.0)) throw NetworkParseError("generator inertia must be positive");
    if (!(g.storage_gain >= 0.0)) throw NetworkParseError("storage gain must be >= 0");
  }
}

ReducedNetwork::ReducedNetwork(ComplexMatrix reduced_admittance, std::vector<double> voltages)
    : n_(static_cast<int>(reduced_admittance.rows())),
      y_(ComplexMatrix::Zero(n_, n_)),
      magnitude_(Matrix::Zero(n_, n_)),
      phase_(Matrix::Zero(n_, n_)),
      voltages_(std::move(voltages)),
      neighbors_(static_cast<size_t>(n_)) {
  if (reduced_admittance.cols() != n_ || static_cast<int>(voltages_.size()) != n_) {
    throw DimensionError("reduced network: admittance and voltage sizes differ");
  }
  double scale = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (i != j) scale = std::max(scale, std::abs(reduced_admittance(i, j)));
    }
  }
  const double floor = 1e-12 * std::max(scale, 1e-300);
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      // Equivalent line admittance is the negated off-diagonal entry; the
      // two triangles agree up to round-off, so use their mean.
      const Complex yij = -0.5 * (reduced_admittance(i, j) + reduced_admittance(j, i));
      if (std::abs(yij) <= floor) continue;
      y_(i, j) = y_(j, i) = yij;
      magnitude_(i, j) = magnitude_(j, i) = std::abs(yij);
      phase_(i, j) = phase_(j, i) = std::atan2(yij.real(), yij.imag());
      neighbors_[static_cast<size_t>(i)].push_back(j);
      neighbors_[static_cast<size_t>(j)].push_back(i);
      edges_.emplace_back(i, j);
    }
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
}

bool ReducedNetwork::adjacent(int i, int j) const {
  return i != j && magnitude_(i, j) > 0.0;
}

bool ReducedNetwork::connected() const { return graph_connected(n_, neighbors_); }

ReducedNetwork kron_reduce(const BusNetwork& net) {
  net.validate();
  const ComplexMatrix y = net.admittance_matrix();
  const int n = net.generator_count;
  const int loads = net.bus_count - n;
  ComplexMatrix reduced = y.topLeftCorner(n, n);
  if (loads > 0) {
    const ComplexMatrix yll = y.bottomRightCorner(loads, loads);
    Eigen::FullPivLU<ComplexMatrix> lu(yll);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw SingularLoadBlock("load-bus admittance block is singular");
    reduced -= y.topRightCorner(n, loads) * lu.solve(y.bottomLeftCorner(loads, n));
  }
  ReducedNetwork out(reduced, net.internal_voltage);
  if (!out.connected()) throw Disconnected("reduced generator graph is disconnected");
  return out;
}

Vector GridState::stacked() const {
  Vector x(2 * theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    x(2 * i) = theta(i);
    x(2 * i + 1) = omega(i);
  }
  return x;
}

GridState GridState::from_stacked(const Vector& x) {
  GridState s;
  const Eigen::Index n = x.size() / 2;
  s.theta.resize(n);
  s.omega.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.theta(i) = x(2 * i);
    s.omega(i) = x(2 * i + 1);
  }
  return s;
}

Vector electrical_power(const ReducedNetwork& red, const Vector& theta) {
  Vector p = Vector::Zero(red.generators());
  for (int i = 0; i < red.generators(); ++i) {
    for (int j : red.neighbors(i)) {
      p(i) += red.voltage(i) * red.voltage(j) * red.magnitude(i, j) *
              std::sin(theta(i) - theta(j) + red.phase(i, j));
    }
  }
  return p;
}

double storage_control(const GeneratorParams& gen, double nominal_speed, double omega,
                       double p_meas_value) {
  return -gen.mechanical_power + p_meas_value - gen.storage_gain * (omega - nominal_speed);
}

double p_meas(const ReducedNetwork& red, int i,
              const Eigen::Ref<const Eigen::RowVectorXd>& yc_row) {
  if (yc_row.size() != red.generators()) throw DimensionError("p_meas: row length mismatch");
  if (std::isnan(yc_row(i))) {
    throw MissingMeasurement("generator " + std::to_string(i + 1) + " lacks its own angle");
  }
  double p = 0.0;
  for (int j : red.neighbors(i)) {
    if (std::isnan(yc_row(j))) {
      throw MissingMeasurement("generator " + std::to_string(i + 1) + " lacks the angle of " +
                               std::to_string(j + 1));
    }
    p += red.voltage(i) * red.voltage(j) * red.magnitude(i, j) *
         std::sin(yc_row(i) - yc_row(j) + red.phase(i, j));
  }
  return p;
}

ChannelMatrix received_measurements(const ReducedNetwork& red, const Vector& theta,
                                    const Matrix& corruption) {
  const int n = red.generators();
  ChannelMatrix yc = ChannelMatrix::Constant(n, n, std::nan(""));
  for (int i = 0; i < n; ++i) {
    yc(i, i) = theta(i);
    for (int j : red.neighbors(i)) yc(i, j) = theta(j) + corruption(i, j);
  }
  return yc;
}

double speed_decay(const GeneratorParams& gen, double step) {
  return 1.0 - step * (gen.damping + gen.storage_gain) / (2.0 * gen.inertia);
}

double speed_offset(const GeneratorParams& gen, double nominal_speed, double step) {
  return step * (gen.damping + gen.storage_gain) * nominal_speed / (2.0 * gen.inertia);
}

double coupling_gain(const ReducedNetwork& red, const GeneratorParams& gen, int i, int j,
                     double step) {
  return -step * red.voltage(i) * red.voltage(j) * red.magnitude(i, j) / (2.0 * gen.inertia);
}

GridState euler_step(const ReducedNetwork& red, const PlantParams& params, const GridState& state,
                     const ChannelMatrix& yc, double step) {
  if (!(step > 0.0)) throw DimensionError("euler step: T_s must be positive");
  const int n = red.generators();
  if (state.theta.size() != n || state.omega.size() != n ||
      static_cast<int>(params.generators.size()) != n || yc.rows() != n || yc.cols() != n) {
    throw DimensionError("euler step: size mismatch");
  }
  const double ws = params.nominal_speed;
  GridState next;
  next.theta = state.theta + step * (state.omega.array() - ws).matrix();
  next.omega.resize(n);
  for (int i = 0; i < n; ++i) {
    const GeneratorParams& gen = params.generators[static_cast<size_t>(i)];
    double coupling = 0.0;
    for (int j : red.neighbors(i)) {
      if (std::isnan(yc(i, j))) throw MissingMeasurement("euler step: missing neighbour angle");
      const double phi = red.phase(i, j);
      coupling += coupling_gain(red, gen, i, j, step) *
                  (std::sin(state.theta(i) - state.theta(j) + phi) -
                   std::sin(yc(i, i) - yc(i, j) + phi));
    }
    next.omega(i) = ws + speed_decay(gen, step) * (state.omega(i) - ws) + coupling;
  }
  return next;
}

void balance_mechanical_power(PlantParams& params, const ReducedNetwork& red, const Vector& theta) {
  const Vector pe = electrical_power(red, theta);
  for (int i = 0; i < red.generators(); ++i) {
    params.generators[static_cast<size_t>(i)].mechanical_power = pe(i);
  }
}

}  // namespace secest
