#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "secest/grid_model.hpp"
#include "secest/linalg.hpp"

namespace oracle {

using secest::ComplexMatrix;
using secest::Matrix;
using secest::Vector;

inline Matrix gaussian_matrix(std::mt19937_64& rng, long rows, long cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) m(i, j) = n(rng);
  }
  return m;
}

inline Vector gaussian_vector(std::mt19937_64& rng, long size) {
  return gaussian_matrix(rng, size, 1).col(0);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// `count` distinct indices from 0..n-1, ascending.
inline std::vector<int> random_support(std::mt19937_64& rng, int n, int count) {
  std::vector<int> all(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(static_cast<size_t>(count));
  std::sort(all.begin(), all.end());
  return all;
}

/// Sparse vector with entries of magnitude in [0.5, 2] and random sign.
inline Vector planted_sparse(std::mt19937_64& rng, int n, const std::vector<int>& support) {
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  Vector e = Vector::Zero(n);
  for (int i : support) e(i) = (rng() & 1U ? 1.0 : -1.0) * mag(rng);
  return e;
}

/// Reduced admittance by explicit inversion of the load block, assembled
/// entry by entry from the line list.
inline ComplexMatrix schur_reduction(const secest::BusNetwork& net) {
  const int q = net.bus_count;
  const int n = net.generator_count;
  ComplexMatrix y = ComplexMatrix::Zero(q, q);
  for (const secest::Line& l : net.lines) {
    const std::complex<double> v(l.g, l.b);
    y(l.from, l.to) -= v;
    y(l.to, l.from) -= v;
    y(l.from, l.from) += v;
    y(l.to, l.to) += v;
  }
  for (const secest::Shunt& s : net.shunts) y(s.bus, s.bus) += std::complex<double>(s.g, s.b);
  if (q == n) return y;
  const ComplexMatrix inv = y.block(n, n, q - n, q - n).inverse();
  ComplexMatrix red(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::complex<double> acc = y(i, j);
      for (int a = 0; a < q - n; ++a) {
        for (int b = 0; b < q - n; ++b) acc -= y(i, n + a) * inv(a, b) * y(n + b, j);
      }
      red(i, j) = acc;
    }
  }
  return red;
}

/// Power injections sum_j E_i E_j |y_ij| sin(theta_i - theta_j + phi_ij)
/// with y_ij = -Y_red(i, j) and phi_ij = atan2(Re y_ij, Im y_ij).
inline Vector reduced_power(const ComplexMatrix& red, const std::vector<double>& e,
                            const Vector& theta) {
  const long n = red.rows();
  Vector p = Vector::Zero(n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::complex<double> yij = -red(i, j);
      if (std::abs(yij) == 0.0) continue;
      const double phi = std::atan2(yij.real(), yij.imag());
      p(i) += e[static_cast<size_t>(i)] * e[static_cast<size_t>(j)] * std::abs(yij) *
              std::sin(theta(i) - theta(j) + phi);
    }
  }
  return p;
}

/// Connected random network: generators 0..n-1, loads n..q-1, a random
/// spanning tree plus extra lines, a conductive shunt on every load bus.
inline secest::BusNetwork random_network(std::mt19937_64& rng, int generators, int loads,
                                         int extra_lines) {
  std::uniform_real_distribution<double> b(2.0, 12.0);
  std::uniform_real_distribution<double> g(0.0, 0.3);
  std::uniform_real_distribution<double> v(0.95, 1.08);
  secest::BusNetwork net;
  net.generator_count = generators;
  net.bus_count = generators + loads;
  const int q = net.bus_count;
  // Every generator hangs off a load bus (or another generator when there
  // are no loads) so the load block stays nonsingular.
  std::vector<int> order(static_cast<size_t>(q));
  for (int i = 0; i < q; ++i) order[static_cast<size_t>(i)] = i;
  std::shuffle(order.begin() + 1, order.end(), rng);
  for (int k = 1; k < q; ++k) {
    const int a = order[static_cast<size_t>(k)];
    const int parent = order[static_cast<size_t>(uniform_int(rng, 0, k - 1))];
    net.lines.push_back({a, parent, g(rng), b(rng)});
  }
  for (int e = 0; e < extra_lines; ++e) {
    const int a = uniform_int(rng, 0, q - 1);
    int c = uniform_int(rng, 0, q - 2);
    if (c >= a) ++c;
    net.lines.push_back({a, c, g(rng), b(rng)});
  }
  for (int l = generators; l < q; ++l) net.shunts.push_back({l, g(rng) + 0.2, 0.05});
  for (int i = 0; i < generators; ++i) net.internal_voltage.push_back(v(rng));
  return net;
}

inline secest::PlantParams random_params(std::mt19937_64& rng, int generators) {
  std::uniform_real_distribution<double> h(2.5, 8.0);
  std::uniform_real_distribution<double> d(0.5, 2.0);
  std::uniform_real_distribution<double> f(2.0, 8.0);
  secest::PlantParams p;
  p.nominal_speed = 2.0 * 3.14159265358979323846 * 60.0;
  for (int i = 0; i < generators; ++i) p.generators.push_back({h(rng), d(rng), f(rng), 0.0});
  return p;
}

}  // namespace oracle
