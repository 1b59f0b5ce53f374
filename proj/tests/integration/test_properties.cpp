#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "secest/attack_sim.hpp"

using namespace secest;

namespace {

GridCase random_grid(std::mt19937_64& rng) {
  for (;;) {
    GridCase grid;
    grid.name = "random";
    grid.network = oracle::random_network(rng, 3, oracle::uniform_int(rng, 1, 4), 2);
    const ReducedNetwork red = kron_reduce(grid.network);
    if (red.edge_count() < 2) continue;
    grid.params = oracle::random_params(rng, 3);
    grid.initial.theta = 0.1 * oracle::gaussian_vector(rng, 3);
    grid.initial.omega = Vector::Constant(3, grid.params.nominal_speed);
    balance_mechanical_power(grid.params, red, grid.initial.theta);
    grid.mechanical_power_given = true;
    return grid;
  }
}

double max_deviation(const SimulationTrace& tr) {
  double d = 0.0;
  for (int k = 0; k < static_cast<int>(tr.steps.size()); ++k) d = std::max(d, theta_deviation_deg(tr, k));
  return d;
}

}  // namespace

TEST_CASE("protection never increases the angle deviation") {
  std::mt19937_64 rng(71);
  for (int t = 0; t < 6; ++t) {
    SimulationConfig cfg;
    cfg.network = random_grid(rng);
    const ReducedNetwork red = kron_reduce(cfg.network->network);
    cfg.horizon = 300;
    cfg.scenario.start_step = 10;
    cfg.scenario.seed = static_cast<std::uint64_t>(t);
    const auto [i, j] = red.edges()[static_cast<size_t>(oracle::uniform_int(rng, 0, red.edge_count() - 1))];
    cfg.scenario.fixed = {{i, j, deg_to_rad(oracle::uniform_int(rng, 30, 120))}};
    cfg.protection = true;
    const SimulationTrace on = run_simulation(cfg);
    cfg.protection = false;
    const SimulationTrace off = run_simulation(cfg);
    CAPTURE(t);
    CHECK(summarize(on).estimator_failures == 0);
    CHECK(max_deviation(on) <= max_deviation(off));
  }
}

TEST_CASE("injected self-channel communication corruption is structurally zero") {
  const GridCase grid = load_grid_case(std::string(SECEST_DATA_DIR) + "/networks/ring3.json");
  const ReducedNetwork red = kron_reduce(grid.network);
  AttackScenario sc;
  sc.policy = TypePolicy::comm;
  sc.random = {1, 2, 0.5, true};
  sc.seed = 5;
  AttackGenerator gen(red, sc);
  for (int k = 0; k < 300; ++k) CHECK(gen.next(k).ec.diagonal().isZero());
}

TEST_CASE("committed estimates lag the injections by two steps") {
  const GridCase grid = load_grid_case(std::string(SECEST_DATA_DIR) + "/networks/ring3.json");
  const ReducedNetwork red = kron_reduce(grid.network);
  WacsEstimator est(assemble_wacs(red, grid.params, 0.01), 5, false);
  const ChannelLayout& lay = est.system().layout;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.3);
  GridState s = grid.initial;
  std::vector<double> injected;
  std::vector<double> committed;
  const int steps = 400;
  for (int k = 0; k < steps; ++k) {
    Matrix ec = Matrix::Zero(3, 3);
    ec(0, 1) = k >= 5 ? noise(rng) : 0.0;
    injected.push_back(ec(0, 1));
    const ChannelMatrix yc = received_measurements(red, s.theta, ec);
    const WacsEstimator::StepReport rep = est.step(yc);
    committed.push_back(rep.committed.empty() ? 0.0 : lay.channel_sums(rep.committed.back().corruption)(0, 1));
    s = euler_step(red, grid.params, s, yc, 0.01);
  }
  int best_lag = -1;
  double best = -1.0;
  for (int lag = 0; lag <= 5; ++lag) {
    double xy = 0.0;
    double xx = 0.0;
    double yy = 0.0;
    for (int k = 10; k + lag < steps; ++k) {
      xy += injected[static_cast<size_t>(k)] * committed[static_cast<size_t>(k + lag)];
      xx += injected[static_cast<size_t>(k)] * injected[static_cast<size_t>(k)];
      yy += committed[static_cast<size_t>(k + lag)] * committed[static_cast<size_t>(k + lag)];
    }
    const double r = xy / std::sqrt(xx * yy);
    if (r > best) {
      best = r;
      best_lag = lag;
    }
  }
  CHECK(best_lag == 2);
  CHECK(best > 0.999);
}
