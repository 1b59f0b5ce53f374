// Acceptance checks: one PASS/FAIL line per criterion. Pass criterion
// numbers to run a subset. Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "secest/attack_sim.hpp"
#include "secest/errors.hpp"
#include "secest/linear_estimator.hpp"
#include "secest/nonlinear_estimator.hpp"
#include "secest/sparse_decoder.hpp"

using namespace secest;
namespace fs = std::filesystem;

namespace {

const std::string kData = SECEST_DATA_DIR;

// Pinned tolerances and budgets.
constexpr double kAnnihilatorTol = 1e-10;
constexpr double kAnnihilatorSeconds = 5.0;
constexpr double kOracleTol = 1e-6;
constexpr double kOracleSeconds = 60.0;
constexpr double kRecoveryTol = 1e-6;
constexpr double kKronChainTol = 1e-12;
constexpr double kKronPowerTol = 1e-10;
constexpr double kEquilibriumTol = 1e-12;
constexpr double kEstimateTol = 1e-4;
constexpr double kAccuracyMin = 0.99;
constexpr long kAttackedStepsMin = 500;
constexpr double kDeviationRatioMax = 0.10;
constexpr double kRingSeconds = 120.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& fn) {
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
  std::fflush(stdout);
}

template <typename... Args>
std::string format(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome annihilator_property() {
  std::mt19937_64 rng(1001);
  const auto t0 = Clock::now();
  double worst_kill = 0.0;
  double worst_orth = 0.0;
  for (int t = 0; t < 500; ++t) {
    const int cols = oracle::uniform_int(rng, 1, 8);
    const int rows = oracle::uniform_int(rng, std::max(4, cols + 1), 30);
    const Matrix phi = oracle::gaussian_matrix(rng, rows, cols);
    const Annihilator ann = compute_annihilator(phi);
    const long r = ann.omega.rows();
    worst_kill = std::max(worst_kill, (ann.omega * phi).cwiseAbs().maxCoeff());
    worst_orth = std::max(
        worst_orth, (ann.omega * ann.omega.transpose() - Matrix::Identity(r, r)).cwiseAbs().maxCoeff());
  }
  const double secs = seconds_since(t0);
  return {worst_kill < kAnnihilatorTol && worst_orth < kAnnihilatorTol && secs < kAnnihilatorSeconds,
          format("500 matrices, max|Omega Phi| = %.2e, max|Omega Omega' - I| = %.2e, %.2f s", worst_kill,
                 worst_orth, secs)};
}

Outcome l1_l0_equivalence() {
  std::mt19937_64 rng(2002);
  const auto t0 = Clock::now();
  int certified = 0;
  int matched = 0;
  int smaller = 0;
  for (int t = 0; t < 200; ++t) {
    const int cols = oracle::uniform_int(rng, 6, 12);
    const int state = oracle::uniform_int(rng, 1, 3);
    const int s = oracle::uniform_int(rng, 1, 2);
    const Matrix m = compute_annihilator(oracle::gaussian_matrix(rng, cols, state)).omega;
    const auto support = oracle::random_support(rng, cols, s);
    const Vector e = oracle::planted_sparse(rng, cols, support);
    if (!certify_recoverability(m, s)) continue;
    ++certified;
    const SparseSolution l1 = l1_minimize(m, m * e);
    const auto l0 = l0_bruteforce(m, m * e, s);
    if (l0 && l1.support == l0->support &&
        (l1.error_vector - l0->error_vector).cwiseAbs().maxCoeff() < kOracleTol) {
      ++matched;
    } else if (l1.error_vector.lpNorm<1>() < e.lpNorm<1>() - kOracleTol) {
      ++smaller;
    }
  }
  const double secs = seconds_since(t0);
  return {certified > 0 && matched == certified && secs < kOracleSeconds,
          format("%d/%d certified instances agree (of 200 drawn); %d of the %d mismatches are feasible "
                 "points with strictly smaller l1 norm than the planted l0 solution, %.2f s",
                 matched, certified, smaller, certified - matched, secs)};
}

Outcome linear_exact_recovery() {
  std::mt19937_64 rng(3003);
  int trials = 0;
  int drawn = 0;
  int recovered = 0;
  int smaller = 0;
  double worst = 0.0;
  while (trials < 200) {
    ++drawn;
    const int n = oracle::uniform_int(rng, 2, 3);
    const int p = oracle::uniform_int(rng, 5, 6);
    const int horizon = oracle::uniform_int(rng, 2, 3);
    Matrix a = oracle::gaussian_matrix(rng, n, n);
    a /= 1.1 * a.jacobiSvd().singularValues()(0);
    const LinearSystem sys(a, oracle::gaussian_matrix(rng, p, n));
    // One attacked sensor per step, chosen afresh each step.
    if (!check_window_recoverability(sys, horizon, horizon)) continue;
    ++trials;
    const Vector x0 = oracle::gaussian_vector(rng, n);
    std::vector<Vector> y;
    std::vector<Vector> e;
    Vector x = x0;
    for (int k = 0; k < horizon; ++k) {
      Vector ek = Vector::Zero(p);
      ek(oracle::uniform_int(rng, 0, p - 1)) = oracle::planted_sparse(rng, 1, {0})(0);
      y.push_back(sys.c() * x + ek);
      e.push_back(ek);
      x = sys.a() * x;
    }
    const LinearEstimate est = secure_estimate_linear(sys, y);
    double err = (est.x0 - x0).cwiseAbs().maxCoeff();
    for (int k = 0; k < horizon; ++k) err = std::max(err, (est.attacks[k] - e[k]).cwiseAbs().maxCoeff());
    worst = std::max(worst, err);
    if (err < kRecoveryTol) {
      ++recovered;
    } else {
      double planted = 0.0;
      for (const Vector& ek : e) planted += ek.lpNorm<1>();
      if (est.stacked.error_vector.lpNorm<1>() < planted - kRecoveryTol) ++smaller;
    }
  }
  return {recovered == trials,
          format("%d/%d certified trials recovered (%d systems drawn), worst error %.2e; %d of the %d "
                 "misses decode to a strictly smaller l1 norm than the planted attack",
                 recovered, trials, drawn, worst, smaller, trials - recovered)};
}

Outcome feedback_reduction() {
  std::mt19937_64 rng(4004);
  int identical = 0;
  for (int t = 0; t < 50; ++t) {
    const int n = oracle::uniform_int(rng, 1, 4);
    const int p = oracle::uniform_int(rng, 1, 5);
    const int horizon = oracle::uniform_int(rng, (n + p - 1) / p, 6);
    const Matrix a = oracle::gaussian_matrix(rng, n, n);
    const Matrix c = oracle::gaussian_matrix(rng, p, n);
    const LinearSystem lin(a, c);
    NonlinearSystem sys{a, c, [n](const Vector&) { return Vector::Zero(n); }, Matrix::Zero(n, p)};
    std::vector<Vector> y;
    for (int k = 0; k < horizon; ++k) y.push_back(oracle::gaussian_vector(rng, p));
    const std::vector<Vector> v(static_cast<size_t>(horizon), Vector::Zero(n));
    const StackedObservation ref = stack_observation(lin, y);
    const LinearizedStack fl = transform_feedback_linearized(sys, y, v);
    const LinearizedStack mp = transform_with_mapping(sys, y, v);
    const Matrix id = Matrix::Identity(p * horizon, p * horizon);
    if (fl.y == ref.y && fl.phi == ref.phi && fl.psi == id && mp.y == ref.y && mp.phi == ref.phi &&
        mp.psi == id) {
      ++identical;
    }
  }
  return {identical == 50, format("%d/50 random systems give bitwise-identical (Y, Phi, Psi)", identical)};
}

Outcome kron_oracle() {
  double chain_err = 0.0;
  for (double v1 : {0.9, 1.0, 1.1}) {
    for (double v2 : {0.95, 1.0, 1.05}) {
      BusNetwork net;
      net.bus_count = 3;
      net.generator_count = 2;
      net.lines = {{0, 2, 0.0, 1.0}, {1, 2, 0.0, 1.0}};
      net.internal_voltage = {v1, v2};
      const ReducedNetwork red = kron_reduce(net);
      chain_err = std::max(chain_err, std::abs(red.admittance(0, 1) - Complex(0.0, 0.5)));
    }
  }
  std::mt19937_64 rng(5005);
  double power_err = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int n = oracle::uniform_int(rng, 2, 6);
    const BusNetwork net =
        oracle::random_network(rng, n, oracle::uniform_int(rng, 1, 8), oracle::uniform_int(rng, 0, 5));
    const ReducedNetwork red = kron_reduce(net);
    const ComplexMatrix ref = oracle::schur_reduction(net);
    for (int k = 0; k < 5; ++k) {
      const Vector theta = 0.5 * oracle::gaussian_vector(rng, n);
      const Vector p = electrical_power(red, theta);
      power_err = std::max(
          power_err,
          (p - oracle::reduced_power(ref, net.internal_voltage, theta)).cwiseAbs().maxCoeff());
    }
  }
  return {chain_err < kKronChainTol && power_err < kKronPowerTol,
          format("chain |b - 0.5| max %.2e, 20 random networks power error %.2e", chain_err, power_err)};
}

double max_speed_error(const SimulationTrace& tr) {
  double w = 0.0;
  for (const StepRecord& r : tr.steps) {
    w = std::max(w, (r.omega.array() - tr.nominal_speed).abs().maxCoeff());
  }
  return w;
}

double max_angle_change(const SimulationTrace& tr) {
  double th = 0.0;
  for (const StepRecord& r : tr.steps) th = std::max(th, (r.theta - tr.initial_theta).cwiseAbs().maxCoeff());
  return th;
}

Outcome closed_loop_equilibrium() {
  double worst_w = 0.0;
  double worst_th = 0.0;
  int runs = 0;
  std::vector<SimulationConfig> configs;
  SimulationConfig ring = load_simulation_config(kData + "/configs/ring3_protected.json");
  ring.horizon = 1000;
  ring.scenario.start_step = ring.horizon;
  configs.push_back(ring);
  std::mt19937_64 rng(6006);
  while (configs.size() < 5) {
    GridCase grid;
    grid.name = "random";
    grid.network = oracle::random_network(rng, 3, oracle::uniform_int(rng, 1, 4), 2);
    const ReducedNetwork red = kron_reduce(grid.network);
    if (red.edge_count() < 2) continue;
    grid.params = oracle::random_params(rng, 3);
    grid.initial.theta = 0.2 * oracle::gaussian_vector(rng, 3);
    grid.initial.omega = Vector::Constant(3, grid.params.nominal_speed);
    balance_mechanical_power(grid.params, red, grid.initial.theta);
    grid.mechanical_power_given = true;
    SimulationConfig cfg;
    cfg.network = grid;
    cfg.horizon = 1000;
    cfg.scenario.start_step = cfg.horizon;
    cfg.protection = configs.size() % 2 == 0;
    configs.push_back(cfg);
  }
  for (const SimulationConfig& cfg : configs) {
    const SimulationTrace tr = run_simulation(cfg);
    worst_w = std::max(worst_w, max_speed_error(tr));
    worst_th = std::max(worst_th, max_angle_change(tr));
    ++runs;
  }
  return {worst_w < kEquilibriumTol && worst_th == 0.0,
          format("%d networks x 1000 steps, max|omega - omega_s| = %.2e rad/s, max|theta - theta0| = %.2e",
                 runs, worst_w, worst_th)};
}

struct RingRuns {
  SimulationTrace on;
  SimulationTrace off;
  double seconds = 0.0;
};

const RingRuns& ring_runs() {
  static const RingRuns runs = [] {
    RingRuns r;
    const auto t0 = Clock::now();
    r.on = run_simulation(load_simulation_config(kData + "/configs/ring3_protected.json"));
    r.off = run_simulation(load_simulation_config(kData + "/configs/ring3_unprotected.json"));
    r.seconds = seconds_since(t0);
    return r;
  }();
  return runs;
}

Outcome wacs_recovery() {
  const RingRuns& r = ring_runs();
  const SimulationSummary s = summarize(r.on);
  const GridCase grid = load_grid_case(kData + "/networks/ring3.json");
  const ReducedNetwork red = kron_reduce(grid.network);
  const long n = red.generators();
  const long links = red.edge_count();
  const long per_step = correctable_bound(n, links, 5).measurements_per_step;
  long max_channels = 0;
  for (const StepRecord& rec : r.on.steps) {
    const Matrix sums = (rec.injected.ec + rec.injected.em).cwiseAbs();
    max_channels = std::max(max_channels, static_cast<long>((sums.array() > 0.0).count()));
  }
  const double dev_on = theta_deviation_deg(r.on, 200);
  const double dev_off = theta_deviation_deg(r.off, 200);
  const bool pass = n == 3 && links == 3 && max_channels <= per_step && s.estimator_failures == 0 &&
                    s.classified_steps >= kAttackedStepsMin && s.max_estimate_error < kEstimateTol &&
                    s.classification_accuracy >= kAccuracyMin && dev_on < kDeviationRatioMax * dev_off &&
                    r.seconds < kRingSeconds;
  return {pass, format("N=%ld L=%ld T=5, %ld channel(s)/step (bound %ld), %ld classified steps, accuracy "
                       "%.4f, max estimate error %.2e rad, deviation at step 200: %.3f deg protected vs "
                       "%.3f deg unprotected (ratio %.3f), %.2f s",
                       n, links, max_channels, per_step, s.classified_steps, s.classification_accuracy,
                       s.max_estimate_error, dev_on, dev_off, dev_on / dev_off, r.seconds)};
}

Outcome bound_table() {
  struct Row {
    long n, l, t;
  };
  const Row rows[] = {{10, 9, 10},  {10, 15, 10}, {10, 20, 10}, {10, 45, 10}, {3, 3, 5},
                      {2, 1, 2},    {39, 46, 4},  {5, 7, 3},    {4, 6, 7},    {10, 20, 100}};
  int ok = 0;
  std::string first;
  for (const Row& r : rows) {
    const CorrectableBound b = correctable_bound(r.n, r.l, r.t);
    const auto n = static_cast<double>(r.n);
    const auto l = static_cast<double>(r.l);
    const auto t = static_cast<double>(r.t);
    const long q_max = static_cast<long>(std::floor((n + 2 * l) * t / 2 - n));
    const long q_bar = static_cast<long>(std::floor(n / 2 + l - n / t));
    if (b.q_max == q_max && b.q_bar == q_bar) ++ok;
    if (r.n == 10 && r.l == 20 && r.t == 10) first = format("(10,20,10) -> Q_max %ld, q_bar %ld", b.q_max, b.q_bar);
  }
  return {ok == 10, format("%d/10 rows match direct evaluation; ", ok) + first};
}

double max_deviation(const SimulationTrace& tr) {
  double d = 0.0;
  for (int k = 0; k < static_cast<int>(tr.steps.size()); ++k) d = std::max(d, theta_deviation_deg(tr, k));
  return d;
}

Outcome qualitative_signature() {
  const RingRuns& r = ring_runs();
  const int last = static_cast<int>(r.off.steps.size()) - 1;
  // Unprotected: the deviation grows throughout the experiment and is
  // still growing at its end.
  bool drift = true;
  for (int k = 100; k <= last; k += 100) {
    drift = drift && theta_deviation_deg(r.off, k) > theta_deviation_deg(r.off, k - 100);
  }
  const double off_end = theta_deviation_deg(r.off, last);
  drift = drift && off_end - theta_deviation_deg(r.off, last - 100) > 0.01 * off_end;
  // Protected: the deviation stays an order of magnitude below the unprotected one.
  const double on_max = max_deviation(r.on);
  const double off_max = max_deviation(r.off);
  const bool bounded = on_max < kDeviationRatioMax * off_max;
  double err = 0.0;
  long committed = 0;
  for (const StepRecord& rec : r.on.steps) {
    if (!rec.estimate) continue;
    ++committed;
    err = std::max(err, rec.estimate_error);
  }
  const bool zero_error = committed == last - 1 && err < kEstimateTol;
  bool slot = false;
  try {
    build_new_england_scenario(kData + "/networks/new_england_39.json");
  } catch (const ParamFileMissing&) {
    slot = fs::exists(kData + "/networks/new_england_39.json");
  }
  // Long-horizon behaviour, reported for context.
  SimulationConfig long_on = load_simulation_config(kData + "/configs/ring3_protected.json");
  SimulationConfig long_off = load_simulation_config(kData + "/configs/ring3_unprotected.json");
  long_on.horizon = long_off.horizon = 4000;
  const SimulationTrace lon = run_simulation(long_on);
  const SimulationTrace loff = run_simulation(long_off);
  return {drift && bounded && zero_error && slot,
          format("over the %d-step experiment: unprotected deviation rises at every 100-step mark to "
                 "%.2f deg (%s), protected max %.3f deg vs unprotected max %.2f deg (%s); %ld committed "
                 "estimates, max error %.2e; 39-bus parameter slot %s; at 4000 steps both settle "
                 "(protected %.2f deg, unprotected %.2f deg)",
                 last + 1, off_end, drift ? "still rising" : "NOT rising", on_max, off_max,
                 bounded ? "bounded" : "NOT bounded", committed, err, slot ? "present" : "missing",
                 theta_deviation_deg(lon, 3999), theta_deviation_deg(loff, 3999))};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "secest_acceptance_determinism";
  fs::remove_all(root);
  SimulationConfig cfg = load_simulation_config(kData + "/configs/ring3_protected.json");
  cfg.horizon = 300;
  emit_outputs(run_simulation(cfg), (root / "a").string());
  emit_outputs(run_simulation(cfg), (root / "b").string());
  int files = 0;
  int same = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    ++files;
    const fs::path other = root / "b" / entry.path().filename();
    if (fs::exists(other) && slurp(entry.path()) == slurp(other)) ++same;
  }
  fs::remove_all(root);
  return {files > 0 && same == files, format("%d/%d output files byte-identical across two runs", same, files)};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    Outcome (*fn)();
  };
  const Criterion all[] = {
      {"annihilator correctness", annihilator_property},
      {"l1/l0 oracle equivalence", l1_l0_equivalence},
      {"exact recovery with a time-varying attacked sensor", linear_exact_recovery},
      {"feedback-linearization reduction", feedback_reduction},
      {"Kron oracle", kron_oracle},
      {"closed-loop equilibrium", closed_loop_equilibrium},
      {"WACS recovery at desk scale", wacs_recovery},
      {"correctable-attack formulas", bound_table},
      {"qualitative signature of the grid experiment", qualitative_signature},
      {"determinism", determinism},
  };
  std::vector<int> chosen;
  for (int a = 1; a < argc; ++a) {
    const int id = std::atoi(argv[a]);
    if (id < 1 || id > 10) {
      std::fprintf(stderr, "usage: acceptance [criterion 1-10 ...]\n");
      return 64;
    }
    chosen.push_back(id);
  }
  if (chosen.empty()) {
    for (int id = 1; id <= 10; ++id) chosen.push_back(id);
  }
  for (int id : chosen) report(id, all[id - 1].name, all[id - 1].fn);
  std::printf("%d/%zu criteria passed\n", static_cast<int>(chosen.size()) - failures, chosen.size());
  return failures;
}
