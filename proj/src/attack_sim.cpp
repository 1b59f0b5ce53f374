#include "secest/attack_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "secest/errors.hpp"

namespace secest {

using nlohmann::json;
namespace fs = std::filesystem;

AttackGenerator::AttackGenerator(const ReducedNetwork& red, AttackScenario scenario)
    : red_(&red), scenario_(std::move(scenario)), rng_(scenario_.seed) {
  const int n = red.generators();
  for (const ChannelTarget& t : scenario_.fixed) {
    if (t.from < 0 || t.from >= n || t.to < 0 || t.to >= n || !red.adjacent(t.from, t.to)) {
      throw ConfigError("attack target (" + std::to_string(t.from + 1) + "," +
                        std::to_string(t.to + 1) + ") is not a channel of the reduced network");
    }
  }
  const RandomTargets& r = scenario_.random;
  if (r.count < 0 || r.sigma < 0.0) throw ConfigError("random attack count and sigma must be >= 0");
  if (r.count > 0) {
    if (r.generator < 0 || r.generator >= n) throw ConfigError("random attack generator out of range");
    if (!r.redraw_each_step) {
      run_targets_ = draw_targets(false);
    } else {
      draw_targets(true);  // validates the count; the schedule restarts below
      rng_.seed(scenario_.seed);
    }
  }
}

std::vector<std::pair<int, int>> AttackGenerator::draw_targets(bool include_self) {
  const int g = scenario_.random.generator;
  std::vector<std::pair<int, int>> pool;
  if (include_self) pool.emplace_back(g, g);
  for (int j : red_->neighbors(g)) {
    const bool fixed = std::any_of(scenario_.fixed.begin(), scenario_.fixed.end(),
                                   [&](const ChannelTarget& t) { return t.from == g && t.to == j; });
    if (!fixed) pool.emplace_back(g, j);
  }
  const auto count = static_cast<size_t>(scenario_.random.count);
  if (count > pool.size()) {
    throw ConfigError("random attack asks for " + std::to_string(count) + " channels but generator " +
                      std::to_string(g + 1) + " offers " + std::to_string(pool.size()));
  }
  std::shuffle(pool.begin(), pool.end(), rng_);
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

Injection AttackGenerator::next(int step) {
  const int n = red_->generators();
  Injection inj;
  inj.ec = Matrix::Zero(n, n);
  inj.em = Matrix::Zero(n, n);
  if (step < scenario_.start_step) return inj;
  switch (scenario_.policy) {
    case TypePolicy::comm:
      inj.type = AttackType::comm;
      break;
    case TypePolicy::monitor:
      inj.type = AttackType::monitor;
      break;
    case TypePolicy::random:
      inj.type = std::bernoulli_distribution(0.5)(rng_) ? AttackType::comm : AttackType::monitor;
      break;
  }
  const bool comm = inj.type == AttackType::comm;
  Matrix& target = comm ? inj.ec : inj.em;
  for (const ChannelTarget& t : scenario_.fixed) target(t.from, t.to) += t.magnitude;
  if (scenario_.random.count > 0) {
    const auto chosen = scenario_.random.redraw_each_step ? draw_targets(!comm) : run_targets_;
    std::normal_distribution<double> noise(0.0, scenario_.random.sigma);
    for (const auto& [i, j] : chosen) target(i, j) += noise(rng_);
  }
  if (target.cwiseAbs().maxCoeff() == 0.0) inj.type = AttackType::none;
  return inj;
}

namespace {

template <typename T>
T field_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

int channel_end(const json& obj, const char* key) {
  const int v = field_or<int>(obj, key, 0);
  if (v < 1) throw ConfigError(std::string("attack field '") + key + "' must be a generator >= 1");
  return v - 1;
}

}  // namespace

SimulationConfig parse_simulation_config(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  SimulationConfig cfg;
  if (!doc.contains("network")) throw ConfigError("config lacks 'network'");
  if (doc.at("network").is_string()) {
    fs::path p = doc.at("network").get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
    cfg.network_path = p.lexically_normal().string();
  } else {
    cfg.network = parse_grid_case(doc.at("network"));
    if (!cfg.network->mechanical_power_given) {
      balance_mechanical_power(cfg.network->params, kron_reduce(cfg.network->network),
                               cfg.network->initial.theta);
    }
  }
  cfg.horizon = field_or<int>(doc, "horizon", cfg.horizon);
  cfg.step = field_or<double>(doc, "step", cfg.step);
  cfg.window = field_or<int>(doc, "window", cfg.window);
  cfg.protection = field_or<bool>(doc, "protection", cfg.protection);
  cfg.scenario.seed = field_or<std::uint64_t>(doc, "seed", 0);
  if (cfg.window < 3) throw ConfigError("window must be >= 3");
  if (cfg.horizon < cfg.window) throw ConfigError("horizon must be at least the window length");
  if (!(cfg.step > 0.0)) throw ConfigError("step must be positive");

  if (doc.contains("attack")) {
    const json& a = doc.at("attack");
    cfg.scenario.start_step = field_or<int>(a, "start", 0);
    const std::string type = field_or<std::string>(a, "type", "random");
    if (type == "random") {
      cfg.scenario.policy = TypePolicy::random;
    } else if (type == "c") {
      cfg.scenario.policy = TypePolicy::comm;
    } else if (type == "m") {
      cfg.scenario.policy = TypePolicy::monitor;
    } else {
      throw ConfigError("attack type must be random, c or m (got '" + type + "')");
    }
    if (a.contains("fixed")) {
      for (const json& f : a.at("fixed")) {
        ChannelTarget t{channel_end(f, "from"), channel_end(f, "to"),
                        deg_to_rad(field_or<double>(f, "deg", 0.0))};
        if (t.from == t.to) throw ConfigError("fixed attacks target neighbour channels only");
        cfg.scenario.fixed.push_back(t);
      }
    }
    if (a.contains("random")) {
      const json& r = a.at("random");
      cfg.scenario.random.generator = channel_end(r, "generator");
      cfg.scenario.random.count = field_or<int>(r, "count", 0);
      cfg.scenario.random.sigma = deg_to_rad(field_or<double>(r, "sigma_deg", 10.0));
      const std::string redraw = field_or<std::string>(r, "redraw", "step");
      if (redraw != "step" && redraw != "run") throw ConfigError("redraw must be 'step' or 'run'");
      cfg.scenario.random.redraw_each_step = redraw == "step";
    }
  } else {
    cfg.scenario.start_step = cfg.horizon;
  }
  return cfg;
}

SimulationConfig load_simulation_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOFailure("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_simulation_config(doc, fs::path(path).parent_path().string());
}

namespace {

double max_channel_error(const ChannelLayout& lay, const AttackEstimate& est, const Injection& inj) {
  const Matrix diff = lay.channel_sums(est.corruption) - (inj.ec + inj.em);
  double worst = 0.0;
  for (int i = 0; i < lay.generators(); ++i) {
    worst = std::max(worst, std::abs(diff(i, i)));
    for (int j : lay.neighbors(i)) worst = std::max(worst, std::abs(diff(i, j)));
  }
  return worst;
}

bool pair_tripped(const Vector& theta) {
  const double limit = deg_to_rad(90.0);
  return theta.maxCoeff() - theta.minCoeff() > limit;
}

}  // namespace

SimulationTrace run_simulation(const SimulationConfig& config) {
  const GridCase grid = config.network ? *config.network : load_grid_case(config.network_path);
  const ReducedNetwork red = kron_reduce(grid.network);
  const int n = red.generators();
  const double ws = grid.params.nominal_speed;

  WacsEstimator wacs(assemble_wacs(red, grid.params, config.step), config.window,
                     config.protection);
  const ChannelLayout& lay = wacs.system().layout;
  AttackGenerator attacks(red, config.scenario);

  SimulationTrace trace;
  trace.network_name = grid.name;
  trace.step = config.step;
  trace.nominal_speed = ws;
  trace.protection = config.protection;
  trace.initial_theta = grid.initial.theta;
  for (int i = 0; i < n; ++i) {
    trace.channels.emplace_back(i, i);
    for (int j : lay.neighbors(i)) trace.channels.emplace_back(i, j);
  }

  GridState state = grid.initial;
  for (int k = 0; k < config.horizon; ++k) {
    StepRecord rec;
    rec.step = k;
    rec.theta = state.theta;
    rec.omega = state.omega;
    rec.tripped = pair_tripped(state.theta);
    rec.injected = attacks.next(k);
    rec.yc = received_measurements(red, state.theta, rec.injected.ec);
    rec.ym = rec.yc;
    for (int i = 0; i < n; ++i) {
      rec.ym(i, i) += rec.injected.em(i, i);
      for (int j : lay.neighbors(i)) rec.ym(i, j) += rec.injected.em(i, j);
    }

    rec.correction = Matrix::Zero(n, n);
    try {
      WacsEstimator::StepReport report = wacs.step(rec.ym);
      rec.correction = report.correction;
      for (AttackEstimate& est : report.committed) {
        StepRecord& past = trace.steps[static_cast<size_t>(est.step)];
        past.estimate_correct = est.type == past.injected.type;
        past.estimate_error = max_channel_error(lay, est, past.injected);
        past.estimate_sums = lay.channel_sums(est.corruption);
        past.estimate = std::move(est);
      }
    } catch (const Error& e) {
      rec.estimator_error = e.what();
    }

    ChannelMatrix used = rec.yc;
    for (int i = 0; i < n; ++i) {
      for (int j : lay.neighbors(i)) used(i, j) -= rec.correction(i, j);
    }
    rec.control.resize(n);
    for (int i = 0; i < n; ++i) {
      rec.control(i) = storage_control(grid.params.generators[static_cast<size_t>(i)], ws,
                                       state.omega(i), p_meas(red, i, used.row(i)));
    }
    state = euler_step(red, grid.params, state, used, config.step);
    trace.steps.push_back(std::move(rec));
  }
  return trace;
}

double theta_deviation_deg(const SimulationTrace& trace, int step) {
  if (step < 0 || static_cast<size_t>(step) >= trace.steps.size()) {
    throw DimensionError("step " + std::to_string(step) + " outside the trace");
  }
  const StepRecord& rec = trace.steps[static_cast<size_t>(step)];
  return rad_to_deg((rec.theta - trace.initial_theta).cwiseAbs().maxCoeff());
}

SimulationSummary summarize(const SimulationTrace& trace) {
  SimulationSummary s;
  double wmin = trace.nominal_speed;
  double wmax = trace.nominal_speed;
  long correct = 0;
  for (const StepRecord& rec : trace.steps) {
    s.max_theta_dev_deg = std::max(s.max_theta_dev_deg, theta_deviation_deg(trace, rec.step));
    wmin = std::min(wmin, rec.omega.minCoeff());
    wmax = std::max(wmax, rec.omega.maxCoeff());
    s.tripped = s.tripped || rec.tripped;
    if (!rec.estimator_error.empty()) ++s.estimator_failures;
    if (rec.injected.type != AttackType::none) {
      ++s.attacked_steps;
      if (rec.estimate) {
        ++s.classified_steps;
        if (rec.estimate_correct) ++correct;
      }
    }
    if (rec.estimate) s.max_estimate_error = std::max(s.max_estimate_error, rec.estimate_error);
  }
  s.omega_min_hz = rad_per_s_to_hz(wmin);
  s.omega_max_hz = rad_per_s_to_hz(wmax);
  s.classification_accuracy =
      s.classified_steps > 0 ? static_cast<double>(correct) / static_cast<double>(s.classified_steps)
                             : 1.0;
  return s;
}

std::pair<GridCase, AttackScenario> build_new_england_scenario(const std::string& param_file,
                                                              std::uint64_t seed) {
  if (!fs::exists(param_file)) {
    throw ParamFileMissing("parameter file " + param_file +
                           " not found; the 10-generator data must be supplied separately");
  }
  {
    std::ifstream in(param_file);
    const json doc = json::parse(in, nullptr, false);
    if (doc.is_object() && doc.value("placeholder", false)) {
      throw ParamFileMissing("parameter file " + param_file +
                             " is an unfilled placeholder; the 10-generator data must be supplied");
    }
  }
  GridCase grid = load_grid_case(param_file);
  if (grid.network.generator_count != 10) {
    throw ConfigError("the New England scenario needs 10 generators, file has " +
                      std::to_string(grid.network.generator_count));
  }
  AttackScenario sc;
  sc.policy = TypePolicy::random;
  sc.fixed.push_back(ChannelTarget{0, 1, deg_to_rad(90.0)});
  sc.random = RandomTargets{0, 9, deg_to_rad(10.0), true};
  sc.seed = seed;
  return {grid, sc};
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw IOFailure("cannot write " + p.string());
  return out;
}

std::string channel_label(int i, int j) {
  return "y_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
}

void write_matrix_csv(const SimulationTrace& trace, const fs::path& path,
                      const std::function<std::optional<Matrix>(const StepRecord&)>& values) {
  std::ofstream out = open_out(path);
  out << "channel";
  for (const StepRecord& rec : trace.steps) out << ',' << rec.step;
  out << '\n';
  std::vector<std::optional<Matrix>> cols;
  for (const StepRecord& rec : trace.steps) cols.push_back(values(rec));
  for (const auto& [i, j] : trace.channels) {
    out << channel_label(i, j);
    for (const auto& m : cols) {
      out << ',';
      if (m) out << num(rad_to_deg((*m)(i, j)));
    }
    out << '\n';
  }
  if (!out) throw IOFailure("failed writing " + path.string());
}

}  // namespace

json estimate_to_json(const AttackEstimate& e) {
  json doc;
  doc["k"] = e.step;
  doc["attack_type"] = to_string(e.type);
  doc["residual_c"] = e.residual_comm;
  doc["residual_m"] = e.residual_monitor;
  doc["E"] = std::vector<double>(e.corruption.data(), e.corruption.data() + e.corruption.size());
  doc["eps"] = std::vector<double>(e.epsilon.data(), e.epsilon.data() + e.epsilon.size());
  return doc;
}

json summary_to_json(const SimulationSummary& s) {
  return json{{"max_theta_dev_deg", s.max_theta_dev_deg},
              {"omega_min_hz", s.omega_min_hz},
              {"omega_max_hz", s.omega_max_hz},
              {"classification_accuracy", s.classification_accuracy},
              {"attacked_steps", s.attacked_steps},
              {"classified_steps", s.classified_steps},
              {"max_estimate_error_deg", rad_to_deg(s.max_estimate_error)},
              {"tripped", s.tripped},
              {"estimator_failures", s.estimator_failures}};
}

void emit_outputs(const SimulationTrace& trace, const std::string& dir) {
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IOFailure("cannot create output directory " + dir + ": " + ec.message());
  if (trace.steps.empty()) throw IOFailure("empty trace");
  const auto n = trace.steps.front().theta.size();

  {
    std::ofstream out = open_out(root / "trace.csv");
    out << "step,time_s";
    for (Eigen::Index i = 1; i <= n; ++i) out << ",theta_" << i << "_deg";
    for (Eigen::Index i = 1; i <= n; ++i) out << ",omega_" << i << "_hz";
    for (Eigen::Index i = 1; i <= n; ++i) out << ",control_" << i;
    out << ",attack_type,estimated_type,estimate_error_deg,correct,tripped,estimator_error\n";
    for (const StepRecord& rec : trace.steps) {
      out << rec.step << ',' << num(rec.step * trace.step);
      for (Eigen::Index i = 0; i < n; ++i) out << ',' << num(rad_to_deg(rec.theta(i)));
      for (Eigen::Index i = 0; i < n; ++i) out << ',' << num(rad_per_s_to_hz(rec.omega(i)));
      for (Eigen::Index i = 0; i < n; ++i) out << ',' << num(rec.control(i));
      out << ',' << to_string(rec.injected.type) << ',';
      if (rec.estimate) {
        out << to_string(rec.estimate->type) << ',' << num(rad_to_deg(rec.estimate_error)) << ','
            << (rec.estimate_correct ? 1 : 0);
      } else {
        out << ",,";
      }
      out << ',' << (rec.tripped ? 1 : 0) << ',' << csv_quote(rec.estimator_error) << '\n';
    }
    if (!out) throw IOFailure("failed writing trace.csv");
  }

  write_matrix_csv(trace, root / "attack_matrix.csv", [](const StepRecord& r) {
    return std::optional<Matrix>(r.injected.ec + r.injected.em);
  });
  write_matrix_csv(trace, root / "estimate_matrix.csv",
                   [&](const StepRecord& r) -> std::optional<Matrix> {
                     if (!r.estimate) return std::nullopt;
                     return r.estimate_sums;
                   });
  write_matrix_csv(trace, root / "estimate_error_matrix.csv",
                   [&](const StepRecord& r) -> std::optional<Matrix> {
                     if (!r.estimate) return std::nullopt;
                     return Matrix(r.estimate_sums - (r.injected.ec + r.injected.em));
                   });

  {
    std::ofstream out = open_out(root / "estimates.jsonl");
    for (const StepRecord& rec : trace.steps) {
      if (rec.estimate) out << estimate_to_json(*rec.estimate).dump() << '\n';
    }
    if (!out) throw IOFailure("failed writing estimates.jsonl");
  }
  {
    std::ofstream out = open_out(root / "summary.json");
    json doc = summary_to_json(summarize(trace));
    doc["network"] = trace.network_name;
    doc["protection"] = trace.protection;
    doc["steps"] = trace.steps.size();
    out << doc.dump(2) << '\n';
    if (!out) throw IOFailure("failed writing summary.json");
  }
}

}  // namespace secest
