#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "secest/network_io.hpp"
#include "secest/wacs_estimator.hpp"

namespace secest {

enum class TypePolicy { random, comm, monitor };

/// A channel (i, j) of generator i's measurement of theta_j, 0-based.
struct ChannelTarget {
  int from = 0;
  int to = 0;
  double magnitude = 0.0;  ///< rad
};

struct RandomTargets {
  int generator = 0;  ///< draws from this generator's channel block
  int count = 0;
  double sigma = 0.0;  ///< rad, zero-mean Gaussian
  bool redraw_each_step = true;
};

struct AttackScenario {
  int start_step = 0;
  TypePolicy policy = TypePolicy::random;
  std::vector<ChannelTarget> fixed;
  RandomTargets random;
  std::uint64_t seed = 0;
};

/// Attack injected at one step: at most one type, e^c_ii always zero.
struct Injection {
  AttackType type = AttackType::none;
  Matrix ec;
  Matrix em;
};

/// Seeded scenario engine; identical seeds give identical schedules.
class AttackGenerator {
 public:
  /// Throws ConfigError when a target channel is absent from the reduced graph.
  AttackGenerator(const ReducedNetwork& red, AttackScenario scenario);
  Injection next(int step);

 private:
  std::vector<std::pair<int, int>> draw_targets(bool include_self);

  const ReducedNetwork* red_;
  AttackScenario scenario_;
  std::mt19937_64 rng_;
  std::vector<std::pair<int, int>> run_targets_;
};

struct SimulationConfig {
  std::string network_path;
  std::optional<GridCase> network;  ///< used instead of network_path when set
  AttackScenario scenario;
  int horizon = 500;
  double step = 0.01;
  bool protection = true;
  int window = 5;
};

// Configuration schema (JSON):
//
// {
//   "network": "../networks/ring3.json",   // relative to the config file
//   "horizon": 700, "step": 0.01, "window": 5,
//   "protection": true, "seed": 7,
//   "attack": {
//     "start": 10,
//     "type": "random",                     // "random" | "c" | "m"
//     "fixed": [{"from": 1, "to": 2, "deg": 90}],
//     "random": {"generator": 1, "count": 0, "sigma_deg": 10, "redraw": "step"}
//   }
// }

SimulationConfig parse_simulation_config(const nlohmann::json& doc, const std::string& base_dir);
SimulationConfig load_simulation_config(const std::string& path);

struct StepRecord {
  int step = 0;
  Vector theta;
  Vector omega;
  Injection injected;
  ChannelMatrix yc;
  ChannelMatrix ym;
  Matrix correction;  ///< offsets the generators subtracted
  Vector control;     ///< U_i
  std::optional<AttackEstimate> estimate;  ///< committed two steps later
  Matrix estimate_sums;                    ///< e^c + e^m per channel of the estimate
  bool estimate_correct = false;
  double estimate_error = 0.0;  ///< max |estimated - injected| channel sum
  bool tripped = false;         ///< some |theta_i - theta_j| above 90 degrees
  std::string estimator_error;  ///< non-empty when the WACS failed this step
};

struct SimulationTrace {
  std::string network_name;
  double step = 0.0;
  double nominal_speed = 0.0;
  bool protection = false;
  Vector initial_theta;
  std::vector<std::pair<int, int>> channels;  ///< (i, j) with j == i or a neighbour
  std::vector<StepRecord> steps;
};

struct SimulationSummary {
  double max_theta_dev_deg = 0.0;
  double omega_min_hz = 0.0;
  double omega_max_hz = 0.0;
  double classification_accuracy = 1.0;  ///< over attacked steps with a committed estimate
  long attacked_steps = 0;
  long classified_steps = 0;
  double max_estimate_error = 0.0;
  bool tripped = false;
  long estimator_failures = 0;
};

SimulationTrace run_simulation(const SimulationConfig& config);
SimulationSummary summarize(const SimulationTrace& trace);

/// Largest |theta_i(k) - theta_i(0)| over generators at step k, in degrees.
double theta_deviation_deg(const SimulationTrace& trace, int step);

/// Loads a 10-generator description and returns it with the standard
/// scenario: 90 degrees on channel (1,2), nine Gaussian channels from
/// generator 1's block, fair c/m coin. Throws ParamFileMissing.
std::pair<GridCase, AttackScenario> build_new_england_scenario(const std::string& param_file,
                                                              std::uint64_t seed = 0);

/// Writes trace.csv, attack_matrix.csv, estimate_matrix.csv,
/// estimate_error_matrix.csv, estimates.jsonl and summary.json into `dir`.
void emit_outputs(const SimulationTrace& trace, const std::string& dir);

nlohmann::json summary_to_json(const SimulationSummary& s);
nlohmann::json estimate_to_json(const AttackEstimate& e);

}  // namespace secest
