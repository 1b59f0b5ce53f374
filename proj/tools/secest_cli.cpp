#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "secest/attack_sim.hpp"
#include "secest/errors.hpp"
#include "secest/matrix_io.hpp"
#include "secest/sparse_decoder.hpp"

using namespace secest;
using nlohmann::json;

namespace {

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& protection, const std::string& out_dir) {
  SimulationConfig cfg = load_simulation_config(config_path);
  if (seed) cfg.scenario.seed = *seed;
  if (protection == "on") cfg.protection = true;
  if (protection == "off") cfg.protection = false;
  const SimulationTrace trace = run_simulation(cfg);
  for (const StepRecord& rec : trace.steps) {
    if (!rec.estimate) continue;
    json line = estimate_to_json(*rec.estimate);
    line["record"] = "AttackEstimate";
    std::cout << line.dump() << '\n';
  }
  for (const StepRecord& rec : trace.steps) {
    if (!rec.estimator_error.empty()) {
      std::cerr << "step " << rec.step << ": estimator failed: " << rec.estimator_error << '\n';
    }
  }
  emit_outputs(trace, out_dir);
  json summary = summary_to_json(summarize(trace));
  summary["record"] = "summary";
  std::cout << summary.dump() << '\n';
  return 0;
}

int cmd_certify(const std::string& network_path, int window, double step) {
  const GridCase grid = load_grid_case(network_path);
  const ReducedNetwork red = kron_reduce(grid.network);
  const WacsSystem wacs = assemble_wacs(red, grid.params, step);
  const ChannelLayout& lay = wacs.layout;
  const CorrectableBound b = correctable_bound(lay.generators(), lay.links(), window);
  json out;
  out["network"] = grid.name;
  out["generators"] = lay.generators();
  out["links"] = lay.links();
  out["window"] = window;
  out["q_max"] = b.q_max;
  out["q_bar"] = b.q_bar;
  out["measurements_per_step"] = b.measurements_per_step;
  out["max_average"] = b.max_average;
  const Matrix phi = stack_observability(wacs.a, wacs.c, window);
  out["observability_rank"] = numerical_rank(phi);
  try {
    const Annihilator ann = compute_annihilator(phi);
    const long rows = ann.omega.rows();
    out["annihilator_rows"] = rows;
    out["annihilation_error"] = (ann.omega * phi).cwiseAbs().maxCoeff();
    out["orthonormality_error"] =
        (ann.omega * ann.omega.transpose() - Matrix::Identity(rows, rows)).cwiseAbs().maxCoeff();
    out["certified"] = true;
  } catch (const RankDeficient& e) {
    out["certified"] = false;
    out["reason"] = e.what();
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_decode(const std::string& phi_path, const std::string& psi_path, const std::string& y_path,
               const std::string& out_path) {
  const Matrix phi = read_matrix_file(phi_path);
  const Vector y = read_vector_file(y_path);
  const DecodeResult r =
      psi_path.empty() ? decode(phi, y) : decode(phi, read_matrix_file(psi_path), y);
  if (!out_path.empty()) {
    Matrix packed(r.x0.size() + r.error.error_vector.size(), 1);
    packed << r.x0, r.error.error_vector;
    write_matrix_file(out_path, packed);
  }
  json out;
  out["x0"] = std::vector<double>(r.x0.data(), r.x0.data() + r.x0.size());
  out["error"] = std::vector<double>(r.error.error_vector.data(),
                                     r.error.error_vector.data() + r.error.error_vector.size());
  out["support"] = r.error.support;
  out["residual_norm"] = r.error.residual_norm;
  std::cout << out.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure state estimation for attacked wide-area grid control"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string protection;
  std::string out_dir = "out";
  CLI::App* run = app.add_subcommand("run", "Closed-loop attack simulation");
  run->add_option("--config", config_path, "Simulation config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--protection", protection, "Override protection")->check(CLI::IsMember({"on", "off"}));
  run->add_option("--out", out_dir, "Output directory");

  std::string network_path;
  int window = 5;
  CLI::App* certify = app.add_subcommand("certify", "Correctable-attack bounds for a network");
  certify->add_option("--network", network_path, "Network description (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  certify->add_option("--window", window, "Estimator window T")->check(CLI::Range(2, 1000));
  double step = 0.01;
  certify->add_option("--step", step, "Sampling period T_s in seconds")->check(CLI::PositiveNumber);

  std::string phi_path;
  std::string psi_path;
  std::string y_path;
  std::string decode_out;
  CLI::App* dec = app.add_subcommand("decode", "Recover x and sparse E from Y = Phi x + Psi E");
  dec->add_option("--phi", phi_path, "Coding matrix fixture")->required()->check(CLI::ExistingFile);
  dec->add_option("--psi", psi_path, "Error map fixture (identity when omitted)")
      ->check(CLI::ExistingFile);
  dec->add_option("--y", y_path, "Measurement vector fixture")->required()->check(CLI::ExistingFile);
  dec->add_option("--out", decode_out, "Write [x0; E] as a fixture");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(config_path, seed, protection, out_dir);
    if (certify->parsed()) return cmd_certify(network_path, window, step);
    if (dec->parsed()) return cmd_decode(phi_path, psi_path, y_path, decode_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
