#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "secest/attack_sim.hpp"
#include "secest/errors.hpp"
#include "secest/linear_estimator.hpp"
#include "secest/sparse_decoder.hpp"

namespace py = pybind11;
using namespace secest;

namespace {

py::dict solution_dict(const SparseSolution& s) {
  py::dict d;
  d["error_vector"] = s.error_vector;
  d["support"] = s.support;
  d["residual_norm"] = s.residual_norm;
  d["objective"] = s.objective;
  return d;
}

py::dict summary_dict(const SimulationSummary& s) {
  py::dict d;
  d["max_theta_dev_deg"] = s.max_theta_dev_deg;
  d["omega_min_hz"] = s.omega_min_hz;
  d["omega_max_hz"] = s.omega_max_hz;
  d["classification_accuracy"] = s.classification_accuracy;
  d["attacked_steps"] = s.attacked_steps;
  d["classified_steps"] = s.classified_steps;
  d["max_estimate_error"] = s.max_estimate_error;
  d["tripped"] = s.tripped;
  d["estimator_failures"] = s.estimator_failures;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse-error secure state estimation and attacked grid simulation";

  auto base = py::register_exception<Error>(m, "SecestError", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<RankDeficient>(m, "RankDeficient", base.ptr());
  py::register_exception<Infeasible>(m, "Infeasible", base.ptr());
  py::register_exception<TooLarge>(m, "TooLarge", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IOFailure>(m, "IOFailure", base.ptr());
  py::register_exception<ParamFileMissing>(m, "ParamFileMissing", base.ptr());

  m.def("compute_annihilator", [](const Matrix& phi) { return compute_annihilator(phi).omega; },
        py::arg("phi"), "Orthonormal Omega with Omega @ phi = 0.");
  m.def(
      "l1_minimize",
      [](const Matrix& mat, const Vector& y, std::optional<Vector> weights) {
        L1Options opts;
        if (weights) opts.column_weights = *weights;
        return solution_dict(l1_minimize(mat, y, opts));
      },
      py::arg("m"), py::arg("y"), py::arg("weights") = py::none());
  m.def(
      "l0_bruteforce",
      [](const Matrix& mat, const Vector& y, int q_max) -> py::object {
        const auto s = l0_bruteforce(mat, y, q_max);
        if (!s) return py::none();
        return solution_dict(*s);
      },
      py::arg("m"), py::arg("y"), py::arg("q_max"));
  m.def("certify_recoverability", &certify_recoverability, py::arg("m"), py::arg("s"));
  m.def(
      "decode",
      [](const Matrix& phi, const Vector& y, std::optional<Matrix> psi) {
        const DecodeResult r = psi ? decode(phi, *psi, y) : decode(phi, y);
        return py::make_tuple(r.x0, solution_dict(r.error));
      },
      py::arg("phi"), py::arg("y"), py::arg("psi") = py::none(),
      "Returns (x0, solution) for y = phi x0 + psi E with E sparse.");

  m.def(
      "secure_estimate_linear",
      [](const Matrix& a, const Matrix& c, const std::vector<Vector>& y) {
        const LinearEstimate e = secure_estimate_linear(LinearSystem(a, c), y);
        return py::make_tuple(e.x0, e.attacks);
      },
      py::arg("a"), py::arg("c"), py::arg("y"));
  m.def(
      "check_window_recoverability",
      [](const Matrix& a, const Matrix& c, int horizon, int s) {
        return check_window_recoverability(LinearSystem(a, c), horizon, s);
      },
      py::arg("a"), py::arg("c"), py::arg("horizon"), py::arg("s"));

  m.def(
      "correctable_bound",
      [](long n, long links, long horizon) {
        const CorrectableBound b = correctable_bound(n, links, horizon);
        py::dict d;
        d["q_max"] = b.q_max;
        d["q_bar"] = b.q_bar;
        d["measurements_per_step"] = b.measurements_per_step;
        d["max_average"] = b.max_average;
        return d;
      },
      py::arg("generators"), py::arg("links"), py::arg("horizon"));
  m.def(
      "reduced_admittance",
      [](const std::string& network_path) {
        const ReducedNetwork red = kron_reduce(load_grid_case(network_path).network);
        ComplexMatrix y = ComplexMatrix::Zero(red.generators(), red.generators());
        for (const auto& [i, j] : red.edges()) y(i, j) = y(j, i) = red.admittance(i, j);
        return y;
      },
      py::arg("network_path"), "Equivalent line admittances between generators.");
  m.def(
      "run_simulation",
      [](const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<bool> protection,
         std::optional<std::string> out_dir) {
        SimulationConfig cfg = load_simulation_config(config_path);
        if (seed) cfg.scenario.seed = *seed;
        if (protection) cfg.protection = *protection;
        const SimulationTrace trace = [&] {
          py::gil_scoped_release release;
          return run_simulation(cfg);
        }();
        if (out_dir) emit_outputs(trace, *out_dir);
        py::list theta;
        py::list types;
        for (const StepRecord& r : trace.steps) {
          theta.append(r.theta);
          types.append(r.estimate ? to_string(r.estimate->type) : std::string());
        }
        py::dict out = summary_dict(summarize(trace));
        out["theta"] = theta;
        out["estimated_types"] = types;
        return out;
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("protection") = py::none(),
      py::arg("out") = py::none());
}
