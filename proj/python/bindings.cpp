// Python extension: the four experiment commands plus a few closed-form helpers.
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ghzcav/calibrate.hpp"
#include "ghzcav/error.hpp"
#include "ghzcav/experiment.hpp"
#include "ghzcav/metrics.hpp"
#include "ghzcav/noise.hpp"
#include "ghzcav/protocol.hpp"

namespace py = pybind11;
using namespace ghzcav;

namespace {

ExperimentConfig prepare(const std::string& text, const std::string& source, const py::object& mode,
                         const py::object& seed) {
  ExperimentConfig c = parse_config(text, source);
  if (!mode.is_none()) c.mode = mode.cast<std::string>();
  if (!seed.is_none()) c.seed = seed.cast<std::uint64_t>();
  parse_mode(c.mode);
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "GHZ-state preparation in a cavity: calibration, simulation, sweeps and noise.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  // InfeasibleError carries the binding constraint as its second argument.
  static py::exception<InfeasibleError> infeasible(m, "InfeasibleError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InfeasibleError& e) {
      py::object err = py::reinterpret_borrow<py::object>(infeasible.ptr())(e.what(), e.binding());
      PyErr_SetObject(infeasible.ptr(), err.ptr());
    }
  });

  m.def(
      "calibrate",
      [](const std::string& text, const std::string& source, py::object mode, py::object seed) {
        auto c = prepare(text, source, mode, seed);
        py::gil_scoped_release release;
        return dump_json(calibration_document(c, run_calibration(c)));
      },
      py::arg("config_json"), py::arg("source") = "config", py::arg("mode") = py::none(),
      py::arg("seed") = py::none(), R"pbdoc(
        Calibration report (JSON text) for a config given as JSON text.
      )pbdoc");

  m.def(
      "simulate",
      [](const std::string& text, const std::string& source, py::object mode, py::object seed) {
        auto c = prepare(text, source, mode, seed);
        py::gil_scoped_release release;
        auto out = run_simulation(c, parse_mode(c.mode));
        return std::make_pair(dump_json(simulation_document(c, out)), trace_csv(out));
      },
      py::arg("config_json"), py::arg("source") = "config", py::arg("mode") = py::none(),
      py::arg("seed") = py::none(), R"pbdoc(
        Run the protocol. Returns (report JSON text, trace CSV text).
      )pbdoc");

  m.def(
      "sweep",
      [](const std::string& text, const std::string& source, py::object mode, py::object seed) {
        auto c = prepare(text, source, mode, seed);
        py::gil_scoped_release release;
        const Mode md = parse_mode(c.mode);
        auto rows = run_sweep(c, md);
        return std::make_pair(dump_json(sweep_document(c, md, rows)), sweep_csv(rows));
      },
      py::arg("config_json"), py::arg("source") = "config", py::arg("mode") = py::none(),
      py::arg("seed") = py::none(), R"pbdoc(
        Rerun along the config's sweep axis. Returns (report JSON text, sweep CSV text).
      )pbdoc");

  m.def(
      "noise",
      [](const std::string& text, const std::string& source, py::object mode, py::object seed) {
        auto c = prepare(text, source, mode, seed);
        py::gil_scoped_release release;
        auto out = run_noise(c, parse_mode(c.mode));
        return std::make_pair(dump_json(noise_document(c, out)), out.target_met);
      },
      py::arg("config_json"), py::arg("source") = "config", py::arg("mode") = py::none(),
      py::arg("seed") = py::none(), R"pbdoc(
        Quantum-trajectory noise estimate. Returns (report JSON text, target_met).
      )pbdoc");

  m.def("normalized_config", [](const std::string& text, const std::string& source) {
    return dump_json(to_json(parse_config(text, source)));
  }, py::arg("config_json"), py::arg("source") = "config", "Config with every default filled in (JSON text).");

  m.def("fidelity_analytic", &fidelity_analytic, py::arg("phases"),
        "GHZ fidelity left by residual spectator phases phi_j (radians).");
  m.def("occupation_probability", &occupation_probability, py::arg("pulse_detuning_ratio"),
        py::arg("cavity_detuning_ratio"), "Level-|3> occupation estimate for given detuning ratios.");
  m.def(
      "closed_form_step_map",
      [](const std::string& step, int n_max) {
        if (step != "1" && step != "3") throw ConfigError("step must be '1' or '3'");
        return Eigen::MatrixXcd(closed_form_step_map(step == "1" ? Step::One : Step::Three, n_max));
      },
      py::arg("step"), py::arg("n_max") = 2,
      "Step map on qubit 1 (x) cavity, index level * (n_max + 1) + photons.");
  m.def("splitmix64", &splitmix64, py::arg("x"));

  m.attr("__version__") = "0.1.0";
}
