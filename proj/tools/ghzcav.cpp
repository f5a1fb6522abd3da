// Command-line driver: calibrate, simulate, sweep, noise.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ghzcav/error.hpp"
#include "ghzcav/experiment.hpp"

namespace fs = std::filesystem;
using namespace ghzcav;

namespace {

enum Exit { kOk = 0, kConfig = 2, kInfeasible = 3, kNumerical = 4 };

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--seed", c.seed, "RNG seed (overrides the config)");
  sub->add_option("--mode", c.mode, "closed-form | effective | full (overrides the config)")
      ->check(CLI::IsMember({"closed-form", "effective", "full"}));
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

int run(const std::string& command, const Common& c) {
  ExperimentConfig config = load_config(c.config);
  if (c.seed) config.seed = *c.seed;
  if (c.mode) config.mode = *c.mode;
  const Mode mode = parse_mode(config.mode);
  fs::create_directories(c.out);
  const fs::path out(c.out);

  if (command == "calibrate") {
    const auto outcome = run_calibration(config);
    write_file(out / "report.json", dump_json(calibration_document(config, outcome)));
    write_file(out / "config.json", dump_json(to_json(config)));
    std::cout << "lambda/g = " << outcome.calib.lambda << ", tau g/pi = " << outcome.schedule.total_time / 3.141592653589793
              << "\n";
  } else if (command == "simulate") {
    const auto outcome = run_simulation(config, mode);
    write_file(out / "report.json", dump_json(simulation_document(config, outcome)));
    write_file(out / "trace.csv", trace_csv(outcome));
    std::cout << "F_numeric = " << outcome.fidelity.f_numeric << ", F_analytic = " << outcome.fidelity.f_analytic
              << "\n";
  } else if (command == "sweep") {
    const auto rows = run_sweep(config, mode);
    write_file(out / "sweep.csv", sweep_csv(rows));
    write_file(out / "report.json", dump_json(sweep_document(config, mode, rows)));
    std::cout << rows.size() << " sweep rows\n";
  } else {
    const auto outcome = run_noise(config, mode);
    write_file(out / "report.json", dump_json(noise_document(config, outcome)));
    std::cout << "F = " << outcome.total.mean << " +- " << outcome.total.std_error << "\n";
    if (!outcome.target_met) {
      std::cerr << "error: standard error " << outcome.total.std_error << " above target "
                << *config.noise.target_stderr << "; increase noise.n_traj\n";
      return kConfig;
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GHZ-state preparation in a cavity: calibration, simulation and noise estimates"};
  app.require_subcommand(1);
  Common common;
  for (const char* name : {"calibrate", "simulate", "sweep", "noise"}) {
    add_common(app.add_subcommand(name), common);
  }
  app.get_subcommand("calibrate")->description("solve pulse carriers and amplitudes, audit the conditions");
  app.get_subcommand("simulate")->description("run the protocol and report fidelity and leakage");
  app.get_subcommand("sweep")->description("rerun the protocol along one config axis");
  app.get_subcommand("noise")->description("quantum-trajectory fidelity under decay and dephasing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, common);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\nbinding constraint: " << e.binding() << "\n";
    return kInfeasible;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}
