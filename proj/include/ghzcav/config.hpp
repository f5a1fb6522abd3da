#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ghzcav/calibrate.hpp"
#include "ghzcav/hamiltonians.hpp"
#include "ghzcav/protocol.hpp"

namespace ghzcav {

using Json = nlohmann::ordered_json;

// Experiment description as it appears on disk. Frequencies are in Hz
// (cycles per second, 2 pi applied on ingestion), rates in 1/s, protocol
// rates in multiples of qubit 1's g.
struct FirstQubitConfig {
  double g_hz = 0.0;
  double f10_hz = 0.0;
  double f21_hz = 0.0;
  double gamma1r_per_s = 0.0;
  double gamma1p_per_s = 0.0;
  double gamma2r_per_s = 0.0;
  double gamma2p_per_s = 0.0;
};

struct SpectatorConfig {
  double g_hz = 0.0;
  double f10_hz = 0.0;
  double f21_hz = 0.0;
  // Exactly one of these fixes the |3> level: the (2,3) frequency itself or
  // Delta_c,j / g_j.
  std::optional<double> f32_hz;
  std::optional<double> cavity_detuning_ratio;
  double gamma1r_per_s = 0.0;
  double gamma1p_per_s = 0.0;
};

struct CavityConfig {
  double freq_hz = 0.0;
  double quality = 0.0;
  int n_max = 2;
};

struct ProtocolSettings {
  double rabi_r_over_g = 10.0;
  double rabi_r_tilde_over_g = 10.0;
  double max_rabi_over_g = 20.0;
  int samples_per_segment = 8;
  bool first_qubit_jc_in_step2 = true;
  bool spectator_cavity_in_steps13 = true;
  bool jc_during_pulses = false;
};

struct CalibrationSettings {
  MarginTargets margins;
  ConditionThresholds thresholds;
  int grid_points = 1024;
  int refinements = 6;
  // Both set: skip the search and calibrate at this point.
  std::optional<double> delta_over_g;
  std::optional<double> lambda_over_g;
};

struct PropagatorSettings {
  std::string method = "static-krylov";
  int krylov_dim = 30;
  double tolerance = 1e-12;
  double step_gt = 0.005;  // RK4 step times g
  double timedep_tolerance = 1e-8;
  int max_refinements = 4;
};

struct NoiseSettings {
  int n_traj = 500;
  double max_step_s = 0.0;  // 0 = min(1/rate)/100
  std::optional<double> target_stderr;
  bool attribution = true;
};

struct SweepSettings {
  // Comma-separated JSON pointers into this document; "*" matches every
  // element of an array or object.
  std::string axis;
  std::vector<double> values;
};

struct ExperimentConfig {
  FirstQubitConfig qubit1;
  std::vector<SpectatorConfig> spectators;
  CavityConfig cavity;
  ProtocolSettings protocol;
  CalibrationSettings calibration;
  PropagatorSettings propagator;
  std::string mode = "closed-form";
  NoiseSettings noise;
  SweepSettings sweep;
  std::uint64_t seed = 0;
};

// Throws ConfigError with line/column for syntax errors and a JSON pointer
// for field errors. Unknown keys are errors.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json(const Json& doc, const std::string& source = "config");

// Every field, defaults included; parse(dump(to_json(c))) == c.
Json to_json(const ExperimentConfig& config);

// Deterministic text form: keys in insertion order, doubles with 17
// significant digits.
std::string dump_json(const Json& doc);

// Sets every location matched by `axis` to `value`. Throws ConfigError if a
// pointer matches nothing.
void apply_axis(Json& doc, const std::string& axis, double value);

// Dimensionless device (qubit 1's g = 1) and the scale used to get there.
struct Units {
  double g_rad_per_s = 0.0;

  double seconds(double t_internal) const { return t_internal / g_rad_per_s; }
  double per_second(double rate_internal) const { return rate_internal * g_rad_per_s; }
};

Units units_of(const ExperimentConfig& config);
DeviceModel device_model(const ExperimentConfig& config);
PropagatorConfig propagator_config(const ExperimentConfig& config);
ProtocolOptions protocol_options(const ExperimentConfig& config, Mode mode);

}  // namespace ghzcav
