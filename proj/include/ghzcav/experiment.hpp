#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ghzcav/calibrate.hpp"
#include "ghzcav/config.hpp"
#include "ghzcav/metrics.hpp"
#include "ghzcav/noise.hpp"
#include "ghzcav/protocol.hpp"

namespace ghzcav {

struct CalibrationOutcome {
  Units units;
  DeviceModel model;
  CalibrationResult calib;
  Schedule schedule;
  ConditionReport conditions;
};

// Feasibility search, or calibrate_at when the config pins delta and lambda.
CalibrationOutcome run_calibration(const ExperimentConfig& config);
Json calibration_document(const ExperimentConfig& config, const CalibrationOutcome& outcome);

struct SimulationOutcome {
  CalibrationOutcome calibration;
  Mode mode = Mode::ClosedForm;
  ProtocolResult result;
  FidelityReport fidelity;
};

SimulationOutcome run_simulation(const ExperimentConfig& config, Mode mode);
Json simulation_document(const ExperimentConfig& config, const SimulationOutcome& outcome);
// Long format: segment,time_s,observable,value.
std::string trace_csv(const SimulationOutcome& outcome);

struct SweepRow {
  double value = 0.0;
  std::string status;  // ok, infeasible, config-error, numerical-error
  std::string message;
  double f_numeric = 0.0;
  double f_analytic = 0.0;
  double max_photon2 = 0.0;
  double max_level3 = 0.0;
  double p_max = 0.0;
  double phi_max = 0.0;
  double step2_effective_error = 0.0;
  double step1_map_error = 0.0;
};

// One independent run per value, ordered by value.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, Mode mode);
std::string sweep_csv(const std::vector<SweepRow>& rows);
Json sweep_document(const ExperimentConfig& config, Mode mode, const std::vector<SweepRow>& rows);

struct ChannelAttribution {
  std::string label;
  double rate_per_s = 0.0;
  TrajectoryResult result;
};

struct NoiseOutcome {
  CalibrationOutcome calibration;
  Mode mode = Mode::ClosedForm;
  double noiseless = 0.0;
  TrajectoryResult total;
  std::vector<ChannelAttribution> channels;  // one-channel-at-a-time runs
  bool target_met = true;
};

NoiseOutcome run_noise(const ExperimentConfig& config, Mode mode);
Json noise_document(const ExperimentConfig& config, const NoiseOutcome& outcome);

}  // namespace ghzcav
