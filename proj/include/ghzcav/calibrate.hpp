#pragma once

#include <string>
#include <vector>

#include "ghzcav/hamiltonians.hpp"
#include "ghzcav/schedule.hpp"

namespace ghzcav {

// Separation-of-scale ratios. As targets they are lower bounds; in a
// calibration result they hold the achieved values.
struct MarginTargets {
  double pulse_detuning_ratio = 10.0;   // Delta_j / Omega_j
  double cavity_detuning_ratio = 10.0;  // Delta_c,j / g_j
  double raman_ratio = 10.0;            // delta / chi_j
  double cavity_stark_ratio = 10.0;     // delta Delta_c,j / g_j^2
  double pulse_stark_ratio = 10.0;      // delta Delta_j / Omega_j^2
};

struct SpectatorCalibration {
  double carrier = 0.0;          // omega_j
  double rabi = 0.0;             // Omega_j
  double pulse_detuning = 0.0;   // Delta_j
  double cavity_detuning = 0.0;  // Delta_c,j
  double chi = 0.0;
  double lambda = 0.0;
  MarginTargets margins;
};

struct CalibrationResult {
  double delta = 0.0;
  double lambda = 0.0;
  std::vector<SpectatorCalibration> spectators;

  // One (2,3) pulse per spectator with the solved carrier and amplitude.
  std::vector<PulseSpec> raman_pulses(double t_start, double t_end) const;
  double delta_spread() const;
  double lambda_spread() const;
};

// omega_j = omega32^j - Delta_c,j + delta, so that every delta_j equals
// `delta`. Throws InfeasibleError if some Delta_j = Delta_c,j - delta <= 0.
std::vector<double> solve_carriers(const DeviceModel& model, double delta);

// Rabi amplitudes giving lambda_j = lambda for every spectator. Throws
// InfeasibleError if lambda does not exceed some Stark floor g_j^2/Delta_c,j.
std::vector<double> solve_rabi(const DeviceModel& model, double delta, double lambda);

// Carriers, amplitudes and all derived quantities at a chosen (delta, lambda).
CalibrationResult calibrate_at(const DeviceModel& model, double delta, double lambda);

struct SearchOptions {
  int grid_points = 1024;
  int refinements = 6;
};

// Largest common lambda (and its delta) meeting every margin. Throws
// InfeasibleError naming the binding constraint when none exists.
CalibrationResult feasibility_search(const DeviceModel& model, const MarginTargets& margins,
                                     const SearchOptions& options = {});

// Level-|3> occupation estimate for a spectator in the Raman regime.
double occupation_probability(double pulse_detuning_ratio, double cavity_detuning_ratio);

enum class ConditionStatus { Pass, Warn, Fail };
std::string to_string(ConditionStatus s);

struct ConditionThresholds {
  double warn_ratio = 10.0;
  double fail_ratio = 3.0;
};

// `ratio` is the "much greater than" margin: the quantity itself when large
// is good, its inverse when small is good.
struct Condition {
  std::string name;
  int qubit = 0;  // 1-based qubit label, 0 for global conditions
  double value = 0.0;
  double ratio = 0.0;
  ConditionStatus status = ConditionStatus::Pass;
};

struct ConditionReport {
  std::vector<double> occupation;   // p_j per spectator
  std::vector<double> phase_error;  // phi_j = g_j^2 (t_1b + t_1c) / Delta_c,j per spectator
  std::vector<Condition> conditions;

  bool any(ConditionStatus s) const;
};

ConditionStatus classify(double ratio, const ConditionThresholds& thresholds);

ConditionReport condition_report(const DeviceModel& model, const CalibrationResult& calib, const Schedule& schedule,
                                 const ConditionThresholds& thresholds = {});

}  // namespace ghzcav
