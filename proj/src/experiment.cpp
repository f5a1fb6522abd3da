#include "ghzcav/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "ghzcav/error.hpp"

namespace ghzcav {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json units_json(const Units& u) {
  return {{"g_rad_per_s", u.g_rad_per_s},
          {"convention", "*_over_g in units of qubit 1's coupling g (rad/s); *_s in seconds; *_hz in Hz; *_rad in radians"}};
}

Json array_of(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

double maximum(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

}  // namespace

CalibrationOutcome run_calibration(const ExperimentConfig& config) {
  CalibrationOutcome out;
  out.units = units_of(config);
  out.model = device_model(config);
  const auto& cal = config.calibration;
  if (cal.delta_over_g && cal.lambda_over_g) {
    out.calib = calibrate_at(out.model, *cal.delta_over_g, *cal.lambda_over_g);
  } else {
    out.calib = feasibility_search(out.model, cal.margins, SearchOptions{cal.grid_points, cal.refinements});
  }
  out.schedule = build_ghz_schedule(out.model, out.calib, config.protocol.rabi_r_over_g,
                                    config.protocol.rabi_r_tilde_over_g);
  out.conditions = condition_report(out.model, out.calib, out.schedule, cal.thresholds);
  return out;
}

Json calibration_document(const ExperimentConfig& config, const CalibrationOutcome& o) {
  const double g_hz = config.qubit1.g_hz;
  Json doc;
  doc["command"] = "calibrate";
  doc["units"] = units_json(o.units);

  Json cal;
  cal["delta_over_g"] = o.calib.delta;
  cal["lambda_over_g"] = o.calib.lambda;
  cal["delta_spread_over_g"] = o.calib.delta_spread();
  cal["lambda_spread_over_g"] = o.calib.lambda_spread();
  Json specs = Json::array();
  for (std::size_t k = 0; k < o.calib.spectators.size(); ++k) {
    const auto& s = o.calib.spectators[k];
    const double gj = o.model.spectators[k].g;
    Json j;
    j["qubit"] = static_cast<int>(k) + 2;
    j["carrier_hz"] = s.carrier * g_hz;
    j["carrier_over_g"] = s.carrier;
    j["rabi_over_g"] = s.rabi;
    j["rabi_over_gj"] = s.rabi / gj;
    j["pulse_detuning_over_g"] = s.pulse_detuning;
    j["cavity_detuning_over_g"] = s.cavity_detuning;
    j["delta_over_g"] = s.cavity_detuning - s.pulse_detuning;
    j["chi_over_g"] = s.chi;
    j["lambda_over_g"] = s.lambda;
    j["lambda_over_gj"] = s.lambda / gj;
    j["margins"] = {{"pulse_detuning_ratio", s.margins.pulse_detuning_ratio},
                    {"cavity_detuning_ratio", s.margins.cavity_detuning_ratio},
                    {"raman_ratio", s.margins.raman_ratio},
                    {"cavity_stark_ratio", s.margins.cavity_stark_ratio},
                    {"pulse_stark_ratio", s.margins.pulse_stark_ratio}};
    specs.push_back(j);
  }
  cal["spectators"] = specs;
  doc["calibration"] = cal;

  Json sched;
  Json segs = Json::array();
  for (const auto& s : o.schedule.segments) {
    segs.push_back({{"label", to_string(s.label)},
                    {"t_start_s", o.units.seconds(s.t_start)},
                    {"duration_s", o.units.seconds(s.duration)},
                    {"duration_g_over_pi", s.duration / kPi}});
  }
  sched["segments"] = segs;
  sched["tau_s"] = o.units.seconds(o.schedule.total_time);
  sched["tau_g_over_pi"] = o.schedule.total_time / kPi;
  sched["rabi_r_over_g"] = o.schedule.rabi_r;
  sched["rabi_r_tilde_over_g"] = o.schedule.rabi_r_tilde;
  doc["schedule"] = sched;

  Json cond;
  cond["occupation_p"] = array_of(o.conditions.occupation);
  cond["spectator_phase_rad"] = array_of(o.conditions.phase_error);
  cond["kappa_inverse_s"] = o.model.cavity.kappa() > 0.0 ? o.units.seconds(1.0 / o.model.cavity.kappa())
                                                         : std::numeric_limits<double>::infinity();
  cond["thresholds"] = {{"warn_ratio", config.calibration.thresholds.warn_ratio},
                        {"fail_ratio", config.calibration.thresholds.fail_ratio}};
  Json items = Json::array();
  for (const auto& c : o.conditions.conditions) {
    items.push_back({{"name", c.name}, {"qubit", c.qubit}, {"value", c.value}, {"ratio", c.ratio},
                     {"status", to_string(c.status)}});
  }
  cond["items"] = items;
  cond["any_warn"] = o.conditions.any(ConditionStatus::Warn);
  cond["any_fail"] = o.conditions.any(ConditionStatus::Fail);
  doc["conditions"] = cond;
  doc["config"] = to_json(config);
  return doc;
}

SimulationOutcome run_simulation(const ExperimentConfig& config, Mode mode) {
  CalibrationOutcome cal = run_calibration(config);
  const ProtocolOptions options = protocol_options(config, mode);
  const BasisPtr basis = make_basis(cal.model);
  ProtocolResult result = run_protocol(cal.model, cal.schedule, initial_product_state(basis), options);
  FidelityReport fidelity = fidelity_report(result, spectator_phases(cal.model, cal.schedule));
  return SimulationOutcome{std::move(cal), mode, std::move(result), std::move(fidelity)};
}

Json simulation_document(const ExperimentConfig& config, const SimulationOutcome& o) {
  Json doc;
  doc["command"] = "simulate";
  doc["mode"] = to_string(o.mode);
  doc["units"] = units_json(o.calibration.units);
  doc["n_qubits"] = o.calibration.model.n_qubits();
  doc["dimension"] = o.result.final_state.dim();
  const auto& f = o.fidelity;
  Json fid;
  fid["F_numeric"] = f.f_numeric;
  fid["F_analytic"] = f.f_analytic;
  fid["abs_difference"] = std::abs(f.f_numeric - f.f_analytic);
  fid["spectator_phase_rad"] = array_of(f.phases);
  fid["cavity_residual"] = f.cavity_residual;
  fid["final_norm"] = o.result.final_state.norm();
  doc["fidelity"] = fid;
  Json leak;
  leak["max_photon2"] = f.leakage.max_photon2;
  leak["max_level3"] = array_of(f.leakage.max_level3);
  leak["max_level2"] = array_of(f.leakage.max_level2);
  leak["level0_drift"] = array_of(f.leakage.level0_drift);
  leak["max_qubit1_level2"] = f.leakage.max_first_level2;
  leak["max_qubit1_level2_outside_window"] = f.leakage.max_first_level2_outside;
  leak["occupation_bound_p"] = array_of(o.calibration.conditions.occupation);
  doc["leakage"] = leak;
  Json segs = Json::array();
  for (const auto& s : o.result.segments) {
    segs.push_back({{"label", to_string(s.label)},
                    {"norm_drift", s.norm_drift},
                    {"substeps", s.substeps},
                    {"error_estimate", s.error_estimate}});
  }
  doc["segments"] = segs;
  doc["tau_s"] = o.calibration.units.seconds(o.calibration.schedule.total_time);
  doc["tau_g_over_pi"] = o.calibration.schedule.total_time / kPi;
  doc["lambda_over_g"] = o.calibration.calib.lambda;
  doc["config"] = to_json(config);
  return doc;
}

std::string trace_csv(const SimulationOutcome& o) {
  std::ostringstream out;
  out << "segment,time_s,observable,value\n";
  const auto& units = o.calibration.units;
  for (const auto& snap : o.result.trace) {
    const std::string prefix = to_string(snap.segment) + "," + num(units.seconds(snap.time)) + ",";
    out << prefix << "norm," << num(snap.norm) << "\n";
    out << prefix << "ghz_fidelity," << num(snap.ghz_fidelity) << "\n";
    const std::size_t sites = snap.populations.size();
    for (std::size_t site = 0; site < sites; ++site) {
      const auto& p = snap.populations[site];
      for (std::size_t level = 0; level < p.size(); ++level) {
        if (site + 1 == sites) {
          out << prefix << "cavity_n" << level << "," << num(p[level]) << "\n";
        } else {
          out << prefix << "q" << site + 1 << "_P" << level << "," << num(p[level]) << "\n";
        }
      }
    }
  }
  return out.str();
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, Mode mode) {
  std::vector<double> values = config.sweep.values;
  std::stable_sort(values.begin(), values.end());
  const Json base = to_json(config);
  if (!values.empty() || !config.sweep.axis.empty()) {
    Json probe = base;
    apply_axis(probe, config.sweep.axis, values.empty() ? 0.0 : values.front());
  }
  std::vector<SweepRow> rows;
  for (double v : values) {
    SweepRow row;
    row.value = v;
    try {
      Json doc = base;
      apply_axis(doc, config.sweep.axis, v);
      const ExperimentConfig c = config_from_json(doc, "sweep value " + num(v));
      const SimulationOutcome sim = run_simulation(c, mode);
      const ProtocolOptions options = protocol_options(c, mode);
      row.f_numeric = sim.fidelity.f_numeric;
      row.f_analytic = sim.fidelity.f_analytic;
      row.max_photon2 = sim.fidelity.leakage.max_photon2;
      row.max_level3 = maximum(sim.fidelity.leakage.max_level3);
      row.p_max = maximum(sim.calibration.conditions.occupation);
      row.phi_max = maximum(sim.fidelity.phases);
      row.step2_effective_error = step2_effective_error(sim.calibration.model, sim.calibration.schedule, options);
      row.step1_map_error = step1_map_error(sim.calibration.model, sim.calibration.schedule, options);
      row.status = "ok";
    } catch (const InfeasibleError& e) {
      row.status = "infeasible";
      row.message = e.binding();
    } catch (const ConfigError& e) {
      row.status = "config-error";
      row.message = e.what();
    } catch (const NumericalError& e) {
      row.status = "numerical-error";
      row.message = e.what();
    }
    if (row.status != "ok") {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.f_numeric = row.f_analytic = row.max_photon2 = row.max_level3 = row.p_max = row.phi_max = nan;
      row.step2_effective_error = row.step1_map_error = nan;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "value,status,F_numeric,F_analytic,max_photon2,max_level3,p_max,phi_max_rad,step2_effective_error,"
         "step1_map_error\n";
  for (const auto& r : rows) {
    out << num(r.value) << "," << r.status << "," << num(r.f_numeric) << "," << num(r.f_analytic) << ","
        << num(r.max_photon2) << "," << num(r.max_level3) << "," << num(r.p_max) << "," << num(r.phi_max) << ","
        << num(r.step2_effective_error) << "," << num(r.step1_map_error) << "\n";
  }
  return out.str();
}

Json sweep_document(const ExperimentConfig& config, Mode mode, const std::vector<SweepRow>& rows) {
  Json doc;
  doc["command"] = "sweep";
  doc["mode"] = to_string(mode);
  doc["axis"] = config.sweep.axis;
  doc["columns"] = {{"value", "axis value in the units of the swept field"},
                    {"F_numeric", "GHZ fidelity of the simulated final state"},
                    {"F_analytic", "fidelity predicted from the spectator phases"},
                    {"max_photon2", "largest population with two or more photons"},
                    {"max_level3", "largest level-3 population of any spectator"},
                    {"p_max", "largest level-3 occupation estimate"},
                    {"phi_max_rad", "largest spectator phase per step, radians"},
                    {"step2_effective_error", "state distance, full vs reduced step 2"},
                    {"step1_map_error", "state distance, full vs exact step-1 map"}};
  Json r = Json::array();
  for (const auto& row : rows) {
    Json j = {{"value", row.value}, {"status", row.status}};
    if (!row.message.empty()) j["message"] = row.message;
    r.push_back(j);
  }
  doc["rows"] = r;
  doc["config"] = to_json(config);
  return doc;
}

NoiseOutcome run_noise(const ExperimentConfig& config, Mode mode) {
  NoiseOutcome out;
  out.calibration = run_calibration(config);
  out.mode = mode;
  const auto& cal = out.calibration;
  const ProtocolOptions options = protocol_options(config, mode);
  const ProtocolEvolver evolver(cal.model, cal.schedule, options);
  const StateVector psi0 = initial_product_state(evolver.basis());
  const auto channels = noise_channels(cal.model, *evolver.basis());

  TrajectoryOptions topt;
  topt.n_traj = config.noise.n_traj;
  topt.seed = config.seed;
  topt.max_step = config.noise.max_step_s * cal.units.g_rad_per_s;

  std::vector<NoiseChannel> silent = channels;
  for (auto& c : silent) c.rate = 0.0;
  out.noiseless = run_trajectories(evolver, psi0, silent, topt).mean;
  out.total = run_trajectories(evolver, psi0, channels, topt);
  if (config.noise.attribution) {
    for (std::size_t k = 0; k < channels.size(); ++k) {
      if (channels[k].rate == 0.0) continue;
      std::vector<NoiseChannel> one = silent;
      one[k].rate = channels[k].rate;
      out.channels.push_back({channels[k].label, cal.units.per_second(channels[k].rate),
                              run_trajectories(evolver, psi0, one, topt)});
    }
  }
  if (config.noise.target_stderr) out.target_met = out.total.std_error <= *config.noise.target_stderr;
  return out;
}

Json noise_document(const ExperimentConfig& config, const NoiseOutcome& o) {
  const double tau = o.calibration.schedule.total_time;
  Json doc;
  doc["command"] = "noise";
  doc["mode"] = to_string(o.mode);
  doc["units"] = units_json(o.calibration.units);
  doc["dephasing_convention"] = "L = sqrt(gamma/2) * projector onto the dephasing level";
  doc["n_traj"] = o.total.n_traj;
  doc["seed"] = config.seed;
  doc["F_noiseless"] = o.noiseless;
  doc["F_mean"] = o.total.mean;
  doc["F_stderr"] = o.total.std_error;
  doc["fidelity_loss"] = o.noiseless - o.total.mean;
  doc["mean_jumps"] = o.total.mean_jumps;
  doc["jump_step_s"] = o.calibration.units.seconds(o.total.step);
  doc["deterministic"] = o.total.deterministic;
  if (config.noise.target_stderr) {
    doc["target_stderr"] = *config.noise.target_stderr;
    doc["target_met"] = o.target_met;
  }
  Json channels = Json::array();
  std::string dominant;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : o.channels) {
    const double loss = o.noiseless - c.result.mean;
    channels.push_back({{"label", c.label},
                        {"rate_per_s", c.rate_per_s},
                        {"rate_times_tau", c.rate_per_s * o.calibration.units.seconds(tau)},
                        {"F_mean", c.result.mean},
                        {"F_stderr", c.result.std_error},
                        {"fidelity_loss", loss}});
    if (loss > worst) {
      worst = loss;
      dominant = c.label;
    }
  }
  doc["channels"] = channels;
  doc["dominant_channel"] = dominant;
  doc["tau_s"] = o.calibration.units.seconds(tau);
  doc["config"] = to_json(config);
  return doc;
}

}  // namespace ghzcav
