#include "ghzcav/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ghzcav/error.hpp"

namespace ghzcav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string qubit_name(std::size_t k) { return "qubit " + std::to_string(k + 2); }

double ratio(double num, double den) { return den == 0.0 ? kInf : num / den; }

double chi_of(double rabi, double g, double pulse_detuning, double cavity_detuning) {
  return 0.5 * rabi * g * (1.0 / pulse_detuning + 1.0 / cavity_detuning);
}

// Largest Rabi amplitude a spectator tolerates at common detuning `delta`,
// and the name of the margin that limits it.
struct RabiLimit {
  double rabi;
  const char* binding;
};

RabiLimit rabi_limit(const SpectatorQubit& s, double cavity_detuning, double delta, const MarginTargets& m) {
  const double pulse_detuning = cavity_detuning - delta;
  RabiLimit best{pulse_detuning / m.pulse_detuning_ratio, "pulse_detuning_ratio"};
  const double stark = std::sqrt(delta * pulse_detuning / m.pulse_stark_ratio);
  if (stark < best.rabi) best = {stark, "pulse_stark_ratio"};
  const double raman = (delta / m.raman_ratio) / (0.5 * s.g * (1.0 / pulse_detuning + 1.0 / cavity_detuning));
  if (raman < best.rabi) best = {raman, "raman_ratio"};
  return best;
}

struct Candidate {
  double delta = 0.0;
  double lambda = -kInf;
  std::size_t limiting = 0;
  const char* binding = "";
};

Candidate evaluate(const DeviceModel& model, double delta, const MarginTargets& m) {
  Candidate c{delta, kInf, 0, ""};
  for (std::size_t k = 0; k < model.spectators.size(); ++k) {
    const auto& s = model.spectators[k];
    const double dc = model.cavity_detuning(k);
    const RabiLimit lim = rabi_limit(s, dc, delta, m);
    const double chi = chi_of(lim.rabi, s.g, dc - delta, dc);
    const double lam = s.g * s.g / dc + chi * chi / delta;
    if (lam < c.lambda) c = {delta, lam, k, lim.binding};
  }
  return c;
}

bool better(const Candidate& a, const Candidate& b) {
  if (a.lambda != b.lambda) return a.lambda > b.lambda;
  return a.delta < b.delta;
}

}  // namespace

std::vector<PulseSpec> CalibrationResult::raman_pulses(double t_start, double t_end) const {
  std::vector<PulseSpec> pulses;
  for (std::size_t k = 0; k < spectators.size(); ++k) {
    pulses.push_back(PulseSpec{static_cast<int>(k) + 1, {2, 3}, spectators[k].rabi, spectators[k].carrier, 0.0,
                               t_start, t_end});
  }
  return pulses;
}

double CalibrationResult::delta_spread() const {
  double lo = kInf, hi = -kInf;
  for (const auto& s : spectators) {
    const double d = s.cavity_detuning - s.pulse_detuning;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return spectators.empty() ? 0.0 : hi - lo;
}

double CalibrationResult::lambda_spread() const {
  double lo = kInf, hi = -kInf;
  for (const auto& s : spectators) {
    lo = std::min(lo, s.lambda);
    hi = std::max(hi, s.lambda);
  }
  return spectators.empty() ? 0.0 : hi - lo;
}

std::vector<double> solve_carriers(const DeviceModel& model, double delta) {
  if (!(delta > 0.0)) throw ConfigError("Raman detuning delta must be positive");
  std::vector<double> carriers;
  for (std::size_t k = 0; k < model.spectators.size(); ++k) {
    const double dc = model.cavity_detuning(k);
    if (!(dc - delta > 0.0)) {
      throw InfeasibleError(qubit_name(k) + ": delta " + std::to_string(delta) + " leaves no positive pulse detuning " +
                                "(Delta_c = " + std::to_string(dc) + ")",
                            qubit_name(k) + ": pulse_detuning");
    }
    carriers.push_back(model.spectators[k].omega32 - dc + delta);
  }
  return carriers;
}

std::vector<double> solve_rabi(const DeviceModel& model, double delta, double lambda) {
  if (!(delta > 0.0)) throw ConfigError("Raman detuning delta must be positive");
  std::vector<double> rabi;
  for (std::size_t k = 0; k < model.spectators.size(); ++k) {
    const auto& s = model.spectators[k];
    const double dc = model.cavity_detuning(k);
    const double pd = dc - delta;
    if (!(pd > 0.0)) {
      throw InfeasibleError(qubit_name(k) + ": nonpositive pulse detuning", qubit_name(k) + ": pulse_detuning");
    }
    const double floor = s.g * s.g / dc;
    if (!(lambda > floor)) {
      throw InfeasibleError(qubit_name(k) + ": lambda " + std::to_string(lambda) + " does not exceed the Stark floor " +
                                std::to_string(floor),
                            qubit_name(k) + ": stark_floor");
    }
    rabi.push_back(std::sqrt((lambda - floor) * 4.0 * delta) / (s.g * (1.0 / pd + 1.0 / dc)));
  }
  return rabi;
}

CalibrationResult calibrate_at(const DeviceModel& model, double delta, double lambda) {
  const auto carriers = solve_carriers(model, delta);
  const auto rabi = solve_rabi(model, delta, lambda);
  CalibrationResult r;
  r.delta = delta;
  r.lambda = lambda;
  for (std::size_t k = 0; k < model.spectators.size(); ++k) {
    const auto& s = model.spectators[k];
    SpectatorCalibration c;
    c.carrier = carriers[k];
    c.rabi = rabi[k];
    c.pulse_detuning = s.omega32 - c.carrier;
    c.cavity_detuning = model.cavity_detuning(k);
    c.chi = chi_of(c.rabi, s.g, c.pulse_detuning, c.cavity_detuning);
    const double d = c.cavity_detuning - c.pulse_detuning;
    c.lambda = s.g * s.g / c.cavity_detuning + c.chi * c.chi / d;
    c.margins.pulse_detuning_ratio = ratio(c.pulse_detuning, c.rabi);
    c.margins.cavity_detuning_ratio = c.cavity_detuning / s.g;
    c.margins.raman_ratio = ratio(delta, c.chi);
    c.margins.cavity_stark_ratio = delta * c.cavity_detuning / (s.g * s.g);
    c.margins.pulse_stark_ratio = ratio(delta * c.pulse_detuning, c.rabi * c.rabi);
    r.spectators.push_back(c);
  }
  return r;
}

CalibrationResult feasibility_search(const DeviceModel& model, const MarginTargets& m, const SearchOptions& options) {
  model.validate();
  const double targets[] = {m.pulse_detuning_ratio, m.cavity_detuning_ratio, m.raman_ratio, m.cavity_stark_ratio,
                            m.pulse_stark_ratio};
  for (double t : targets) {
    if (!(t > 0.0)) throw ConfigError("margin targets must be positive");
  }
  if (options.grid_points < 2 || options.refinements < 0) throw ConfigError("invalid search options");

  double delta_lo = 0.0;
  double delta_hi = kInf;
  std::size_t lo_arg = 0, hi_arg = 0;
  for (std::size_t k = 0; k < model.spectators.size(); ++k) {
    const auto& s = model.spectators[k];
    const double dc = model.cavity_detuning(k);
    if (dc / s.g < m.cavity_detuning_ratio) {
      throw InfeasibleError(qubit_name(k) + ": cavity detuning ratio " + std::to_string(dc / s.g) + " below target " +
                                std::to_string(m.cavity_detuning_ratio),
                            qubit_name(k) + ": cavity_detuning_ratio");
    }
    const double lo = m.cavity_stark_ratio * s.g * s.g / dc;
    if (lo > delta_lo) {
      delta_lo = lo;
      lo_arg = k;
    }
    if (dc < delta_hi) {
      delta_hi = dc;
      hi_arg = k;
    }
  }
  if (!(delta_lo < delta_hi)) {
    throw InfeasibleError("cavity_stark_ratio of " + qubit_name(lo_arg) + " forces delta beyond the cavity detuning of " +
                              qubit_name(hi_arg),
                          qubit_name(lo_arg) + ": cavity_stark_ratio");
  }

  double floor = 0.0;
  std::size_t floor_arg = 0;
  for (std::size_t k = 0; k < model.spectators.size(); ++k) {
    const double f = model.spectators[k].g * model.spectators[k].g / model.cavity_detuning(k);
    if (f > floor) {
      floor = f;
      floor_arg = k;
    }
  }

  // Grid over [lo, hi) with repeated zoom around the best point. The
  // objective at fixed delta is analytic, so only delta is searched.
  Candidate best;
  double a = delta_lo, b = delta_hi;
  bool include_hi = false;
  for (int round = 0; round <= options.refinements; ++round) {
    const int n = options.grid_points;
    const double step = (b - a) / n;
    int best_index = -1;
    Candidate round_best;
    const int last = include_hi ? n : n - 1;
    for (int i = 0; i <= last; ++i) {
      const double d = i == n ? b : a + step * i;
      if (!(d < delta_hi) || !(d >= delta_lo)) continue;
      const Candidate c = evaluate(model, d, m);
      if (best_index < 0 || better(c, round_best)) {
        round_best = c;
        best_index = i;
      }
    }
    if (best_index < 0) break;
    if (round == 0 || better(round_best, best)) best = round_best;
    a = std::max(delta_lo, best.delta - step);
    b = std::min(best.delta + step, delta_hi);
    include_hi = b < delta_hi;
  }

  if (!(best.lambda > floor)) {
    throw InfeasibleError("reachable lambda " + std::to_string(best.lambda) + " of " + qubit_name(best.limiting) +
                              " (limited by " + best.binding + ") does not exceed the Stark floor " +
                              std::to_string(floor) + " of " + qubit_name(floor_arg),
                          qubit_name(best.limiting) + ": " + best.binding);
  }
  return calibrate_at(model, best.delta, best.lambda);
}

double occupation_probability(double pulse_detuning_ratio, double cavity_detuning_ratio) {
  auto term = [](double r) { return std::isinf(r) ? 0.0 : 2.0 / (4.0 + r * r); };
  return term(pulse_detuning_ratio) + term(cavity_detuning_ratio);
}

std::string to_string(ConditionStatus s) {
  switch (s) {
    case ConditionStatus::Pass: return "pass";
    case ConditionStatus::Warn: return "warn";
    case ConditionStatus::Fail: return "fail";
  }
  return "pass";
}

ConditionStatus classify(double r, const ConditionThresholds& t) {
  constexpr double slack = 1.0 - 1e-9;
  if (r >= t.warn_ratio * slack) return ConditionStatus::Pass;
  if (r >= t.fail_ratio * slack) return ConditionStatus::Warn;
  return ConditionStatus::Fail;
}

bool ConditionReport::any(ConditionStatus s) const {
  return std::any_of(conditions.begin(), conditions.end(), [s](const auto& c) { return c.status == s; });
}

ConditionReport condition_report(const DeviceModel& model, const CalibrationResult& calib, const Schedule& schedule,
                                 const ConditionThresholds& thresholds) {
  if (calib.spectators.size() != model.spectators.size()) throw ConfigError("calibration does not match device model");
  ConditionReport rep;
  auto push_large = [&](std::string name, int qubit, double value) {
    rep.conditions.push_back({std::move(name), qubit, value, value, classify(value, thresholds)});
  };
  auto push_small = [&](std::string name, int qubit, double value) {
    const double r = ratio(1.0, value);
    rep.conditions.push_back({std::move(name), qubit, value, r, classify(r, thresholds)});
  };

  const double t1a = schedule.duration(SegmentLabel::Step1a);
  const double t1b = schedule.duration(SegmentLabel::Step1b);
  const double t1c = schedule.duration(SegmentLabel::Step1c);
  const double tau = schedule.total_time;

  for (std::size_t k = 0; k < model.spectators.size(); ++k) {
    const auto& s = model.spectators[k];
    const auto& c = calib.spectators[k];
    const int q = static_cast<int>(k) + 2;
    const double p = occupation_probability(c.margins.pulse_detuning_ratio, c.margins.cavity_detuning_ratio);
    const double phi = s.g * s.g * (t1b + t1c) / c.cavity_detuning;
    rep.occupation.push_back(p);
    rep.phase_error.push_back(phi);
    push_large("pulse_detuning_ratio", q, c.margins.pulse_detuning_ratio);
    push_large("cavity_detuning_ratio", q, c.margins.cavity_detuning_ratio);
    push_large("raman_ratio", q, c.margins.raman_ratio);
    push_large("cavity_stark_ratio", q, c.margins.cavity_stark_ratio);
    push_large("pulse_stark_ratio", q, c.margins.pulse_stark_ratio);
    push_small("level3_occupation", q, p);
    push_small("spectator_phase", q, phi);
    push_small("level1_relaxation_exposure", q, tau * s.level1.relaxation);
    push_small("level1_dephasing_exposure", q, tau * s.level1.dephasing);
  }
  push_large("pulse_speed_1a", 0, ratio(t1b, t1a));
  push_large("pulse_speed_1c", 0, ratio(t1b, t1c));
  push_small("qubit1_level2_relaxation_exposure", 1, (t1a + t1b) * model.first.level2.relaxation);
  push_small("qubit1_level2_dephasing_exposure", 1, (t1a + t1b) * model.first.level2.dephasing);
  push_small("level1_relaxation_exposure", 1, tau * model.first.level1.relaxation);
  push_small("level1_dephasing_exposure", 1, tau * model.first.level1.dephasing);
  push_small("cavity_decay_exposure", 0, tau * model.cavity.kappa());
  return rep;
}

}  // namespace ghzcav
