#include "ghzcav/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ghzcav/error.hpp"

namespace ghzcav {

double fidelity_numeric(const StateVector& psi) {
  const StateVector target = ideal_ghz(psi.basis_ptr());
  return std::norm(overlap(psi, target));
}

double fidelity_analytic(const std::vector<double>& phases) {
  cplx minus = 1.0;
  cplx plus = 1.0;
  for (double phi : phases) {
    minus *= (1.0 + std::polar(1.0, -2.0 * phi)) / 2.0;
    plus *= (1.0 + std::polar(1.0, 2.0 * phi)) / 2.0;
  }
  return (0.25 * (1.0 + minus) * (1.0 + plus)).real();
}

std::vector<double> spectator_phases(const DeviceModel& model, const Schedule& schedule) {
  const double t = schedule.duration(SegmentLabel::Step1b) + schedule.duration(SegmentLabel::Step1c);
  std::vector<double> out;
  for (std::size_t k = 0; k < model.spectators.size(); ++k) {
    const double g = model.spectators[k].g;
    out.push_back(g * g * t / model.cavity_detuning(k));
  }
  return out;
}

LeakageReport leakage_report(const std::vector<Snapshot>& trace) {
  LeakageReport r;
  if (trace.empty()) return r;
  const auto& first = trace.front().populations;
  const std::size_t n_spec = first.size() - 2;
  r.max_level3.assign(n_spec, 0.0);
  r.max_level2.assign(n_spec, 0.0);
  r.level0_drift.assign(n_spec, 0.0);
  for (const auto& snap : trace) {
    const auto& p = snap.populations;
    if (p.size() != first.size()) throw ConfigError("trace snapshots disagree on site count");
    const auto& cav = p.back();
    double high = 0.0;
    for (std::size_t n = 2; n < cav.size(); ++n) high += cav[n];
    r.max_photon2 = std::max(r.max_photon2, high);
    for (std::size_t k = 0; k < n_spec; ++k) {
      r.max_level3[k] = std::max(r.max_level3[k], p[k + 1][3]);
      r.max_level2[k] = std::max(r.max_level2[k], p[k + 1][2]);
      r.level0_drift[k] = std::max(r.level0_drift[k], std::abs(p[k + 1][0] - first[k + 1][0]));
    }
    r.max_first_level2 = std::max(r.max_first_level2, p[0][2]);
    const bool window = snap.segment == SegmentLabel::Step1a || snap.segment == SegmentLabel::Step1b ||
                        snap.segment == SegmentLabel::Step3b || snap.segment == SegmentLabel::Step3a;
    if (!window) r.max_first_level2_outside = std::max(r.max_first_level2_outside, p[0][2]);
  }
  return r;
}

FidelityReport fidelity_report(const ProtocolResult& result, const std::vector<double>& phases) {
  FidelityReport r;
  r.f_numeric = fidelity_numeric(result.final_state);
  r.f_analytic = fidelity_analytic(phases);
  r.phases = phases;
  r.cavity_residual = result.final_state.norm_squared() - population(result.final_state,
                                                                     result.final_state.basis().cavity_site(), 0);
  r.leakage = leakage_report(result.trace);
  for (const auto& s : result.segments) r.norm_drift.push_back(s.norm_drift);
  return r;
}

}  // namespace ghzcav

namespace ghzcav {

namespace {

std::size_t segment_index(const Schedule& schedule, SegmentLabel label) {
  for (std::size_t i = 0; i < schedule.segments.size(); ++i) {
    if (schedule.segments[i].label == label) return i;
  }
  throw ConfigError("schedule has no segment " + to_string(label));
}

StateVector run_segments(const ProtocolEvolver& ev, StateVector psi, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i <= to; ++i) psi = ev.advance(i, psi, 0.0, ev.schedule().segments[i].duration);
  return psi;
}

}  // namespace

double step1_map_error(const DeviceModel& model, const Schedule& schedule, const ProtocolOptions& options) {
  ProtocolOptions full = options;
  full.mode = Mode::Full;
  ProtocolOptions closed = options;
  closed.mode = Mode::ClosedForm;
  const ProtocolEvolver ev_full(model, schedule, full);
  const ProtocolEvolver ev_closed(model, schedule, closed);
  const std::size_t last = segment_index(schedule, SegmentLabel::Step1c);
  std::vector<int> levels(static_cast<std::size_t>(ev_full.basis()->n_sites()), 0);
  double worst = 0.0;
  for (int q1 : {0, 1}) {
    levels[0] = q1;
    const StateVector in = basis_state(ev_full.basis(), levels);
    const StateVector a = run_segments(ev_full, in, 0, last);
    const StateVector b = run_segments(ev_closed, in, 0, last);
    worst = std::max(worst, (a.amplitudes() - b.amplitudes()).norm());
  }
  return worst;
}

double step2_effective_error(const DeviceModel& model, const Schedule& schedule, const ProtocolOptions& options) {
  ProtocolOptions full = options;
  full.mode = Mode::Full;
  ProtocolOptions eff = options;
  eff.mode = Mode::Effective;
  const ProtocolEvolver ev_full(model, schedule, full);
  const ProtocolEvolver ev_eff(model, schedule, eff);
  const std::size_t step2 = segment_index(schedule, SegmentLabel::Step2);
  const StateVector start = run_segments(ev_eff, initial_product_state(ev_eff.basis()), 0, step2 - 1);
  const StateVector a = run_segments(ev_full, start, step2, step2);
  const StateVector b = run_segments(ev_eff, start, step2, step2);
  return (a.amplitudes() - b.amplitudes()).norm();
}

}  // namespace ghzcav
