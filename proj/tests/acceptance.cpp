// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "ghzcav/calibrate.hpp"
#include "ghzcav/evolve.hpp"
#include "ghzcav/metrics.hpp"
#include "ghzcav/noise.hpp"
#include "ghzcav/protocol.hpp"

using namespace ghzcav;
using ghzcav::testing::reference_device;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGHz = 2.2e8;  // g / 2pi of the reference device

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ",") + fmt("%.3g", x);
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Reference {
  DeviceModel model;
  CalibrationResult calib;
  Schedule schedule;
};

Reference searched(int n) {
  Reference r{reference_device(n), {}, {}};
  r.calib = feasibility_search(r.model, MarginTargets{});
  r.schedule = build_ghz_schedule(r.model, r.calib, 10.0, 10.0);
  return r;
}

Outcome closed_form_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_f = 0.0, worst_photon = 0.0;
  for (int n : {2, 3, 6}) {
    auto ref = searched(n);
    auto r = run_protocol(ref.model, ref.schedule, initial_product_state(make_basis(ref.model)), ProtocolOptions{});
    worst_f = std::max(worst_f, std::abs(fidelity_numeric(r.final_state) - 1.0));
    worst_photon = std::max(worst_photon, 1.0 - population(r.final_state, n, 0));
  }
  const double secs = seconds_since(t0);
  return {worst_f <= 1e-12 && std::abs(worst_photon) <= 1e-12 && secs < 1.0,
          fmt("n=2,3,6 max|F-1|=%.2e max photon=%.2e (%.3f s)", worst_f, worst_photon, secs)};
}

Outcome total_time() {
  auto m = reference_device(6);
  auto calib = calibrate_at(m, 0.2, 0.022);
  auto s = build_ghz_schedule(m, calib, 10.0, 10.0);
  const double tau_over = s.total_time / kPi;
  const double tau_us = s.total_time / (2.0 * kPi * kGHz) * 1e6;
  return {std::abs(tau_over - 46.65) <= 0.05 && std::abs(tau_us - 0.106) <= 0.005,
          fmt("lambda=0.022g: tau*g/pi=%.4f, tau=%.4f us at 220 MHz", tau_over, tau_us)};
}

Outcome calibration() {
  const auto t0 = std::chrono::steady_clock::now();
  auto ref = searched(6);
  const double per_gj = ref.calib.lambda / ref.model.spectators[0].g;
  const double per_g = ref.calib.lambda / ref.model.first.g;

  // Five spectators with g_j from 0.18 to 0.22; Delta_c,j = g_j^2 / 0.018
  // keeps every Stark floor at 0.018 and every ratio >= 10.
  auto m = reference_device(6);
  for (int k = 0; k < 5; ++k) {
    auto& s = m.spectators[static_cast<std::size_t>(k)];
    s.g = 0.18 + 0.01 * k;
    s.omega32 = m.cavity.omega + s.g * s.g / 0.018 - s.omega21;
  }
  auto calib = feasibility_search(m, MarginTargets{});
  auto params = raman_parameters(m, calib.raman_pulses(0.0, 1.0), *make_basis(m));
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& p : params) {
    lo = std::min(lo, p.lambda());
    hi = std::max(hi, p.lambda());
  }
  const double secs = seconds_since(t0);
  return {std::abs(per_gj - 0.109) <= 0.002 && std::abs(per_g - 0.022) <= 0.001 && hi - lo <= 1e-9 && secs < 1.0,
          fmt("lambda/g_j=%.6f lambda/g=%.6f; nonidentical g_j spread=%.2e g (%.3f s)", per_gj, per_g, hi - lo,
              secs)};
}

Outcome occupation() {
  const auto t0 = std::chrono::steady_clock::now();
  const double p = occupation_probability(10.0, 10.0);
  auto ref = searched(2);
  ProtocolOptions opt;
  opt.mode = Mode::Full;
  opt.samples_per_segment = 64;
  auto r = run_protocol(ref.model, ref.schedule, initial_product_state(make_basis(ref.model)), opt);
  const double max3 = leakage_report(r.trace).max_level3.at(0);
  const double secs = seconds_since(t0);
  return {std::abs(p - 0.0385) <= 0.0005 && max3 <= 2.0 * p && secs < 60.0,
          fmt("p=%.5f, full n=2 max level-3 population=%.5f (bound %.4f) (%.2f s)", p, max3, 2.0 * p, secs)};
}

Outcome analytic_fidelity() {
  const double f = fidelity_analytic(std::vector<double>(5, 0.011 * kPi));
  const double f0 = fidelity_analytic(std::vector<double>(5, 0.0));
  return {f >= 0.985 && f <= 0.995 && f0 == 1.0, fmt("F(phi=0.011pi x5)=%.6f, F(0)=%.17g", f, f0)};
}

// Phase picked up by |1>_j|1>_c under the full Raman Hamiltonian over pi/lambda,
// relative to the effective value pi.
double raman_phase_error(double ratio) {
  auto m = reference_device(2, ratio);
  const auto& s = m.spectators[0];
  const double rabi = 0.9 * s.g;
  const double dc = ratio * s.g;
  const double dp = ratio * rabi;
  const double delta = dc - dp;
  const double chi = 0.5 * rabi * s.g * (1.0 / dp + 1.0 / dc);
  const double lambda = s.g * s.g / dc + chi * chi / delta;
  const double t = kPi / lambda;
  std::vector<PulseSpec> pulses = {{1, {2, 3}, rabi, s.omega32 - dp, 0.0, 0.0, t}};
  auto b = make_basis(m);
  auto h = h_raman_full(m, pulses, *b);
  auto frame = raman_frame(m, pulses, *b);
  const int start[] = {0, 1, 1};
  PropagatorConfig cfg;
  auto out = frame.from_static(propagate_static(static_in_frame(h, frame), basis_state(b, start), t, cfg), t);
  double phase = std::arg(out[b->flatten(start)]);
  if (phase < 0.0) phase += 2.0 * kPi;
  return std::abs(phase - kPi) / kPi;
}

Outcome full_vs_effective() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> err;
  for (double r : {5.0, 10.0, 20.0, 40.0}) err.push_back(raman_phase_error(r));
  const double secs = seconds_since(t0);
  return {err[1] <= 0.05 && strictly_decreasing(err) && secs < 300.0,
          fmt("relative phase error at ratio 5,10,20,40: %s (%.2f s)", join(err).c_str(), secs)};
}

Outcome end_to_end() {
  auto t0 = std::chrono::steady_clock::now();
  auto ref = searched(3);
  ProtocolOptions opt;
  opt.mode = Mode::Full;
  auto psi0 = initial_product_state(make_basis(ref.model));
  auto rep = fidelity_report(run_protocol(ref.model, ref.schedule, psi0, opt), spectator_phases(ref.model, ref.schedule));
  const double secs3 = seconds_since(t0);

  auto jc = opt;
  jc.jc_during_pulses = true;
  auto rep_jc =
      fidelity_report(run_protocol(ref.model, ref.schedule, psi0, jc), spectator_phases(ref.model, ref.schedule));

  t0 = std::chrono::steady_clock::now();
  auto ref6 = searched(6);
  auto rep6 = fidelity_report(run_protocol(ref6.model, ref6.schedule, initial_product_state(make_basis(ref6.model)), opt),
                              spectator_phases(ref6.model, ref6.schedule));
  const double secs6 = seconds_since(t0);

  const bool pass = std::abs(rep.f_numeric - rep.f_analytic) <= 0.01 && rep.leakage.max_photon2 < 1e-4 &&
                    secs3 < 600.0 && secs6 < 3600.0;
  return {pass, fmt("n=3 F_num=%.5f F_an=%.5f photon2=%.1e (%.2f s); n=6 F_num=%.5f F_an=%.5f (%.2f s); "
                    "n=3 with qubit-1 JC on during pulses F_num=%.5f",
                    rep.f_numeric, rep.f_analytic, rep.leakage.max_photon2, secs3, rep6.f_numeric, rep6.f_analytic,
                    secs6, rep_jc.f_numeric)};
}

Outcome dual_propagator() {
  auto m = reference_device(2);
  auto calib = calibrate_at(m, 0.2, 0.022);
  const double t = kPi / 0.022;
  auto pulses = calib.raman_pulses(0.0, t);
  auto b = make_basis(m);
  auto h = h_raman_full(m, pulses, *b);
  auto frame = raman_frame(m, pulses, *b);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(b->dim()));
  for (int q : {0, 1}) {
    for (int n : {0, 1}) {
      const int lv[] = {0, q, n};
      v[static_cast<Eigen::Index>(b->flatten(lv))] = 0.5;
    }
  }
  StateVector psi(b, v);
  PropagatorConfig eig;
  eig.method = PropagatorMethod::StaticEigen;
  auto exact = frame.from_static(propagate_static(static_in_frame(h, frame), psi, t, eig), t);
  PropagatorConfig rk;
  rk.step = 0.01;
  rk.timedep_tolerance = 1e-10;
  rk.max_refinements = 6;
  auto td = propagate_timedep(h, psi, 0.0, t, rk);
  const double diff = (td.state.amplitudes() - exact.amplitudes()).norm();

  // Order from three fixed-step runs on a shorter window.
  const double w = 20.0;
  auto ref = frame.from_static(propagate_static(static_in_frame(h, frame), psi, w, eig), w);
  std::vector<double> errs;
  for (long steps : {200L, 400L, 800L}) {
    errs.push_back((rk4_fixed(h, psi, 0.0, w, steps).amplitudes() - ref.amplitudes()).norm());
  }
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  const bool pass = diff <= 1e-8 && std::abs(order1 - 4.0) <= 0.2 && std::abs(order2 - 4.0) <= 0.2;
  return {pass, fmt("|psi_rk4 - psi_static|=%.2e over step 2; measured order %.3f, %.3f", diff, order1, order2)};
}

// Cavity decay only, closed-form protocol. After step 1 the photon rides
// with qubit 1 in |0>. Without a jump that branch keeps amplitude
// e^{-kappa T/2}, with T the photon occupation time (1b and 3b at half
// weight, the mean of sin^2 over a quarter swap). A jump leaves |0> with
// vacuum, which step 3 turns into qubit 1 in |2>: no overlap with the
// target. So F = (1 + e^{-kappa T/2})^2 / 4.
double cavity_decay_oracle(const Schedule& s, double kappa) {
  const double occ = 0.5 * s.duration(SegmentLabel::Step1b) + s.duration(SegmentLabel::Step1c) +
                     s.duration(SegmentLabel::Step2) + s.duration(SegmentLabel::Step3c) +
                     0.5 * s.duration(SegmentLabel::Step3b);
  return 0.25 * std::pow(1.0 + std::exp(-0.5 * kappa * occ), 2);
}

Outcome noise_sanity() {
  const auto t0 = std::chrono::steady_clock::now();
  auto noisy = reference_device(3, 10.0, true);
  auto calib = feasibility_search(noisy, MarginTargets{});
  auto sched = build_ghz_schedule(noisy, calib, 10.0, 10.0);
  ProtocolOptions opt;
  ProtocolEvolver ev(noisy, sched, opt);
  auto psi0 = initial_product_state(ev.basis());
  auto channels = noise_channels(noisy, *ev.basis());
  for (auto& c : channels) {
    if (c.label != "cavity_decay") c.rate = 0.0;
  }
  auto traj = run_trajectories(ev, psi0, channels, {2000, 2024, 0.5});
  const double oracle = cavity_decay_oracle(sched, noisy.cavity.kappa());
  const double z = std::abs(traj.mean - oracle) / traj.std_error;
  const double lindblad = lindblad_fidelity(ev, psi0, channels, 0.05);

  // Zero rates: the trajectory driver must reproduce the unitary run.
  std::vector<double> zero_gap;
  for (Mode mode : {Mode::ClosedForm, Mode::Full}) {
    ProtocolOptions o;
    o.mode = mode;
    ProtocolEvolver e(noisy, sched, o);
    auto zero = channels;
    for (auto& c : zero) c.rate = 0.0;
    auto r = run_trajectories(e, psi0, zero, {100, 1, 0.0});
    const double unitary = fidelity_numeric(run_protocol(noisy, sched, psi0, o).final_state);
    zero_gap.push_back(std::abs(r.mean - unitary));
  }
  const double secs = seconds_since(t0);
  const double gap = *std::max_element(zero_gap.begin(), zero_gap.end());
  return {z <= 3.0 && gap <= 1e-10 && secs < 600.0,
          fmt("2000 traj F=%.5f +- %.5f, oracle %.5f (%.2f stderr), master equation %.5f; zero-rate gap %.1e "
              "(%.1f s)",
              traj.mean, traj.std_error, oracle, z, lindblad, gap, secs)};
}

Outcome pulse_speed() {
  const auto t0 = std::chrono::steady_clock::now();
  auto m = reference_device(2);
  auto calib = feasibility_search(m, MarginTargets{});
  ProtocolOptions opt;
  opt.jc_during_pulses = true;
  std::vector<double> err;
  for (double r : {5.0, 10.0, 20.0, 50.0}) {
    err.push_back(step1_map_error(m, build_ghz_schedule(m, calib, r, r), opt));
  }
  const double secs = seconds_since(t0);
  return {strictly_decreasing(err) && secs < 300.0,
          fmt("step-1 map error at Omega_r/g=5,10,20,50: %s (%.2f s)", join(err).c_str(), secs)};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> checks = {
      closed_form_exactness, total_time,      calibration,  occupation,   analytic_fidelity,
      full_vs_effective,     end_to_end,      dual_propagator, noise_sanity, pulse_speed};
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome o;
    try {
      o = checks[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %zu: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
