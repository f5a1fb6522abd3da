#include "ghzcav/protocol.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ghzcav/error.hpp"

namespace ghzcav {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_step2(SegmentLabel l) { return l == SegmentLabel::Step2; }

// c_lo, c_hi under exp(-i t Omega (e^{i phi}|lo><hi| + h.c.)), for every
// pair of indices that differ only in qubit 1's level.
void rotate_first_qubit(Eigen::VectorXcd& v, std::size_t stride, Transition tr, double rabi, double phase, double t) {
  const double c = std::cos(rabi * t);
  const cplx s = cplx(0.0, -std::sin(rabi * t));
  const cplx up = s * std::polar(1.0, phase);     // hi -> lo
  const cplx down = s * std::polar(1.0, -phase);  // lo -> hi
  const auto n = static_cast<std::size_t>(v.size());
  const std::size_t shift = static_cast<std::size_t>(tr.upper - tr.lower) * stride;
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>((i / stride) % 3) != tr.lower) continue;
    const auto lo = static_cast<Eigen::Index>(i);
    const auto hi = static_cast<Eigen::Index>(i + shift);
    const cplx a = v[lo];
    const cplx b = v[hi];
    v[lo] = c * a + up * b;
    v[hi] = c * b + down * a;
  }
}

// g (a^dagger |1><2| + h.c.) on qubit 1: |2,n> <-> |1,n+1> at rate g sqrt(n+1).
void jc_swap(Eigen::VectorXcd& v, std::size_t stride, int cavity_dim, double g, double t) {
  const auto n = static_cast<std::size_t>(v.size());
  for (std::size_t i = 0; i < n; ++i) {
    if ((i / stride) % 3 != 2) continue;
    const int photons = static_cast<int>(i % static_cast<std::size_t>(cavity_dim));
    if (photons + 1 >= cavity_dim) continue;
    const double w = g * std::sqrt(photons + 1.0) * t;
    const auto upper = static_cast<Eigen::Index>(i);
    const auto lower = static_cast<Eigen::Index>(i - stride + 1);
    const cplx a = v[upper];
    const cplx b = v[lower];
    v[upper] = std::cos(w) * a - cplx(0.0, std::sin(w)) * b;
    v[lower] = std::cos(w) * b - cplx(0.0, std::sin(w)) * a;
  }
}

// Photon number times the count of spectators in |1>.
Eigen::VectorXd stark_weights(const CompositeBasis& basis) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    int ones = 0;
    for (int site = 1; site < basis.n_qubits(); ++site) ones += basis.level(i, site) == 1 ? 1 : 0;
    w[static_cast<Eigen::Index>(i)] = static_cast<double>(basis.photons(i) * ones);
  }
  return w;
}

const PulseSpec* first_qubit_pulse(const Segment& seg) {
  for (const auto& p : seg.pulses) {
    if (p.site == 0) return &p;
  }
  return nullptr;
}

}  // namespace

std::string to_string(SegmentLabel label) {
  switch (label) {
    case SegmentLabel::Step1a: return "step-1a";
    case SegmentLabel::Step1b: return "step-1b";
    case SegmentLabel::Step1c: return "step-1c";
    case SegmentLabel::Step2: return "step-2";
    case SegmentLabel::Step3c: return "step-3c";
    case SegmentLabel::Step3b: return "step-3b";
    case SegmentLabel::Step3a: return "step-3a";
  }
  return "step-?";
}

const Segment& Schedule::segment(SegmentLabel label) const {
  for (const auto& s : segments) {
    if (s.label == label) return s;
  }
  throw ConfigError("schedule has no segment " + to_string(label));
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::ClosedForm: return "closed-form";
    case Mode::Effective: return "effective";
    case Mode::Full: return "full";
  }
  return "closed-form";
}

Mode parse_mode(const std::string& s) {
  if (s == "closed-form") return Mode::ClosedForm;
  if (s == "effective") return Mode::Effective;
  if (s == "full") return Mode::Full;
  throw ConfigError("unknown mode '" + s + "' (expected closed-form, effective or full)");
}

Schedule build_ghz_schedule(const DeviceModel& model, const CalibrationResult& calib, double rabi_r,
                            double rabi_r_tilde) {
  model.validate();
  if (!(rabi_r > 0.0) || !(rabi_r_tilde > 0.0)) throw ConfigError("qubit-1 Rabi frequencies must be positive");
  if (!(calib.lambda > 0.0)) throw ConfigError("calibration has no positive lambda");
  if (calib.spectators.size() != model.spectators.size()) {
    throw ConfigError("calibration covers " + std::to_string(calib.spectators.size()) + " spectators, model has " +
                      std::to_string(model.spectators.size()));
  }
  const double g = model.first.g;
  Schedule s;
  s.rabi_r = rabi_r;
  s.rabi_r_tilde = rabi_r_tilde;
  s.g = g;
  s.lambda = calib.lambda;

  const double t1a = kPi / (2.0 * rabi_r);
  const double t1b = kPi / (2.0 * g);
  const double t1c = kPi / (2.0 * rabi_r_tilde);
  const double t2 = kPi / calib.lambda;

  double t = 0.0;
  auto push = [&](SegmentLabel label, double duration, std::vector<PulseSpec> pulses) {
    for (auto& p : pulses) {
      p.t_start = t;
      p.t_end = t + duration;
    }
    s.segments.push_back(Segment{label, t, duration, std::move(pulses)});
    t += duration;
  };
  auto q1 = [&](Transition tr, double rabi, double phase) {
    const double carrier = tr == Transition{1, 2} ? model.first.omega21 : model.first.omega10;
    return std::vector<PulseSpec>{PulseSpec{0, tr, rabi, carrier, phase, 0.0, 0.0}};
  };
  push(SegmentLabel::Step1a, t1a, q1({1, 2}, rabi_r, -kPi / 2));
  push(SegmentLabel::Step1b, t1b, {});
  push(SegmentLabel::Step1c, t1c, q1({0, 1}, rabi_r_tilde, -kPi / 2));
  push(SegmentLabel::Step2, t2, calib.raman_pulses(0.0, 0.0));
  push(SegmentLabel::Step3c, t1c, q1({0, 1}, rabi_r_tilde, kPi / 2));
  push(SegmentLabel::Step3b, t1b, {});
  push(SegmentLabel::Step3a, t1a, q1({1, 2}, rabi_r, kPi / 2));
  // Summed in the closed form so that the total does not depend on the
  // order of accumulation.
  s.total_time = kPi / g + kPi / rabi_r + kPi / rabi_r_tilde + kPi / calib.lambda;
  return s;
}

void ProtocolOptions::validate() const {
  propagator.validate();
  if (samples_per_segment < 1) throw ConfigError("samples_per_segment must be >= 1");
}

ProtocolEvolver::ProtocolEvolver(const DeviceModel& model, const Schedule& schedule, const ProtocolOptions& options)
    : model_(model), schedule_(schedule), options_(options), basis_(make_basis(model)) {
  model_.validate();
  options_.validate();
  if (schedule_.segments.empty()) throw ConfigError("empty schedule");
  const auto& basis = *basis_;
  const Segment& step2 = schedule_.segment(SegmentLabel::Step2);

  if (options_.mode == Mode::Full) {
    frame_ = raman_frame(model_, step2.pulses, basis);
  } else {
    frame_.generator = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.dim()));
  }

  for (const auto& seg : schedule_.segments) {
    const PulseSpec* pulse = first_qubit_pulse(seg);
    if (options_.mode != Mode::Full) {
      if (pulse != nullptr) {
        static_.push_back(h_pulse_resonant(pulse->rabi, pulse->phase, pulse->transition, 0, basis));
      } else if (is_step2(seg.label)) {
        static_.push_back(options_.mode == Mode::Effective
                              ? h_eff_reduced(model_, seg.pulses, basis)
                              : SparseOperator::diagonal(-schedule_.lambda * stark_weights(basis)));
      } else {
        static_.push_back(h_jc_resonant(schedule_.g, basis));
      }
      continue;
    }

    TimeDependentHamiltonian h(basis_);
    if (is_step2(seg.label)) {
      h.append(h_raman_full(model_, seg.pulses, basis, {options_.first_qubit_jc_in_step2, true}));
    } else {
      if (options_.spectator_cavity_in_steps13) h.append(h_raman_full(model_, step2.pulses, basis, {false, false}));
      if (pulse == nullptr || options_.jc_during_pulses) {
        h.add(h_jc_resonant(model_.first.g, basis), Coefficient{}, false);
      }
      if (pulse != nullptr) {
        h.add(h_pulse_resonant(pulse->rabi, pulse->phase, pulse->transition, 0, basis), Coefficient{}, false);
      }
    }
    static_.push_back(static_in_frame(h, frame_));
    timedep_.push_back(std::move(h));
  }
}

StateVector ProtocolEvolver::advance_closed_form(std::size_t index, const StateVector& psi, double dt) const {
  const Segment& seg = schedule_.segments[index];
  const auto& basis = *basis_;
  StateVector out = psi;
  auto& v = out.amplitudes();
  if (const PulseSpec* p = first_qubit_pulse(seg)) {
    rotate_first_qubit(v, basis.stride(0), p->transition, p->rabi, p->phase, dt);
  } else if (is_step2(seg.label)) {
    const Eigen::VectorXd w = stark_weights(basis);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (w[i] != 0.0) v[i] *= std::polar(1.0, schedule_.lambda * w[i] * dt);
    }
  } else {
    jc_swap(v, basis.stride(0), basis.cavity_dim(), schedule_.g, dt);
  }
  return out;
}

StateVector ProtocolEvolver::advance(std::size_t index, const StateVector& psi, double s0, double s1,
                                     PropagationStats* stats) const {
  if (index >= schedule_.segments.size()) throw ConfigError("segment index out of range");
  require_same_basis(psi.basis(), *basis_);
  if (!(s1 >= s0)) throw ConfigError("advance needs s1 >= s0");
  if (stats != nullptr) *stats = {};
  const Segment& seg = schedule_.segments[index];
  const double dt = s1 - s0;

  if (options_.mode == Mode::ClosedForm || (options_.mode == Mode::Effective && !is_step2(seg.label))) {
    return advance_closed_form(index, psi, dt);
  }
  if (options_.mode == Mode::Effective) {
    return propagate_static(static_[index], psi, dt, options_.propagator, stats);
  }
  const double t0 = seg.t_start + s0;
  const double t1 = seg.t_start + s1;
  if (options_.propagator.method == PropagatorMethod::TimedepRk4) {
    TimedepResult r = propagate_timedep(timedep_[index], psi, t0, t1, options_.propagator);
    if (stats != nullptr) *stats = {static_cast<int>(std::lround(dt / r.step)), r.error_estimate};
    return std::move(r.state);
  }
  StateVector rotated = frame_.to_static(psi, t0);
  rotated = propagate_static(static_[index], rotated, dt, options_.propagator, stats);
  return frame_.from_static(rotated, t1);
}

std::vector<std::vector<double>> site_populations(const StateVector& psi) {
  const auto& basis = psi.basis();
  std::vector<std::vector<double>> pops(static_cast<std::size_t>(basis.n_sites()));
  for (int site = 0; site < basis.n_sites(); ++site) pops[static_cast<std::size_t>(site)].assign(
      static_cast<std::size_t>(basis.local_dim(site)), 0.0);
  const auto& a = psi.amplitudes();
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const double p = std::norm(a[static_cast<Eigen::Index>(i)]);
    if (p == 0.0) continue;
    for (int site = 0; site < basis.n_sites(); ++site) {
      pops[static_cast<std::size_t>(site)][static_cast<std::size_t>(basis.level(i, site))] += p;
    }
  }
  return pops;
}

StateVector ideal_ghz(const BasisPtr& basis) {
  StateVector out(basis);
  const int n = basis->n_qubits();
  const double amp = std::pow(2.0, -0.5 * n);
  std::vector<int> levels(static_cast<std::size_t>(basis->n_sites()), 0);
  const unsigned count = 1u << static_cast<unsigned>(n - 1);
  for (unsigned mask = 0; mask < count; ++mask) {
    int ones = 0;
    for (int k = 0; k < n - 1; ++k) {
      const int bit = static_cast<int>((mask >> static_cast<unsigned>(k)) & 1u);
      levels[static_cast<std::size_t>(k + 1)] = bit;
      ones += bit;
    }
    levels[0] = 0;
    out[basis->flatten(levels)] = amp;
    levels[0] = 1;
    out[basis->flatten(levels)] = (ones % 2 == 0 ? -amp : amp);
  }
  return out;
}

LocalOperator closed_form_step_map(Step step, int n_max) {
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  const int cd = n_max + 1;
  const auto stride = static_cast<std::size_t>(cd);
  const Eigen::Index dim = 3 * cd;
  LocalOperator u = LocalOperator::Identity(dim, dim);
  // Each stage is an exact quarter cycle, so the rates only set the time unit.
  for (Eigen::Index col = 0; col < dim; ++col) {
    Eigen::VectorXcd v = u.col(col);
    if (step == Step::One) {
      rotate_first_qubit(v, stride, {1, 2}, 1.0, -kPi / 2, kPi / 2);
      jc_swap(v, stride, cd, 1.0, kPi / 2);
      rotate_first_qubit(v, stride, {0, 1}, 1.0, -kPi / 2, kPi / 2);
    } else {
      rotate_first_qubit(v, stride, {0, 1}, 1.0, kPi / 2, kPi / 2);
      jc_swap(v, stride, cd, 1.0, kPi / 2);
      rotate_first_qubit(v, stride, {1, 2}, 1.0, kPi / 2, kPi / 2);
    }
    u.col(col) = v;
  }
  return u;
}

ProtocolResult run_protocol(const DeviceModel& model, const Schedule& schedule, const StateVector& psi0,
                            const ProtocolOptions& options) {
  ProtocolEvolver evolver(model, schedule, options);
  require_same_basis(psi0.basis(), *evolver.basis());
  const StateVector target = ideal_ghz(evolver.basis());
  auto snapshot = [&](SegmentLabel label, double t, const StateVector& psi) {
    return Snapshot{label, t, psi.norm(), site_populations(psi), std::norm(overlap(psi, target))};
  };

  ProtocolResult result{psi0, {}, {}, {}};
  StateVector psi = psi0;
  result.trace.push_back(snapshot(schedule.segments.front().label, 0.0, psi));
  const int samples = options.samples_per_segment;
  for (std::size_t i = 0; i < schedule.segments.size(); ++i) {
    const Segment& seg = schedule.segments[i];
    SegmentRecord rec{seg.label, 0.0, 0, 0.0};
    const double norm_start = psi.norm();
    double s_prev = 0.0;
    for (int k = 1; k <= samples; ++k) {
      const double s = k == samples ? seg.duration : seg.duration * k / samples;
      PropagationStats stats;
      try {
        psi = evolver.advance(i, psi, s_prev, s, &stats);
      } catch (const NumericalError& e) {
        throw NumericalError(to_string(seg.label) + ": " + e.what());
      }
      rec.substeps += stats.substeps;
      rec.error_estimate += stats.error_estimate;
      result.trace.push_back(snapshot(seg.label, seg.t_start + s, psi));
      s_prev = s;
    }
    rec.norm_drift = std::abs(psi.norm() - norm_start);
    result.segments.push_back(rec);
    result.segment_states.push_back(psi);
    if (options.stop_after && *options.stop_after == seg.label) break;
  }
  result.final_state = psi;
  return result;
}

}  // namespace ghzcav
