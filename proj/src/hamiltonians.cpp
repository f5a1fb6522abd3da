#include "ghzcav/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "ghzcav/error.hpp"

namespace ghzcav {

namespace {

void require_positive(double v, const std::string& name) {
  if (!(v > 0.0)) throw ConfigError(name + " must be positive, got " + std::to_string(v));
}

void require_rates(const DecayRates& r, const std::string& name) {
  if (!(r.relaxation >= 0.0) || !(r.dephasing >= 0.0)) throw ConfigError(name + " rates must be nonnegative");
}

int spectator_site(std::size_t k) { return static_cast<int>(k) + 1; }

// Truncated a a^dagger eigenvalue on |n>.
double aa_dagger(int n, int n_max) { return n < n_max ? n + 1.0 : 0.0; }

}  // namespace

void DeviceModel::validate() const {
  require_positive(first.omega10, "qubit 1 omega10");
  require_positive(first.omega21, "qubit 1 omega21");
  require_positive(first.g, "qubit 1 coupling g");
  require_rates(first.level1, "qubit 1 level-1");
  require_rates(first.level2, "qubit 1 level-2");
  if (spectators.empty()) throw ConfigError("device model needs at least one spectator qubit");
  for (std::size_t k = 0; k < spectators.size(); ++k) {
    const auto& s = spectators[k];
    const std::string name = "qubit " + std::to_string(k + 2);
    require_positive(s.omega10, name + " omega10");
    require_positive(s.omega21, name + " omega21");
    require_positive(s.omega32, name + " omega32");
    require_positive(s.g, name + " coupling g");
    require_rates(s.level1, name + " level-1");
    if (!(cavity_detuning(k) > 0.0)) {
      throw ConfigError(name + " cavity detuning omega31 - omega_c must be positive, got " +
                        std::to_string(cavity_detuning(k)));
    }
  }
  require_positive(cavity.omega, "cavity omega");
  require_positive(cavity.quality, "cavity quality factor");
  if (cavity.n_max < 1) throw ConfigError("cavity n_max must be >= 1");
}

BasisPtr make_basis(const DeviceModel& model) { return CompositeBasis::make(model.n_qubits(), model.cavity.n_max); }

void validate_pulse(const PulseSpec& pulse, const CompositeBasis& basis) {
  if (pulse.site < 0 || pulse.site >= basis.n_qubits()) {
    throw ConfigError("pulse targets invalid site " + std::to_string(pulse.site));
  }
  const Transition t = pulse.transition;
  const bool ok = pulse.site == 0 ? (t == Transition{1, 2} || t == Transition{0, 1}) : t == Transition{2, 3};
  if (!ok) {
    throw ConfigError("transition (" + std::to_string(t.lower) + "," + std::to_string(t.upper) +
                      ") is not driven on site " + std::to_string(pulse.site));
  }
  if (!(pulse.rabi >= 0.0)) throw ConfigError("pulse Rabi frequency must be nonnegative");
  if (!(pulse.t_end > pulse.t_start)) throw ConfigError("pulse window must be nonempty");
}

cplx Coefficient::operator()(double t) const {
  if (custom) return custom(t);
  return amplitude * std::polar(1.0, -frequency * t);
}

TimeDependentHamiltonian::TimeDependentHamiltonian(BasisPtr basis) : basis_(std::move(basis)) {}

void TimeDependentHamiltonian::add(SparseOperator op, Coefficient coeff, bool add_conjugate) {
  if (op.dim() != basis_->dim()) throw ConfigError("Hamiltonian term has wrong dimension");
  if (!add_conjugate && coeff.monochromatic() &&
      (!op.hermitian() || coeff.frequency != 0.0 || coeff.amplitude.imag() != 0.0)) {
    throw ConfigError("unpaired Hamiltonian term must be Hermitian with a real static coefficient");
  }
  adjoints_.push_back(op.adjoint());
  terms_.push_back(HamiltonianTerm{std::move(op), std::move(coeff), add_conjugate});
}

void TimeDependentHamiltonian::append(const TimeDependentHamiltonian& other) {
  require_same_basis(*basis_, *other.basis_);
  for (const auto& t : other.terms_) add(t.op, t.coeff, t.add_conjugate);
}

SparseOperator TimeDependentHamiltonian::at(double t) const {
  SparseOperator total(dim());
  for (const auto& term : terms_) {
    const cplx c = term.coeff(t);
    if (term.add_conjugate) {
      total += hermitian_closure(term.op, c);
    } else {
      total += SparseOperator(c.real() * term.op.matrix(), true);
    }
  }
  return total;
}

Eigen::VectorXcd TimeDependentHamiltonian::apply(double t, const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const auto& term = terms_[k];
    const cplx c = term.coeff(t);
    if (c == cplx(0.0)) continue;
    out.noalias() += c * (term.op.matrix() * v);
    if (term.add_conjugate) out.noalias() += std::conj(c) * (adjoints_[k].matrix() * v);
  }
  return out;
}

bool TimeDependentHamiltonian::monochromatic() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.coeff.monochromatic(); });
}

double TimeDependentHamiltonian::max_frequency() const {
  double w = 0.0;
  for (const auto& t : terms_) {
    if (t.coeff.monochromatic()) w = std::max(w, std::abs(t.coeff.frequency));
  }
  return w;
}

std::vector<RamanParameters> raman_parameters(const DeviceModel& model, const std::vector<PulseSpec>& pulses,
                                              const CompositeBasis& basis) {
  if (basis.n_qubits() != model.n_qubits()) throw ConfigError("device model and basis disagree on qubit count");
  std::vector<RamanParameters> out(model.spectators.size());
  std::vector<bool> seen(model.spectators.size(), false);
  for (const auto& p : pulses) {
    validate_pulse(p, basis);
    if (p.site == 0) continue;
    const auto k = static_cast<std::size_t>(p.site - 1);
    if (seen[k]) throw ConfigError("more than one pulse on qubit " + std::to_string(k + 2));
    seen[k] = true;
    const auto& s = model.spectators[k];
    RamanParameters r;
    r.g = s.g;
    r.rabi = p.rabi;
    r.phase = p.phase;
    r.pulse_detuning = s.omega32 - p.carrier;
    r.cavity_detuning = model.cavity_detuning(k);
    if (!(r.pulse_detuning > 0.0)) {
      throw ConfigError("qubit " + std::to_string(k + 2) + " pulse detuning must be positive, got " +
                        std::to_string(r.pulse_detuning));
    }
    if (!(r.cavity_detuning > 0.0)) {
      throw ConfigError("qubit " + std::to_string(k + 2) + " cavity detuning must be positive");
    }
    out[k] = r;
  }
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (!seen[k]) throw ConfigError("missing (2,3) pulse for qubit " + std::to_string(k + 2));
  }
  return out;
}

SparseOperator h_pulse_resonant(double rabi, double phase, Transition transition, int site,
                                const CompositeBasis& basis) {
  PulseSpec probe{site, transition, rabi, 0.0, phase, 0.0, 1.0};
  validate_pulse(probe, basis);
  const int d = basis.local_dim(site);
  return hermitian_closure(embed(ket_bra(d, transition.lower, transition.upper), site, basis),
                           rabi * std::polar(1.0, phase));
}

SparseOperator h_jc_resonant(double g, const CompositeBasis& basis) {
  const SiteFactor factors[] = {{0, ket_bra(3, 1, 2)}, {basis.cavity_site(), creation(basis.cavity_dim())}};
  return hermitian_closure(embed_product(factors, basis), g);
}

TimeDependentHamiltonian h_raman_full(const DeviceModel& model, const std::vector<PulseSpec>& pulses,
                                      const CompositeBasis& basis, RamanOptions options) {
  const auto params = raman_parameters(model, pulses, basis);
  auto shared = std::make_shared<const CompositeBasis>(basis);
  TimeDependentHamiltonian h(shared);
  const int cav = basis.cavity_site();
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& r = params[k];
    const int site = spectator_site(k);
    const SiteFactor cavity_term[] = {{site, ket_bra(4, 1, 3)}, {cav, creation(basis.cavity_dim())}};
    h.add(embed_product(cavity_term, basis), Coefficient{cplx(r.g, 0.0), r.cavity_detuning, {}});
    if (options.include_pulses) {
      h.add(embed(ket_bra(4, 2, 3), site, basis),
            Coefficient{r.rabi * std::polar(1.0, r.phase), r.pulse_detuning, {}});
    }
  }
  if (options.include_first_qubit_jc) {
    const SiteFactor jc[] = {{0, ket_bra(3, 1, 2)}, {cav, creation(basis.cavity_dim())}};
    h.add(embed_product(jc, basis), Coefficient{cplx(model.first.g, 0.0), 0.0, {}});
  }
  return h;
}

StateVector FrameShift::to_static(const StateVector& psi, double t) const {
  StateVector out = psi;
  for (Eigen::Index i = 0; i < generator.size(); ++i) out.amplitudes()[i] *= std::polar(1.0, generator[i] * t);
  return out;
}

StateVector FrameShift::from_static(const StateVector& psi_static, double t) const {
  StateVector out = psi_static;
  for (Eigen::Index i = 0; i < generator.size(); ++i) out.amplitudes()[i] *= std::polar(1.0, -generator[i] * t);
  return out;
}

FrameShift raman_frame(const DeviceModel& model, const std::vector<PulseSpec>& pulses, const CompositeBasis& basis) {
  const auto params = raman_parameters(model, pulses, basis);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    double shift = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
      const int level = basis.level(i, spectator_site(k));
      if (level == 3) shift -= params[k].cavity_detuning;
      if (level == 2) shift -= params[k].delta();
    }
    d[static_cast<Eigen::Index>(i)] = shift;
  }
  return FrameShift{d};
}

namespace {

double frame_tolerance(const TimeDependentHamiltonian& h) { return 1e-9 * (1.0 + h.max_frequency()); }

void require_monochromatic(const TimeDependentHamiltonian& h) {
  if (!h.monochromatic()) throw ConfigError("non-monochromatic coefficient: no static rotating frame exists");
}

}  // namespace

StaticFrame rotating_frame_static(const TimeDependentHamiltonian& h) {
  require_monochromatic(h);
  const auto& basis = *h.basis_ptr();
  const std::size_t dim = basis.dim();

  // Edge s -> s' carries D_{s'} - D_{s} = omega for every nonzero <s'|A|s>.
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency(dim);
  for (const auto& term : h.terms()) {
    const double w = term.add_conjugate ? term.coeff.frequency : 0.0;
    const auto& m = term.op.matrix();
    for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
      for (SparseOperator::Matrix::InnerIterator it(m, r); it; ++it) {
        const auto row = static_cast<std::size_t>(it.row());
        const auto col = static_cast<std::size_t>(it.col());
        if (row == col) continue;
        adjacency[col].emplace_back(row, w);
        adjacency[row].emplace_back(col, -w);
      }
    }
  }

  // Roots are taken from states with the fewest spectator |2>/|3>
  // excitations so that those states anchor D = 0.
  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto excitations = [&](std::size_t i) {
    int count = 0;
    for (int site = 1; site < basis.n_qubits(); ++site) count += basis.level(i, site) >= 2 ? 1 : 0;
    return count;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return excitations(a) < excitations(b); });

  const double tol = frame_tolerance(h);
  Eigen::VectorXd d = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), std::numeric_limits<double>::quiet_NaN());
  std::deque<std::size_t> queue;
  for (std::size_t root : order) {
    if (!std::isnan(d[static_cast<Eigen::Index>(root)])) continue;
    d[static_cast<Eigen::Index>(root)] = 0.0;
    queue.push_back(root);
    while (!queue.empty()) {
      const std::size_t s = queue.front();
      queue.pop_front();
      const double ds = d[static_cast<Eigen::Index>(s)];
      for (const auto& [next, w] : adjacency[s]) {
        double& dn = d[static_cast<Eigen::Index>(next)];
        if (std::isnan(dn)) {
          dn = ds + w;
          queue.push_back(next);
        } else if (std::abs(dn - (ds + w)) > tol) {
          throw ConfigError("coupling frequencies admit no consistent rotating frame");
        }
      }
    }
  }
  FrameShift frame{d};
  SparseOperator hs = static_in_frame(h, frame);
  return StaticFrame{std::move(hs), std::move(frame)};
}

SparseOperator static_in_frame(const TimeDependentHamiltonian& h, const FrameShift& frame) {
  require_monochromatic(h);
  if (static_cast<std::size_t>(frame.generator.size()) != h.dim()) throw ConfigError("frame dimension mismatch");
  const double tol = frame_tolerance(h);
  SparseOperator total(h.dim());
  for (const auto& term : h.terms()) {
    const double w = term.add_conjugate ? term.coeff.frequency : 0.0;
    const auto& m = term.op.matrix();
    for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
      for (SparseOperator::Matrix::InnerIterator it(m, r); it; ++it) {
        const double mismatch = frame.generator[it.row()] - frame.generator[it.col()] - w;
        if (std::abs(mismatch) > tol) throw ConfigError("Hamiltonian term is inconsistent with the rotating frame");
      }
    }
    if (term.add_conjugate) {
      total += hermitian_closure(term.op, term.coeff.amplitude);
    } else {
      total += SparseOperator(term.coeff.amplitude.real() * term.op.matrix(), true);
    }
  }
  total += SparseOperator::diagonal(-frame.generator);
  return total;
}

TimeDependentHamiltonian h_eff_raman(const DeviceModel& model, const std::vector<PulseSpec>& pulses,
                                     const CompositeBasis& basis) {
  const auto params = raman_parameters(model, pulses, basis);
  auto shared = std::make_shared<const CompositeBasis>(basis);
  TimeDependentHamiltonian h(shared);
  const int cav = basis.cavity_site();
  const int cd = basis.cavity_dim();
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& r = params[k];
    const int site = spectator_site(k);
    h.add(embed(projector(4, 2), site, basis), Coefficient{cplx(-r.pulse_stark(), 0.0), 0.0, {}}, false);
    const SiteFactor stark[] = {{site, projector(4, 1)}, {cav, number_operator(cd)}};
    h.add(embed_product(stark, basis), Coefficient{cplx(-r.cavity_stark(), 0.0), 0.0, {}}, false);
    const SiteFactor flip[] = {{site, ket_bra(4, 1, 2)}, {cav, creation(cd)}};
    h.add(embed_product(flip, basis), Coefficient{cplx(-r.chi(), 0.0) * std::polar(1.0, -r.phase), r.delta(), {}});
  }
  return h;
}

namespace {

double common_delta(const std::vector<RamanParameters>& params, const DeviceModel& model) {
  double lo = params.front().delta();
  double hi = lo;
  for (const auto& r : params) {
    lo = std::min(lo, r.delta());
    hi = std::max(hi, r.delta());
  }
  if (hi - lo > 1e-9 * model.first.g) {
    throw ConfigError("Raman detunings delta_j differ by " + std::to_string(hi - lo) + "; calibrate carriers first");
  }
  return params.front().delta();
}

}  // namespace

SparseOperator h_eff_reduced(const DeviceModel& model, const std::vector<PulseSpec>& pulses,
                             const CompositeBasis& basis) {
  const auto params = raman_parameters(model, pulses, basis);
  common_delta(params, model);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const int n = basis.photons(i);
    if (n == 0) continue;
    double e = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
      if (basis.level(i, spectator_site(k)) == 1) e -= params[k].lambda() * n;
    }
    diag[static_cast<Eigen::Index>(i)] = e;
  }
  return SparseOperator::diagonal(diag);
}

SparseOperator h_eff_dispersive(const DeviceModel& model, const std::vector<PulseSpec>& pulses,
                                const CompositeBasis& basis) {
  const auto params = raman_parameters(model, pulses, basis);
  const double delta = common_delta(params, model);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const int n = basis.photons(i);
    double e = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
      const auto& r = params[k];
      const int level = basis.level(i, spectator_site(k));
      const double chi2 = r.chi() * r.chi() / delta;
      if (level == 1) e -= (r.cavity_stark() + chi2) * n;
      if (level == 2) e += -r.pulse_stark() + chi2 * aa_dagger(n, basis.n_max());
    }
    diag[static_cast<Eigen::Index>(i)] = e;
  }
  SparseOperator h = SparseOperator::diagonal(diag);
  for (std::size_t j = 0; j < params.size(); ++j) {
    for (std::size_t k = j + 1; k < params.size(); ++k) {
      const SiteFactor pair[] = {{spectator_site(j), ket_bra(4, 2, 1)}, {spectator_site(k), ket_bra(4, 1, 2)}};
      const cplx strength = params[j].chi() * params[k].chi() / delta *
                            std::polar(1.0, params[j].phase - params[k].phase);
      h += hermitian_closure(embed_product(pair, basis), strength);
    }
  }
  return h;
}

}  // namespace ghzcav
