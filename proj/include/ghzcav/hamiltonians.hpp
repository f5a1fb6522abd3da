#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ghzcav/basis.hpp"
#include "ghzcav/operator.hpp"

namespace ghzcav {

// All frequencies are angular (rad per unit time) with hbar = 1. The CLI
// normalizes everything by qubit 1's coupling g, so inside the library g = 1
// is the usual scale, but nothing here assumes it.

struct DecayRates {
  double relaxation = 0.0;
  double dephasing = 0.0;
};

// Three-level qubit 1; its |1>-|2> transition is resonant with the cavity.
struct FirstQubit {
  double omega10 = 0.0;
  double omega21 = 0.0;
  double g = 1.0;
  DecayRates level1;
  DecayRates level2;
};

// Four-level qubits 2..n. The cavity couples |1>-|3>, a pulse drives |2>-|3>.
struct SpectatorQubit {
  double omega10 = 0.0;
  double omega21 = 0.0;
  double omega32 = 0.0;
  double g = 0.0;
  DecayRates level1;

  double omega31() const { return omega32 + omega21; }
};

struct Cavity {
  double omega = 0.0;
  double quality = 0.0;  // infinity means lossless
  int n_max = 2;

  double kappa() const { return quality > 0.0 ? omega / quality : 0.0; }
};

struct DeviceModel {
  FirstQubit first;
  std::vector<SpectatorQubit> spectators;  // spectators[k] is qubit k+2, site k+1
  Cavity cavity;

  int n_qubits() const { return static_cast<int>(spectators.size()) + 1; }
  // Delta_c,j = omega31^j - omega_c for spectator index k.
  double cavity_detuning(std::size_t k) const { return spectators.at(k).omega31() - cavity.omega; }

  // Throws ConfigError on nonpositive frequencies/couplings, negative rates or
  // a nonpositive cavity detuning.
  void validate() const;
};

BasisPtr make_basis(const DeviceModel& model);

struct Transition {
  int lower = 0;
  int upper = 0;
  bool operator==(const Transition&) const = default;
};

struct PulseSpec {
  int site = 0;
  Transition transition;
  double rabi = 0.0;
  double carrier = 0.0;
  double phase = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
};

// Throws ConfigError unless the pulse drives (1,2) or (0,1) on qubit 1, or
// (2,3) on a spectator, with rabi >= 0 and a nonempty window.
void validate_pulse(const PulseSpec& pulse, const CompositeBasis& basis);

// value(t) = amplitude * exp(-i frequency t), unless `custom` is set.
struct Coefficient {
  cplx amplitude{1.0, 0.0};
  double frequency = 0.0;
  std::function<cplx(double)> custom;

  cplx operator()(double t) const;
  bool monochromatic() const { return !custom; }
};

struct HamiltonianTerm {
  SparseOperator op;
  Coefficient coeff;
  // Adds conj(c(t)) * op^dagger as well. Terms without it must be Hermitian
  // with a real coefficient.
  bool add_conjugate = true;
};

class TimeDependentHamiltonian {
 public:
  explicit TimeDependentHamiltonian(BasisPtr basis);

  void add(SparseOperator op, Coefficient coeff, bool add_conjugate = true);
  void append(const TimeDependentHamiltonian& other);

  const BasisPtr& basis_ptr() const { return basis_; }
  std::size_t dim() const { return basis_->dim(); }
  const std::vector<HamiltonianTerm>& terms() const { return terms_; }

  SparseOperator at(double t) const;
  Eigen::VectorXcd apply(double t, const Eigen::VectorXcd& v) const;

  bool monochromatic() const;
  // Largest |frequency| over monochromatic terms.
  double max_frequency() const;

 private:
  BasisPtr basis_;
  std::vector<HamiltonianTerm> terms_;
  std::vector<SparseOperator> adjoints_;
};

// Raman-coupling quantities for one spectator, derived from the device and
// its (2,3) pulse.
struct RamanParameters {
  double g = 0.0;
  double rabi = 0.0;
  double phase = 0.0;
  double pulse_detuning = 0.0;   // Delta_j = omega32 - carrier
  double cavity_detuning = 0.0;  // Delta_c,j = omega31 - omega_c

  double delta() const { return cavity_detuning - pulse_detuning; }
  double chi() const { return 0.5 * rabi * g * (1.0 / pulse_detuning + 1.0 / cavity_detuning); }
  double cavity_stark() const { return g * g / cavity_detuning; }
  double pulse_stark() const { return rabi * rabi / pulse_detuning; }
  double lambda() const { return cavity_stark() + chi() * chi() / delta(); }
};

// One entry per spectator, in spectator order. Requires exactly one (2,3)
// pulse per spectator and positive detunings.
std::vector<RamanParameters> raman_parameters(const DeviceModel& model, const std::vector<PulseSpec>& pulses,
                                              const CompositeBasis& basis);

// Omega (e^{i phi} |lo><hi| + h.c.) on `site`.
SparseOperator h_pulse_resonant(double rabi, double phase, Transition transition, int site, const CompositeBasis& basis);

// g (a^dagger |1><2| + h.c.) on qubit 1.
SparseOperator h_jc_resonant(double g, const CompositeBasis& basis);

struct RamanOptions {
  bool include_first_qubit_jc = false;
  // Off leaves only the spectator cavity couplings (pulses switched off).
  bool include_pulses = true;
};

// Cavity and pulse couplings of every spectator with their oscillating
// phases e^{-i Delta_c,j t} and e^{-i Delta_j t}.
TimeDependentHamiltonian h_raman_full(const DeviceModel& model, const std::vector<PulseSpec>& pulses,
                                      const CompositeBasis& basis, RamanOptions options = {});

// Diagonal generator D such that psi_static(t) = exp(i D t) psi(t).
struct FrameShift {
  Eigen::VectorXd generator;

  StateVector to_static(const StateVector& psi, double t) const;
  StateVector from_static(const StateVector& psi_static, double t) const;
};

struct StaticFrame {
  SparseOperator hamiltonian;
  FrameShift frame;
};

// Frame with -Delta_c,j on |3>_j and -delta_j on |2>_j, zero elsewhere. Every
// Hamiltonian this library builds for the protocol is static in it.
FrameShift raman_frame(const DeviceModel& model, const std::vector<PulseSpec>& pulses, const CompositeBasis& basis);

// Exact rewrite of a monochromatic Hamiltonian as a static one in a rotating
// frame. Throws ConfigError if some coefficient is not monochromatic or the
// frequencies admit no consistent diagonal frame.
StaticFrame rotating_frame_static(const TimeDependentHamiltonian& h);

// Static form of `h` in an already chosen frame. Throws ConfigError if a term
// is inconsistent with that frame.
SparseOperator static_in_frame(const TimeDependentHamiltonian& h, const FrameShift& frame);

// Level |3> eliminated: Stark shifts plus the e^{-i delta_j t} flip-flop.
TimeDependentHamiltonian h_eff_raman(const DeviceModel& model, const std::vector<PulseSpec>& pulses,
                                     const CompositeBasis& basis);

// -sum_j lambda_j a^dagger a |1><1|_j. Requires delta_j equal within 1e-9 g.
SparseOperator h_eff_reduced(const DeviceModel& model, const std::vector<PulseSpec>& pulses,
                             const CompositeBasis& basis);

// Dispersive form: photon-number dependent Stark shifts plus the
// cavity-mediated flip-flop chi_j chi_k / delta between spectators.
SparseOperator h_eff_dispersive(const DeviceModel& model, const std::vector<PulseSpec>& pulses,
                                const CompositeBasis& basis);

}  // namespace ghzcav
