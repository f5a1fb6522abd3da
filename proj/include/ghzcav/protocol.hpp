#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ghzcav/basis.hpp"
#include "ghzcav/calibrate.hpp"
#include "ghzcav/evolve.hpp"
#include "ghzcav/hamiltonians.hpp"
#include "ghzcav/schedule.hpp"

namespace ghzcav {

// closed-form: exact two-level rotations, JC swaps and Stark phases.
// effective:   closed-form steps 1 and 3, reduced Hamiltonian for step 2.
// full:        all couplings, static in the Raman rotating frame.
enum class Mode { ClosedForm, Effective, Full };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

// Seven segments 1a,1b,1c,2,3c,3b,3a with square pulses. Step 3 mirrors
// step 1 with the phases flipped to +pi/2. Throws ConfigError on nonpositive
// rates or a calibration that does not fit the model.
Schedule build_ghz_schedule(const DeviceModel& model, const CalibrationResult& calib, double rabi_r,
                            double rabi_r_tilde);

struct ProtocolOptions {
  Mode mode = Mode::ClosedForm;
  PropagatorConfig propagator;
  // Full mode only. Qubit 1's cavity coupling during step 2, and the
  // spectator cavity couplings during steps 1 and 3.
  bool first_qubit_jc_in_step2 = true;
  bool spectator_cavity_in_steps13 = true;
  // Full mode only. Keeps qubit 1's cavity coupling on while a qubit-1 pulse
  // is on. Off by default: pulse segments are then the ideal rotations and
  // the cavity acts only in the wait segments and step 2.
  bool jc_during_pulses = false;
  // Trace points per segment, taken at equal fractions of its duration.
  int samples_per_segment = 8;
  // Stop after this segment instead of running the whole schedule.
  std::optional<SegmentLabel> stop_after;

  void validate() const;
};

struct Snapshot {
  SegmentLabel segment;
  double time = 0.0;
  double norm = 0.0;
  // populations[site][level], cavity last (index = photon number).
  std::vector<std::vector<double>> populations;
  double ghz_fidelity = 0.0;
};

struct SegmentRecord {
  SegmentLabel label;
  double norm_drift = 0.0;  // | |psi_end| - |psi_start| |
  int substeps = 0;
  double error_estimate = 0.0;
};

struct ProtocolResult {
  StateVector final_state;
  std::vector<StateVector> segment_states;  // state at the end of each segment run
  std::vector<SegmentRecord> segments;
  std::vector<Snapshot> trace;
};

// Segment-wise propagation for a given mode. States are always in the
// interaction picture of the device Hamiltonian; the rotating frame used by
// full mode is internal.
class ProtocolEvolver {
 public:
  ProtocolEvolver(const DeviceModel& model, const Schedule& schedule, const ProtocolOptions& options);

  const BasisPtr& basis() const { return basis_; }
  const DeviceModel& model() const { return model_; }
  const Schedule& schedule() const { return schedule_; }
  const ProtocolOptions& options() const { return options_; }
  Mode mode() const { return options_.mode; }

  // Advances psi inside segment `index` from elapsed time s0 to s1.
  StateVector advance(std::size_t index, const StateVector& psi, double s0, double s1,
                      PropagationStats* stats = nullptr) const;

  // Static generator of segment `index` in the frame returned by frame().
  // In closed-form mode this is the ideal Hamiltonian whose exponential is
  // the closed-form map.
  const SparseOperator& segment_hamiltonian(std::size_t index) const { return static_[index]; }
  const FrameShift& frame() const { return frame_; }

 private:
  StateVector advance_closed_form(std::size_t index, const StateVector& psi, double dt) const;

  DeviceModel model_;
  Schedule schedule_;
  ProtocolOptions options_;
  BasisPtr basis_;
  FrameShift frame_;
  std::vector<SparseOperator> static_;
  std::vector<TimeDependentHamiltonian> timedep_;
};

ProtocolResult run_protocol(const DeviceModel& model, const Schedule& schedule, const StateVector& psi0,
                            const ProtocolOptions& options);

// (|0>|+...+> - |1>|-...->)/sqrt(2) on the qubits, cavity in vacuum.
StateVector ideal_ghz(const BasisPtr& basis);

enum class Step { One, Three };

// Exact step map on qubit 1 (x) cavity, index level * (n_max + 1) + photons.
LocalOperator closed_form_step_map(Step step, int n_max = 2);

// Populations of every site and level, cavity last.
std::vector<std::vector<double>> site_populations(const StateVector& psi);

}  // namespace ghzcav
