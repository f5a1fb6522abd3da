#pragma once

#include <vector>

#include "ghzcav/basis.hpp"
#include "ghzcav/calibrate.hpp"
#include "ghzcav/protocol.hpp"

namespace ghzcav {

// |<GHZ (x) 0_c|psi>|^2, with the target from ideal_ghz. psi is not
// renormalized.
double fidelity_numeric(const StateVector& psi);

// 1/4 [1 + prod (1 + e^{-2i phi_j})/2] [1 + prod (1 + e^{2i phi_j})/2].
double fidelity_analytic(const std::vector<double>& phases);

// phi_j = g_j^2 (t_1b + t_1c) / Delta_c,j, accumulated once in step 1 and
// once in step 3.
std::vector<double> spectator_phases(const DeviceModel& model, const Schedule& schedule);

struct LeakageReport {
  double max_photon2 = 0.0;               // photon number >= 2
  std::vector<double> max_level3;         // per spectator
  std::vector<double> max_level2;         // per spectator
  std::vector<double> level0_drift;       // per spectator, max |P0(t) - P0(0)|
  double max_first_level2 = 0.0;          // qubit 1 in |2>, whole run
  double max_first_level2_outside = 0.0;  // qubit 1 in |2> outside 1a, 1b, 3b, 3a
};

LeakageReport leakage_report(const std::vector<Snapshot>& trace);

struct FidelityReport {
  double f_numeric = 0.0;
  double f_analytic = 0.0;
  std::vector<double> phases;
  double cavity_residual = 0.0;  // 1 - P(photon 0) at the end
  LeakageReport leakage;
  std::vector<double> norm_drift;  // per segment
};

FidelityReport fidelity_report(const ProtocolResult& result, const std::vector<double>& phases);

}  // namespace ghzcav

namespace ghzcav {

// Largest |U_full|in> - U_closed|in>| after step 1 over the inputs
// |0>_1|0>_c and |1>_1|0>_c with every spectator in |0>. Runs the full model
// with the given options (mode is ignored).
double step1_map_error(const DeviceModel& model, const Schedule& schedule, const ProtocolOptions& options);

// |psi_full - psi_eff| after step 2, both started from the closed-form state
// after step 1 of the protocol's initial state. Full model with the given
// options against the reduced effective Hamiltonian.
double step2_effective_error(const DeviceModel& model, const Schedule& schedule, const ProtocolOptions& options);

}  // namespace ghzcav
