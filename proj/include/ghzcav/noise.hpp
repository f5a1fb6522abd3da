#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ghzcav/hamiltonians.hpp"
#include "ghzcav/operator.hpp"
#include "ghzcav/protocol.hpp"

namespace ghzcav {

// Lindblad channel L = sqrt(rate) * op. Dephasing channels use
// op = P / sqrt(2) on the dephasing level, i.e. L = sqrt(gamma/2) P.
struct NoiseChannel {
  std::string label;
  int qubit = 0;  // 1-based, 0 for the cavity
  SparseOperator op;
  double rate = 0.0;
};

// Every channel the device model names: qubit 1 |2> and |1> relaxation and
// dephasing, |1> relaxation and dephasing of each spectator, cavity decay.
// Zero-rate channels are included and ignored by the integrators.
std::vector<NoiseChannel> noise_channels(const DeviceModel& model, const CompositeBasis& basis);

// SplitMix64 step; used to derive per-trajectory seeds.
std::uint64_t splitmix64(std::uint64_t x);

struct TrajectoryOptions {
  int n_traj = 1000;
  std::uint64_t seed = 0;
  // Micro-step for jump decisions. Zero picks min(1/rate)/100; larger
  // values are refused.
  double max_step = 0.0;
};

struct TrajectoryResult {
  double mean = 0.0;
  double std_error = 0.0;
  int n_traj = 0;
  double mean_jumps = 0.0;
  double step = 0.0;           // micro-step used, 0 for the deterministic path
  bool deterministic = false;  // every rate was zero
  std::vector<double> fidelities;
};

// Jump/no-jump unraveling over the evolver's schedule. Fidelity of each
// trajectory is taken against the normalized final state. With all rates
// zero this runs the noiseless protocol once.
TrajectoryResult run_trajectories(const ProtocolEvolver& evolver, const StateVector& psi0,
                                  const std::vector<NoiseChannel>& channels, const TrajectoryOptions& options);

// Dense density-matrix integration of the same schedule (RK4, fixed step no
// larger than max_step). Refused above dimension 512.
double lindblad_fidelity(const ProtocolEvolver& evolver, const StateVector& psi0,
                         const std::vector<NoiseChannel>& channels, double max_step);

// Sum by recursive halving; the result does not depend on how the input was
// produced, only on its order.
double pairwise_sum(const double* data, std::size_t n);

}  // namespace ghzcav
