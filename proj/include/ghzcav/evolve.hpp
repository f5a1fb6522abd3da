#pragma once

#include <string>

#include "ghzcav/basis.hpp"
#include "ghzcav/hamiltonians.hpp"
#include "ghzcav/operator.hpp"

namespace ghzcav {

enum class PropagatorMethod { StaticKrylov, StaticEigen, TimedepRk4 };

std::string to_string(PropagatorMethod m);
PropagatorMethod parse_propagator_method(const std::string& s);

struct PropagatorConfig {
  PropagatorMethod method = PropagatorMethod::StaticKrylov;
  int krylov_dim = 30;
  // Bound on the Krylov truncation error accumulated over one call.
  double tolerance = 1e-12;
  // RK4 step and the bound on its step-halving error estimate.
  double step = 0.005;
  double timedep_tolerance = 1e-8;
  int max_refinements = 4;
  std::size_t max_dense_dim = kMaxDenseDim;

  void validate() const;
};

struct PropagationStats {
  int substeps = 0;
  double error_estimate = 0.0;
};

// psi(t) = exp(-i H t) psi for Hermitian H and t >= 0. Uses the dense
// eigendecomposition when cfg.method is StaticEigen, Lanczos otherwise.
StateVector propagate_static(const SparseOperator& h, const StateVector& psi, double t, const PropagatorConfig& cfg,
                             PropagationStats* stats = nullptr);

// Fixed-step classical RK4 with `steps` equal steps, no verification.
StateVector rk4_fixed(const TimeDependentHamiltonian& h, const StateVector& psi, double t0, double t1, long steps);

struct TimedepResult {
  StateVector state;
  double error_estimate;  // Richardson estimate from step halving
  double step;            // step of the returned solution
  int refinements;
};

// RK4 from t0 to t1 verified by step halving. Refuses steps that do not
// resolve the fastest coefficient frequency (h <= 2 pi / (20 w_max)).
TimedepResult propagate_timedep(const TimeDependentHamiltonian& h, const StateVector& psi, double t0, double t1,
                                const PropagatorConfig& cfg);

}  // namespace ghzcav
