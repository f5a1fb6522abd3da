#include "ghzcav/evolve.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ghzcav/error.hpp"

namespace ghzcav {

std::string to_string(PropagatorMethod m) {
  switch (m) {
    case PropagatorMethod::StaticKrylov: return "static-krylov";
    case PropagatorMethod::StaticEigen: return "static-eigen";
    case PropagatorMethod::TimedepRk4: return "timedep-rk4";
  }
  return "static-krylov";
}

PropagatorMethod parse_propagator_method(const std::string& s) {
  if (s == "static-krylov") return PropagatorMethod::StaticKrylov;
  if (s == "static-eigen") return PropagatorMethod::StaticEigen;
  if (s == "timedep-rk4") return PropagatorMethod::TimedepRk4;
  throw ConfigError("unknown propagator method '" + s + "'");
}

void PropagatorConfig::validate() const {
  if (krylov_dim < 2) throw ConfigError("krylov_dim must be >= 2");
  if (!(tolerance > 0.0) || !(timedep_tolerance > 0.0)) throw ConfigError("propagator tolerance must be positive");
  if (!(step > 0.0)) throw ConfigError("propagator step must be positive");
  if (max_refinements < 0) throw ConfigError("max_refinements must be nonnegative");
}

namespace {

StateVector propagate_eigen(const SparseOperator& h, const StateVector& psi, double t, const PropagatorConfig& cfg) {
  const Eigen::MatrixXcd dense = h.to_dense(cfg.max_dense_dim);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigendecomposition failed");
  Eigen::VectorXcd c = es.eigenvectors().adjoint() * psi.amplitudes();
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -es.eigenvalues()[k] * t);
  return StateVector(psi.basis_ptr(), es.eigenvectors() * c);
}

// Lanczos exponential action with a posteriori substep control. The
// tridiagonal projection is real symmetric, so exp(-i tau T) e1 comes from a
// small real eigendecomposition and the error estimate for any tau is cheap.
StateVector propagate_krylov(const SparseOperator& h, const StateVector& psi, double t, const PropagatorConfig& cfg,
                             PropagationStats* stats) {
  const Eigen::Index n = static_cast<Eigen::Index>(psi.dim());
  const int m_max = static_cast<int>(std::min<Eigen::Index>(cfg.krylov_dim, n));
  const auto& mat = h.matrix();
  const double scale = std::max(h.norm_inf(), 1e-300);

  Eigen::VectorXcd v = psi.amplitudes();
  double remaining = t;
  double tau_guess = t;
  double total_err = 0.0;
  int substeps = 0;

  Eigen::MatrixXcd basis(n, m_max + 1);
  std::vector<double> alpha(static_cast<std::size_t>(m_max));
  std::vector<double> beta(static_cast<std::size_t>(m_max));

  while (remaining > 0.0) {
    const double norm = v.norm();
    if (norm == 0.0) break;
    basis.col(0) = v / norm;
    int m = m_max;
    bool exact = false;
    for (int j = 0; j < m_max; ++j) {
      Eigen::VectorXcd w = mat * basis.col(j);
      const double a = basis.col(j).dot(w).real();
      w -= a * basis.col(j);
      if (j > 0) w -= beta[static_cast<std::size_t>(j - 1)] * basis.col(j - 1);
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) w -= basis.col(i) * basis.col(i).dot(w);
      }
      alpha[static_cast<std::size_t>(j)] = a;
      const double b = w.norm();
      beta[static_cast<std::size_t>(j)] = b;
      if (b <= 1e-13 * scale) {
        m = j + 1;
        exact = true;
        break;
      }
      basis.col(j + 1) = w / b;
    }
    if (m == n) exact = true;

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
      tri(j, j) = alpha[static_cast<std::size_t>(j)];
      if (j + 1 < m) tri(j, j + 1) = tri(j + 1, j) = beta[static_cast<std::size_t>(j)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    const Eigen::MatrixXd& q = es.eigenvectors();
    const Eigen::VectorXd& theta = es.eigenvalues();
    const Eigen::VectorXd first_row = q.row(0).transpose();

    auto small_exp = [&](double tau) {
      Eigen::VectorXcd c(m);
      for (int k = 0; k < m; ++k) c[k] = std::polar(first_row[k], -theta[k] * tau);
      return Eigen::VectorXcd(q.cast<cplx>() * c);
    };
    const double tail = exact ? 0.0 : beta[static_cast<std::size_t>(m - 1)];
    auto estimate = [&](const Eigen::VectorXcd& c) { return norm * tail * std::abs(c[m - 1]); };

    double tau = std::min(remaining, tau_guess);
    Eigen::VectorXcd c = small_exp(tau);
    bool shrunk = false;
    while (estimate(c) > cfg.tolerance * tau / t) {
      tau *= 0.5;
      shrunk = true;
      if (tau < 1e-14 * t) {
        throw NumericalError("Krylov propagation did not converge (residual " + std::to_string(estimate(c)) + ")");
      }
      c = small_exp(tau);
    }
    total_err += estimate(c);
    v = norm * (basis.leftCols(m) * c);
    remaining -= tau;
    if (remaining < 1e-15 * t) remaining = 0.0;
    tau_guess = shrunk ? tau : 2.0 * tau;
    ++substeps;
  }
  if (stats != nullptr) {
    stats->substeps = substeps;
    stats->error_estimate = total_err;
  }
  return StateVector(psi.basis_ptr(), std::move(v));
}

Eigen::VectorXcd rk4_step(const TimeDependentHamiltonian& h, double t, const Eigen::VectorXcd& y, double dt) {
  const cplx mi(0.0, -1.0);
  const Eigen::VectorXcd k1 = mi * h.apply(t, y);
  const Eigen::VectorXcd k2 = mi * h.apply(t + 0.5 * dt, y + 0.5 * dt * k1);
  const Eigen::VectorXcd k3 = mi * h.apply(t + 0.5 * dt, y + 0.5 * dt * k2);
  const Eigen::VectorXcd k4 = mi * h.apply(t + dt, y + dt * k3);
  return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

StateVector propagate_static(const SparseOperator& h, const StateVector& psi, double t, const PropagatorConfig& cfg,
                             PropagationStats* stats) {
  if (h.dim() != psi.dim()) throw ConfigError("Hamiltonian/state dimension mismatch");
  if (!(t >= 0.0)) throw ConfigError("propagation time must be nonnegative");
  cfg.validate();
  if (t == 0.0) {
    if (stats != nullptr) *stats = {};
    return psi;
  }
  if (cfg.method == PropagatorMethod::StaticEigen) {
    if (stats != nullptr) *stats = {1, 0.0};
    return propagate_eigen(h, psi, t, cfg);
  }
  return propagate_krylov(h, psi, t, cfg, stats);
}

StateVector rk4_fixed(const TimeDependentHamiltonian& h, const StateVector& psi, double t0, double t1, long steps) {
  if (steps < 1) throw ConfigError("rk4 needs at least one step");
  if (h.dim() != psi.dim()) throw ConfigError("Hamiltonian/state dimension mismatch");
  const double dt = (t1 - t0) / static_cast<double>(steps);
  Eigen::VectorXcd y = psi.amplitudes();
  for (long k = 0; k < steps; ++k) y = rk4_step(h, t0 + static_cast<double>(k) * dt, y, dt);
  return StateVector(psi.basis_ptr(), std::move(y));
}

TimedepResult propagate_timedep(const TimeDependentHamiltonian& h, const StateVector& psi, double t0, double t1,
                                const PropagatorConfig& cfg) {
  cfg.validate();
  if (!(t1 >= t0)) throw ConfigError("propagate_timedep needs t1 >= t0");
  if (t1 == t0) return {psi, 0.0, cfg.step, 0};
  const double w = h.max_frequency();
  if (w > 0.0) {
    const double h_max = 2.0 * std::numbers::pi / w / 20.0;
    if (cfg.step > h_max) {
      throw NumericalError("RK4 step " + std::to_string(cfg.step) + " does not resolve frequency " + std::to_string(w) +
                           " (need <= " + std::to_string(h_max) + ")");
    }
  }
  long steps = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / cfg.step - 1e-9)));
  StateVector coarse = rk4_fixed(h, psi, t0, t1, steps);
  StateVector fine = rk4_fixed(h, psi, t0, t1, 2 * steps);
  double est = (coarse.amplitudes() - fine.amplitudes()).norm() / 15.0;
  int refinements = 0;
  while (est > cfg.timedep_tolerance && refinements < cfg.max_refinements) {
    steps *= 2;
    coarse = std::move(fine);
    fine = rk4_fixed(h, psi, t0, t1, 2 * steps);
    est = (coarse.amplitudes() - fine.amplitudes()).norm() / 15.0;
    ++refinements;
  }
  if (est > cfg.timedep_tolerance) {
    throw NumericalError("RK4 error estimate " + std::to_string(est) + " above tolerance after " +
                         std::to_string(refinements) + " refinements");
  }
  return {std::move(fine), est, (t1 - t0) / static_cast<double>(2 * steps), refinements};
}

}  // namespace ghzcav
