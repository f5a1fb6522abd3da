#include "ghzcav/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ghzcav/error.hpp"
#include "ghzcav/metrics.hpp"

namespace ghzcav {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Diagonal of sum_k rate_k L_k^dagger L_k. Throws if some op^dagger op is
// not diagonal.
Eigen::VectorXd decay_generator(const std::vector<NoiseChannel>& channels, std::size_t dim) {
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (const auto& c : channels) {
    if (c.rate == 0.0) continue;
    const SparseOperator::Matrix m = c.op.adjoint().matrix() * c.op.matrix();
    for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
      for (SparseOperator::Matrix::InnerIterator it(m, r); it; ++it) {
        if (it.row() != it.col()) {
          if (it.value() != cplx(0.0)) throw ConfigError("channel " + c.label + " has a nondiagonal L^dagger L");
          continue;
        }
        gamma[it.row()] += c.rate * it.value().real();
      }
    }
  }
  return gamma;
}

void apply_decay(Eigen::VectorXcd& v, const Eigen::VectorXd& gamma, double dt) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (gamma[i] != 0.0) v[i] *= std::exp(-0.5 * gamma[i] * dt);
  }
}

void check_rates(const std::vector<NoiseChannel>& channels, std::size_t dim) {
  for (const auto& c : channels) {
    if (!(c.rate >= 0.0)) throw ConfigError("channel " + c.label + " has a negative rate");
    if (c.op.dim() != dim) throw ConfigError("channel " + c.label + " has the wrong dimension");
  }
}

}  // namespace

std::vector<NoiseChannel> noise_channels(const DeviceModel& model, const CompositeBasis& basis) {
  if (basis.n_qubits() != model.n_qubits()) throw ConfigError("device model and basis disagree on qubit count");
  std::vector<NoiseChannel> out;
  const double half = std::sqrt(0.5);
  out.push_back({"qubit1_level2_relaxation", 1, embed(ket_bra(3, 1, 2), 0, basis), model.first.level2.relaxation});
  out.push_back({"qubit1_level2_dephasing", 1, half * embed(projector(3, 2), 0, basis), model.first.level2.dephasing});
  out.push_back({"qubit1_level1_relaxation", 1, embed(ket_bra(3, 0, 1), 0, basis), model.first.level1.relaxation});
  out.push_back({"qubit1_level1_dephasing", 1, half * embed(projector(3, 1), 0, basis), model.first.level1.dephasing});
  for (std::size_t k = 0; k < model.spectators.size(); ++k) {
    const int site = static_cast<int>(k) + 1;
    const int q = site + 1;
    const auto& s = model.spectators[k];
    const std::string name = "qubit" + std::to_string(q);
    out.push_back({name + "_level1_relaxation", q, embed(ket_bra(4, 0, 1), site, basis), s.level1.relaxation});
    out.push_back({name + "_level1_dephasing", q, half * embed(projector(4, 1), site, basis), s.level1.dephasing});
  }
  out.push_back({"cavity_decay", 0, embed(annihilation(basis.cavity_dim()), basis.cavity_site(), basis),
                 model.cavity.kappa()});
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double pairwise_sum(const double* data, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

TrajectoryResult run_trajectories(const ProtocolEvolver& evolver, const StateVector& psi0,
                                  const std::vector<NoiseChannel>& channels, const TrajectoryOptions& options) {
  if (options.n_traj < 1) throw ConfigError("n_traj must be >= 1");
  require_same_basis(psi0.basis(), *evolver.basis());
  const std::size_t dim = psi0.dim();
  check_rates(channels, dim);

  std::vector<const NoiseChannel*> active;
  double max_rate = 0.0;
  for (const auto& c : channels) {
    if (c.rate > 0.0) {
      active.push_back(&c);
      max_rate = std::max(max_rate, c.rate);
    }
  }
  const Schedule& schedule = evolver.schedule();
  TrajectoryResult result;
  result.n_traj = options.n_traj;

  if (active.empty()) {
    // Same stepping as the noiseless run, so the two agree bit for bit.
    const StateVector psi = run_protocol(evolver.model(), schedule, psi0, evolver.options()).final_state;
    result.deterministic = true;
    result.mean = fidelity_numeric(psi);
    result.fidelities.assign(static_cast<std::size_t>(options.n_traj), result.mean);
    return result;
  }

  const double resolution = 0.01 / max_rate;
  if (options.max_step < 0.0) throw ConfigError("noise max_step must be nonnegative");
  if (options.max_step > resolution * (1.0 + 1e-12)) {
    throw ConfigError("jump-time resolution " + std::to_string(options.max_step) + " is coarser than min(1/rate)/100 = " +
                      std::to_string(resolution));
  }
  const double dt_max = options.max_step > 0.0 ? options.max_step : resolution;
  result.step = dt_max;

  const Eigen::VectorXd gamma = decay_generator(channels, dim);
  const StateVector target = ideal_ghz(evolver.basis());
  std::vector<double> jumps(static_cast<std::size_t>(options.n_traj), 0.0);
  result.fidelities.resize(static_cast<std::size_t>(options.n_traj));
  std::vector<double> weights(active.size());

  for (int traj = 0; traj < options.n_traj; ++traj) {
    std::mt19937_64 rng(splitmix64(options.seed ^ splitmix64(static_cast<std::uint64_t>(traj))));
    double threshold = uniform01(rng);
    StateVector psi = psi0;
    int count = 0;
    for (std::size_t i = 0; i < schedule.segments.size(); ++i) {
      const double duration = schedule.segments[i].duration;
      const long steps = std::max(1L, static_cast<long>(std::ceil(duration / dt_max - 1e-9)));
      for (long k = 0; k < steps; ++k) {
        const double s0 = duration * static_cast<double>(k) / static_cast<double>(steps);
        const double s1 = k + 1 == steps ? duration : duration * static_cast<double>(k + 1) / static_cast<double>(steps);
        const double h = s1 - s0;
        apply_decay(psi.amplitudes(), gamma, 0.5 * h);
        psi = evolver.advance(i, psi, s0, s1);
        apply_decay(psi.amplitudes(), gamma, 0.5 * h);
        if (psi.norm_squared() > threshold) continue;

        double total = 0.0;
        std::vector<Eigen::VectorXcd> jumped(active.size());
        for (std::size_t c = 0; c < active.size(); ++c) {
          jumped[c] = active[c]->op.apply(psi.amplitudes());
          weights[c] = active[c]->rate * jumped[c].squaredNorm();
          total += weights[c];
        }
        if (total > 0.0) {
          const double pick = uniform01(rng) * total;
          std::size_t chosen = 0;
          double acc = weights[0];
          while (acc <= pick && chosen + 1 < active.size()) acc += weights[++chosen];
          psi.amplitudes() = jumped[chosen] / jumped[chosen].norm();
          ++count;
        } else {
          psi.amplitudes() /= psi.norm();
        }
        threshold = uniform01(rng);
      }
    }
    const double n2 = psi.norm_squared();
    result.fidelities[static_cast<std::size_t>(traj)] = n2 > 0.0 ? std::norm(overlap(psi, target)) / n2 : 0.0;
    jumps[static_cast<std::size_t>(traj)] = count;
  }

  const auto n = static_cast<std::size_t>(options.n_traj);
  result.mean = pairwise_sum(result.fidelities.data(), n) / static_cast<double>(n);
  result.mean_jumps = pairwise_sum(jumps.data(), n) / static_cast<double>(n);
  if (n > 1) {
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (result.fidelities[i] - result.mean) * (result.fidelities[i] - result.mean);
    const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
    result.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return result;
}

double lindblad_fidelity(const ProtocolEvolver& evolver, const StateVector& psi0,
                         const std::vector<NoiseChannel>& channels, double max_step) {
  const std::size_t dim = psi0.dim();
  if (dim > 512) throw ConfigError("density-matrix integration is limited to dimension 512");
  if (!(max_step > 0.0)) throw ConfigError("max_step must be positive");
  require_same_basis(psi0.basis(), *evolver.basis());
  check_rates(channels, dim);

  std::vector<std::pair<SparseOperator::Matrix, SparseOperator::Matrix>> ls;
  for (const auto& c : channels) {
    if (c.rate == 0.0) continue;
    SparseOperator::Matrix l = std::sqrt(c.rate) * c.op.matrix();
    SparseOperator::Matrix ld = SparseOperator::Matrix(l.adjoint());
    ls.emplace_back(std::move(l), std::move(ld));
  }
  const Eigen::VectorXd gamma = decay_generator(channels, dim);

  const FrameShift& frame = evolver.frame();
  Eigen::VectorXcd v0 = frame.to_static(psi0, 0.0).amplitudes();
  Eigen::MatrixXcd rho = v0 * v0.adjoint();

  const Schedule& schedule = evolver.schedule();
  for (std::size_t i = 0; i < schedule.segments.size(); ++i) {
    const SparseOperator::Matrix& h = evolver.segment_hamiltonian(i).matrix();
    // Effective non-Hermitian generator K = H - i/2 sum L^dagger L.
    SparseOperator::Matrix k = h;
    for (Eigen::Index r = 0; r < gamma.size(); ++r) {
      if (gamma[r] != 0.0) k.coeffRef(r, r) += cplx(0.0, -0.5 * gamma[r]);
    }
    const SparseOperator::Matrix kd = SparseOperator::Matrix(k.adjoint());
    auto rhs = [&](const Eigen::MatrixXcd& p) {
      Eigen::MatrixXcd out = cplx(0.0, -1.0) * (k * p);
      out += cplx(0.0, 1.0) * Eigen::MatrixXcd(p * kd);
      for (const auto& [l, ld] : ls) out += l * Eigen::MatrixXcd(p * ld);
      return out;
    };
    const double duration = schedule.segments[i].duration;
    const double scale = evolver.segment_hamiltonian(i).norm_inf() + gamma.maxCoeff();
    const double dt_target = std::min(max_step, scale > 0.0 ? 0.05 / scale : max_step);
    const long steps = std::max(1L, static_cast<long>(std::ceil(duration / dt_target)));
    const double dt = duration / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) {
      const Eigen::MatrixXcd k1 = rhs(rho);
      const Eigen::MatrixXcd k2 = rhs(rho + 0.5 * dt * k1);
      const Eigen::MatrixXcd k3 = rhs(rho + 0.5 * dt * k2);
      const Eigen::MatrixXcd k4 = rhs(rho + dt * k3);
      rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  // The target lives where the frame generator vanishes, so the overlap is
  // frame independent.
  const StateVector target = ideal_ghz(evolver.basis());
  return (target.amplitudes().adjoint() * rho * target.amplitudes()).value().real();
}

}  // namespace ghzcav
