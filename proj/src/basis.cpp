#include "ghzcav/basis.hpp"

#include <cmath>
#include <string>

#include "ghzcav/error.hpp"

namespace ghzcav {

CompositeBasis::CompositeBasis(int n_qubits, int n_max) : n_qubits_(n_qubits), n_max_(n_max) {
  local_dims_.push_back(kFirstQubitLevels);
  for (int q = 1; q < n_qubits; ++q) local_dims_.push_back(kSpectatorLevels);
  local_dims_.push_back(n_max + 1);

  strides_.assign(local_dims_.size(), 1);
  for (std::size_t s = local_dims_.size() - 1; s-- > 0;) {
    strides_[s] = strides_[s + 1] * static_cast<std::size_t>(local_dims_[s + 1]);
  }
  dim_ = strides_[0] * static_cast<std::size_t>(local_dims_[0]);
}

BasisPtr CompositeBasis::make(int n_qubits, int n_max) {
  if (n_qubits < 2) throw ConfigError("basis needs at least 2 qubits, got " + std::to_string(n_qubits));
  if (n_max < 1) throw ConfigError("cavity truncation n_max must be >= 1, got " + std::to_string(n_max));
  if (n_qubits > 12) throw ConfigError("basis with " + std::to_string(n_qubits) + " qubits is too large");
  return BasisPtr(new CompositeBasis(n_qubits, n_max));
}

int CompositeBasis::local_dim(int site) const {
  if (site < 0 || site >= n_sites()) throw ConfigError("site index " + std::to_string(site) + " out of range");
  return local_dims_[static_cast<std::size_t>(site)];
}

std::vector<int> CompositeBasis::unflatten(std::size_t index) const {
  if (index >= dim_) throw ConfigError("basis index " + std::to_string(index) + " out of range");
  std::vector<int> levels(local_dims_.size());
  for (std::size_t s = 0; s < local_dims_.size(); ++s) {
    levels[s] = static_cast<int>((index / strides_[s]) % static_cast<std::size_t>(local_dims_[s]));
  }
  return levels;
}

std::size_t CompositeBasis::flatten(std::span<const int> levels) const {
  if (levels.size() != local_dims_.size()) throw ConfigError("multi-index has wrong number of sites");
  std::size_t index = 0;
  for (std::size_t s = 0; s < levels.size(); ++s) {
    if (levels[s] < 0 || levels[s] >= local_dims_[s]) {
      throw ConfigError("level " + std::to_string(levels[s]) + " out of range on site " + std::to_string(s));
    }
    index += static_cast<std::size_t>(levels[s]) * strides_[s];
  }
  return index;
}

StateVector::StateVector(BasisPtr basis)
    : basis_(std::move(basis)), amps_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis_->dim()))) {}

StateVector::StateVector(BasisPtr basis, Eigen::VectorXcd amplitudes)
    : basis_(std::move(basis)), amps_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amps_.size()) != basis_->dim()) {
    throw ConfigError("amplitude count " + std::to_string(amps_.size()) + " does not match basis dimension " +
                      std::to_string(basis_->dim()));
  }
}

void require_same_basis(const CompositeBasis& a, const CompositeBasis& b) {
  if (!(a == b)) {
    throw ConfigError("basis mismatch: (n=" + std::to_string(a.n_qubits()) + ", n_max=" + std::to_string(a.n_max()) +
                      ") vs (n=" + std::to_string(b.n_qubits()) + ", n_max=" + std::to_string(b.n_max()) + ")");
  }
}

StateVector initial_product_state(const BasisPtr& basis) {
  StateVector psi(basis);
  const int n = basis->n_qubits();
  const double amp = std::pow(2.0, -0.5 * n);
  std::vector<int> levels(static_cast<std::size_t>(basis->n_sites()), 0);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    for (int q = 0; q < n; ++q) levels[static_cast<std::size_t>(q)] = static_cast<int>((mask >> q) & 1u);
    psi[basis->flatten(levels)] = amp;
  }
  return psi;
}

StateVector basis_state(const BasisPtr& basis, std::span<const int> levels) {
  StateVector psi(basis);
  psi[basis->flatten(levels)] = 1.0;
  return psi;
}

double population(const StateVector& psi, int site, int level) {
  const auto& b = psi.basis();
  if (level < 0 || level >= b.local_dim(site)) {
    throw ConfigError("level " + std::to_string(level) + " out of range on site " + std::to_string(site));
  }
  double p = 0.0;
  for (std::size_t i = 0; i < b.dim(); ++i) {
    if (b.level(i, site) == level) p += std::norm(psi[i]);
  }
  return p;
}

cplx overlap(const StateVector& psi, const StateVector& phi) {
  require_same_basis(psi.basis(), phi.basis());
  return phi.amplitudes().dot(psi.amplitudes());
}

}  // namespace ghzcav
