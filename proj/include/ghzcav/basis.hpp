#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ghzcav {

using cplx = std::complex<double>;

class CompositeBasis;
using BasisPtr = std::shared_ptr<const CompositeBasis>;

// Tensor-product index space: qubit 1 (3 levels), qubits 2..n (4 levels
// each), then a cavity mode truncated at n_max photons.
//
// Sites are 0-based: site 0 is qubit 1, site k (1 <= k < n) is qubit k+1 and
// site n is the cavity. The cavity index varies fastest, site 0 slowest.
class CompositeBasis {
 public:
  static constexpr int kFirstQubitLevels = 3;
  static constexpr int kSpectatorLevels = 4;

  // Throws ConfigError unless n_qubits >= 2 and n_max >= 1.
  static BasisPtr make(int n_qubits, int n_max);

  int n_qubits() const noexcept { return n_qubits_; }
  int n_max() const noexcept { return n_max_; }
  int cavity_dim() const noexcept { return n_max_ + 1; }
  int cavity_site() const noexcept { return n_qubits_; }
  int n_sites() const noexcept { return n_qubits_ + 1; }
  std::size_t dim() const noexcept { return dim_; }

  int local_dim(int site) const;
  std::size_t stride(int site) const { return strides_.at(static_cast<std::size_t>(site)); }

  // Local level of `site` in basis state `index`.
  int level(std::size_t index, int site) const {
    const auto s = static_cast<std::size_t>(site);
    return static_cast<int>((index / strides_[s]) % static_cast<std::size_t>(local_dims_[s]));
  }
  int photons(std::size_t index) const { return static_cast<int>(index % static_cast<std::size_t>(cavity_dim())); }

  std::vector<int> unflatten(std::size_t index) const;
  std::size_t flatten(std::span<const int> levels) const;

  bool operator==(const CompositeBasis& other) const noexcept {
    return n_qubits_ == other.n_qubits_ && n_max_ == other.n_max_;
  }

 private:
  CompositeBasis(int n_qubits, int n_max);

  int n_qubits_;
  int n_max_;
  std::size_t dim_;
  std::vector<int> local_dims_;
  std::vector<std::size_t> strides_;
};

// Complex amplitudes over a CompositeBasis. The norm is never silently
// renormalized; integrators report drift instead.
class StateVector {
 public:
  explicit StateVector(BasisPtr basis);
  StateVector(BasisPtr basis, Eigen::VectorXcd amplitudes);

  const CompositeBasis& basis() const noexcept { return *basis_; }
  const BasisPtr& basis_ptr() const noexcept { return basis_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(amps_.size()); }

  Eigen::VectorXcd& amplitudes() noexcept { return amps_; }
  const Eigen::VectorXcd& amplitudes() const noexcept { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }
  cplx& operator[](std::size_t i) { return amps_[static_cast<Eigen::Index>(i)]; }

  double norm_squared() const { return amps_.squaredNorm(); }
  double norm() const { return amps_.norm(); }

 private:
  BasisPtr basis_;
  Eigen::VectorXcd amps_;
};

// Throws ConfigError if the two handles describe different spaces.
void require_same_basis(const CompositeBasis& a, const CompositeBasis& b);

// Product of (|0>+|1>)/sqrt(2) on every qubit, cavity in vacuum.
StateVector initial_product_state(const BasisPtr& basis);

// Single basis ket; `levels` has one entry per site, cavity last.
StateVector basis_state(const BasisPtr& basis, std::span<const int> levels);

// Probability that `site` is found in `level`.
double population(const StateVector& psi, int site, int level);

// <phi|psi>.
cplx overlap(const StateVector& psi, const StateVector& phi);

}  // namespace ghzcav
