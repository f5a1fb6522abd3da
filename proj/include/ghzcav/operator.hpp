#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ghzcav/basis.hpp"

namespace ghzcav {

// Small dense operator on a single site (3x3, 4x4 or cavity_dim^2).
using LocalOperator = Eigen::MatrixXcd;

// Largest dimension for which dense materialization is allowed.
inline constexpr std::size_t kMaxDenseDim = 2048;

class SparseOperator {
 public:
  using Matrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

  explicit SparseOperator(std::size_t dim = 0);
  explicit SparseOperator(Matrix m, bool hermitian = false);

  static SparseOperator identity(std::size_t dim);
  // Real diagonal operator; flagged Hermitian.
  static SparseOperator diagonal(const Eigen::VectorXd& diag);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }
  bool hermitian() const noexcept { return hermitian_; }
  std::size_t nonzeros() const { return static_cast<std::size_t>(m_.nonZeros()); }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  StateVector apply(const StateVector& psi) const;

  SparseOperator adjoint() const;
  Eigen::MatrixXcd to_dense(std::size_t cap = kMaxDenseDim) const;

  // max_ij |A_ij - conj(A_ji)|.
  double hermiticity_defect() const;
  // Max absolute row sum, an upper bound on the spectral norm.
  double norm_inf() const;

  SparseOperator& operator+=(const SparseOperator& other);
  friend SparseOperator operator+(SparseOperator a, const SparseOperator& b) { return a += b; }
  friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator*(cplx c, const SparseOperator& a);

 private:
  Matrix m_;
  bool hermitian_ = false;
};

// c*A + conj(c)*A^dagger, Hermitian by construction.
SparseOperator hermitian_closure(const SparseOperator& a, cplx c = 1.0);

struct SiteFactor {
  int site;
  LocalOperator op;
};

// Tensor product of the given single-site factors with identity on all other
// sites. Factors must be on distinct sites.
SparseOperator embed_product(std::span<const SiteFactor> factors, const CompositeBasis& basis);
SparseOperator embed(const LocalOperator& op, int site, const CompositeBasis& basis);

// Local building blocks.
LocalOperator ket_bra(int dim, int to, int from);  // |to><from|
LocalOperator projector(int dim, int level);
LocalOperator annihilation(int cavity_dim);
LocalOperator creation(int cavity_dim);
LocalOperator number_operator(int cavity_dim);

}  // namespace ghzcav
