#include "ghzcav/operator.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "ghzcav/error.hpp"

namespace ghzcav {

namespace {

using Triplet = Eigen::Triplet<cplx>;

SparseOperator::Matrix from_triplets(std::size_t dim, const std::vector<Triplet>& t) {
  SparseOperator::Matrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(t.begin(), t.end());
  m.prune(cplx(0.0));
  m.makeCompressed();
  return m;
}

}  // namespace

SparseOperator::SparseOperator(std::size_t dim)
    : m_(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)), hermitian_(true) {}

SparseOperator::SparseOperator(Matrix m, bool hermitian) : m_(std::move(m)), hermitian_(hermitian) {
  if (m_.rows() != m_.cols()) throw ConfigError("operator must be square");
  m_.makeCompressed();
}

SparseOperator SparseOperator::identity(std::size_t dim) {
  Matrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setIdentity();
  return SparseOperator(std::move(m), true);
}

SparseOperator SparseOperator::diagonal(const Eigen::VectorXd& diag) {
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (diag[i] != 0.0) t.emplace_back(i, i, cplx(diag[i], 0.0));
  }
  return SparseOperator(from_triplets(static_cast<std::size_t>(diag.size()), t), true);
}

Eigen::VectorXcd SparseOperator::apply(const Eigen::VectorXcd& v) const {
  if (static_cast<std::size_t>(v.size()) != dim()) throw ConfigError("operator/vector dimension mismatch");
  return m_ * v;
}

StateVector SparseOperator::apply(const StateVector& psi) const {
  return StateVector(psi.basis_ptr(), apply(psi.amplitudes()));
}

SparseOperator SparseOperator::adjoint() const {
  Matrix a = m_.adjoint();
  return SparseOperator(std::move(a), hermitian_);
}

Eigen::MatrixXcd SparseOperator::to_dense(std::size_t cap) const {
  if (dim() > cap) {
    throw ConfigError("dense materialization refused for dimension " + std::to_string(dim()) + " (cap " +
                      std::to_string(cap) + ")");
  }
  return Eigen::MatrixXcd(m_);
}

double SparseOperator::hermiticity_defect() const {
  const Matrix diff = m_ - Matrix(m_.adjoint());
  double worst = 0.0;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
    for (Matrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

double SparseOperator::norm_inf() const {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < m_.outerSize(); ++k) {
    double row = 0.0;
    for (Matrix::InnerIterator it(m_, k); it; ++it) row += std::abs(it.value());
    worst = std::max(worst, row);
  }
  return worst;
}

SparseOperator& SparseOperator::operator+=(const SparseOperator& other) {
  if (other.dim() != dim()) throw ConfigError("operator dimension mismatch in sum");
  m_ = m_ + other.m_;
  m_.prune(cplx(0.0));
  m_.makeCompressed();
  hermitian_ = hermitian_ && other.hermitian_;
  return *this;
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  if (a.dim() != b.dim()) throw ConfigError("operator dimension mismatch in product");
  SparseOperator::Matrix m = (a.m_ * b.m_).pruned();
  return SparseOperator(std::move(m), false);
}

SparseOperator operator*(cplx c, const SparseOperator& a) {
  SparseOperator::Matrix m = c * a.m_;
  return SparseOperator(std::move(m), a.hermitian_ && c.imag() == 0.0);
}

SparseOperator hermitian_closure(const SparseOperator& a, cplx c) {
  std::vector<Triplet> t;
  t.reserve(2 * a.nonzeros());
  const auto& m = a.matrix();
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (SparseOperator::Matrix::InnerIterator it(m, k); it; ++it) {
      const cplx v = c * it.value();
      t.emplace_back(it.row(), it.col(), v);
      t.emplace_back(it.col(), it.row(), std::conj(v));
    }
  }
  return SparseOperator(from_triplets(a.dim(), t), true);
}

SparseOperator embed_product(std::span<const SiteFactor> factors, const CompositeBasis& basis) {
  for (std::size_t f = 0; f < factors.size(); ++f) {
    const int d = basis.local_dim(factors[f].site);
    if (factors[f].op.rows() != d || factors[f].op.cols() != d) {
      throw ConfigError("local operator of size " + std::to_string(factors[f].op.rows()) + " does not match site " +
                        std::to_string(factors[f].site) + " dimension " + std::to_string(d));
    }
    for (std::size_t g = 0; g < f; ++g) {
      if (factors[g].site == factors[f].site) throw ConfigError("embed_product: repeated site");
    }
  }

  // For each column (input basis state) walk the Cartesian product of the
  // nonzero entries in the relevant local columns.
  std::vector<Triplet> t;
  const std::size_t dim = basis.dim();
  for (std::size_t col = 0; col < dim; ++col) {
    std::vector<std::pair<std::size_t, cplx>> partial{{col, cplx(1.0)}};
    for (const auto& f : factors) {
      const int in_level = basis.level(col, f.site);
      const std::size_t stride = basis.stride(f.site);
      std::vector<std::pair<std::size_t, cplx>> next;
      for (int out = 0; out < f.op.rows(); ++out) {
        const cplx v = f.op(out, in_level);
        if (v == cplx(0.0)) continue;
        for (const auto& [row, amp] : partial) {
          const std::size_t shifted = row - static_cast<std::size_t>(in_level) * stride + static_cast<std::size_t>(out) * stride;
          next.emplace_back(shifted, amp * v);
        }
      }
      partial = std::move(next);
      if (partial.empty()) break;
    }
    for (const auto& [row, amp] : partial) {
      t.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col), amp);
    }
  }
  bool herm = true;
  for (const auto& f : factors) herm = herm && (f.op - f.op.adjoint()).cwiseAbs().maxCoeff() == 0.0;
  return SparseOperator(from_triplets(dim, t), herm);
}

SparseOperator embed(const LocalOperator& op, int site, const CompositeBasis& basis) {
  const SiteFactor f{site, op};
  return embed_product(std::span<const SiteFactor>(&f, 1), basis);
}

LocalOperator ket_bra(int dim, int to, int from) {
  if (to < 0 || to >= dim || from < 0 || from >= dim) throw ConfigError("ket_bra level out of range");
  LocalOperator m = LocalOperator::Zero(dim, dim);
  m(to, from) = 1.0;
  return m;
}

LocalOperator projector(int dim, int level) { return ket_bra(dim, level, level); }

LocalOperator annihilation(int cavity_dim) {
  LocalOperator a = LocalOperator::Zero(cavity_dim, cavity_dim);
  for (int n = 1; n < cavity_dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

LocalOperator creation(int cavity_dim) { return annihilation(cavity_dim).adjoint(); }

LocalOperator number_operator(int cavity_dim) {
  LocalOperator n = LocalOperator::Zero(cavity_dim, cavity_dim);
  for (int k = 0; k < cavity_dim; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

}  // namespace ghzcav
