// SPDX-License-Identifier: Apache-2.0

#include "morprec/kron.hpp"

#include <stdexcept>
#include <string>

#include "morprec/errors.hpp"

namespace morprec {

KroneckerOperator::KroneckerOperator(Eigen::MatrixXd lambda, SparseMatrix base,
                                     std::vector<Coupler> couplers)
    : lambda_(std::move(lambda)), base_(std::move(base)), couplers_(std::move(couplers)) {
  if (lambda_.rows() != lambda_.cols())
    throw std::invalid_argument("kronecker: lambda must be square");
  if (base_.rows() != base_.cols())
    throw std::invalid_argument("kronecker: base must be square");
  for (const Coupler& c : couplers_) {
    if (c.small.rows() != lambda_.rows() || c.small.cols() != lambda_.cols())
      throw std::invalid_argument("kronecker: coupler small block must match lambda");
    if (c.sparse.rows() != base_.rows() || c.sparse.cols() != base_.cols())
      throw std::invalid_argument("kronecker: coupler sparse block must match base");
  }
}

KroneckerOperator KroneckerOperator::from_diag_shifts(const Eigen::VectorXd& shifts,
                                                      SparseMatrix base,
                                                      std::vector<Coupler> couplers) {
  Eigen::MatrixXd lambda = shifts.asDiagonal();
  return KroneckerOperator(std::move(lambda), std::move(base), std::move(couplers));
}

void KroneckerOperator::apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  const index_t n = base_dim();
  const index_t r = reduced_dim();
  if (in.size() != n * r)
    throw std::invalid_argument("kronecker apply: dimension mismatch");
  out.resize(n * r);

  const Eigen::Map<const Eigen::MatrixXd> x(in.data(), n, r);
  Eigen::Map<Eigen::MatrixXd> y(out.data(), n, r);

  // (Lambda (x) I_n) vec(X) = vec(X Lambda^T); (I_r (x) B) vec(X) = vec(B X);
  // (S^T (x) N) vec(X) = vec(N X S).
  y.noalias() = -(x * lambda_.transpose());

  Eigen::VectorXd tmp;
  for (index_t c = 0; c < r; ++c) {
    base_.multiply(x.col(c), tmp);
    y.col(c) -= tmp;
  }

  if (!couplers_.empty()) {
    Eigen::MatrixXd mixed(n, r);
    for (const Coupler& cp : couplers_) {
      mixed.noalias() = x * cp.small;  // X S, n x r
      for (index_t c = 0; c < r; ++c) {
        cp.sparse.multiply(mixed.col(c), tmp);
        y.col(c) -= tmp;
      }
    }
  }
}

Eigen::VectorXd KroneckerOperator::apply(const Eigen::VectorXd& in) const {
  Eigen::VectorXd out;
  apply(in, out);
  return out;
}

SparseMatrix assemble_explicit(const KroneckerOperator& op, index_t max_nnz) {
  const index_t n = op.base_dim();
  const index_t r = op.reduced_dim();

  index_t lambda_nnz = 0;
  for (index_t i = 0; i < r; ++i)
    for (index_t j = 0; j < r; ++j)
      if (op.lambda()(i, j) != 0.0) ++lambda_nnz;

  index_t estimate = lambda_nnz * n + r * op.base().nnz();
  for (const auto& cp : op.couplers()) {
    index_t small_nnz = 0;
    for (index_t i = 0; i < r; ++i)
      for (index_t j = 0; j < r; ++j)
        if (cp.small(i, j) != 0.0) ++small_nnz;
    estimate += small_nnz * cp.sparse.nnz();
  }
  if (estimate > max_nnz)
    throw ConfigError(
        "explicit operator assembly needs about " + std::to_string(estimate) +
        " entries, above the cap of " + std::to_string(max_nnz) +
        "; rerun with a fresh approximate inverse per sweep or without preconditioning");

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(estimate));

  // -(Lambda (x) I_n): block (bi, bj) is -lambda(bi, bj) * I_n.
  for (index_t bi = 0; bi < r; ++bi)
    for (index_t bj = 0; bj < r; ++bj) {
      const double v = op.lambda()(bi, bj);
      if (v == 0.0) continue;
      for (index_t t = 0; t < n; ++t)
        entries.push_back({bi * n + t, bj * n + t, -v});
    }

  // -(I_r (x) base): diagonal blocks.
  for (index_t b = 0; b < r; ++b)
    for (index_t i = 0; i < n; ++i) {
      const auto cols = op.base().row_cols(i);
      const auto vals = op.base().row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k)
        entries.push_back({b * n + i, b * n + cols[k], -vals[k]});
    }

  // -(S^T (x) N): block (bi, bj) is -S(bj, bi) * N.
  for (const auto& cp : op.couplers())
    for (index_t bi = 0; bi < r; ++bi)
      for (index_t bj = 0; bj < r; ++bj) {
        const double s = cp.small(bj, bi);
        if (s == 0.0) continue;
        for (index_t i = 0; i < n; ++i) {
          const auto cols = cp.sparse.row_cols(i);
          const auto vals = cp.sparse.row_values(i);
          for (std::size_t k = 0; k < cols.size(); ++k)
            entries.push_back({bi * n + i, bj * n + cols[k], -s * vals[k]});
        }
      }

  return SparseMatrix::from_triplets(n * r, n * r, entries);
}

}  // namespace morprec
