// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "morprec/sparse.hpp"

namespace morprec {

/// Implicit action of
///   -(Lambda (x) I_n)  -  (I_r (x) base)  -  sum_j (small_j^T (x) sparse_j)
/// on vec(X), X in R^{n x r} (column-major stacking). Lambda is a small dense
/// r x r matrix; on the common diagonalizable path it is block diagonal with
/// 1x1 real blocks and 2x2 rotation-scaled blocks for complex-conjugate pairs.
/// The operator is never materialized here; one application costs
/// O(r * nnz(base) + n * r^2 + sum_j (r^2 * n + r * nnz(sparse_j))).
class KroneckerOperator {
public:
  struct Coupler {
    Eigen::MatrixXd small;  // r x r
    SparseMatrix sparse;    // n x n
  };

  KroneckerOperator(Eigen::MatrixXd lambda, SparseMatrix base,
                    std::vector<Coupler> couplers = {});

  static KroneckerOperator from_diag_shifts(const Eigen::VectorXd& shifts,
                                            SparseMatrix base,
                                            std::vector<Coupler> couplers = {});

  index_t base_dim() const { return base_.rows(); }
  index_t reduced_dim() const { return lambda_.rows(); }
  index_t dim() const { return base_dim() * reduced_dim(); }

  const Eigen::MatrixXd& lambda() const { return lambda_; }
  const SparseMatrix& base() const { return base_; }
  const std::vector<Coupler>& couplers() const { return couplers_; }

  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& in) const;

private:
  Eigen::MatrixXd lambda_;
  SparseMatrix base_;
  std::vector<Coupler> couplers_;
};

/// Sparse materialization of the operator (for preconditioner construction at
/// desk scale). Throws ConfigError when the exact entry count would exceed
/// max_nnz; the caller should then fall back to an unpreconditioned solve.
SparseMatrix assemble_explicit(const KroneckerOperator& op, index_t max_nnz = 200000);

}  // namespace morprec
