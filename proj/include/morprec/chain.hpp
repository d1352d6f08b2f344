// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "morprec/gmres.hpp"
#include "morprec/spai.hpp"
#include "morprec/sparse.hpp"

namespace morprec {

enum class UpdateDirection { Horizontal, Vertical };

/// How the reduction drivers obtain preconditioners for their solve
/// sequences: not at all, built from scratch for every matrix, or carried
/// along as a factor chain and only updated.
enum class PrecondMode { None, FreshSpai, ReuseChain };

/// (sweep, point) coordinates of a matrix in a solve sequence.
struct SweepPoint {
  int sweep = 0;
  int point = 0;
};

/// Cheap map between consecutive preconditioners: Q minimizes
/// ||A_prev - A_new Q||_F column by column over an adaptive sparsity pattern,
/// so A_new (Q P_prev) keeps acting like A_prev P_prev.
struct UpdateFactor {
  SparseMatrix q;
  UpdateDirection direction = UpdateDirection::Horizontal;
  SweepPoint from{}, to{};
  double min_residual = 0.0;    // ||A_prev - A_new Q||_F at the minimizer
  double matrix_change = 0.0;   // ||A_prev - A_new||_F; Q = I makes this an upper bound
  double build_seconds = 0.0;
  index_t fallback_count = 0;   // columns replaced by the identity fallback
};

/// Builds the update factor between two same-shaped matrices. Pattern and
/// augmentation rules match spai_build, with right-hand sides taken from the
/// columns of a_prev; each column's threshold scales with its rhs norm.
UpdateFactor update_build(const SparseMatrix& a_prev, const SparseMatrix& a_new,
                          const SpaiConfig& cfg = {},
                          UpdateDirection direction = UpdateDirection::Horizontal,
                          SweepPoint from = {}, SweepPoint to = {});

/// Preconditioner as a product of sparse factors, applied by sequential
/// matvecs: base first, then every update factor in append order. The product
/// is never multiplied out. Chains are immutable; extending returns a new
/// chain sharing the existing factors, so chains with a common prefix share
/// storage and produce identical results on the shared segment.
class PrecondChain {
public:
  PrecondChain() = default;
  explicit PrecondChain(SparseMatrix base, double base_build_seconds = 0.0);

  bool empty() const { return base_.rows() == 0; }
  index_t dim() const { return base_.rows(); }
  const SparseMatrix& base() const { return base_; }
  std::span<const std::shared_ptr<const UpdateFactor>> updates() const { return updates_; }
  int length() const { return static_cast<int>(updates_.size()); }
  double total_build_seconds() const { return total_build_seconds_; }

  [[nodiscard]] PrecondChain extended(std::shared_ptr<const UpdateFactor> factor) const;

  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& in) const;
  LinearOp as_operator() const;

private:
  SparseMatrix base_;
  std::vector<std::shared_ptr<const UpdateFactor>> updates_;
  double total_build_seconds_ = 0.0;
};

/// ||I - A P||_F / sqrt(n) for a chained preconditioner, probed column by
/// column. Cost is n applications of A and P; callers gate it by dimension.
double standard_residual(const SparseMatrix& a, const PrecondChain& p);

/// Validation-scale closed form of the update between two shift-scaled
/// matrices sigma*D - K: returns the action of
///   (I + (sigma_new - sigma_prev) * inv(A_prev) * D)^{-1}
/// given the action v -> inv(A_prev) * D * v. The inner matrix is
/// materialized by probing, so dim is capped; singular shifts throw.
LinearOp closed_form_update_qb(const LinearOp& a_prev_inv_d, index_t dim,
                               double sigma_prev, double sigma_new);

}  // namespace morprec
