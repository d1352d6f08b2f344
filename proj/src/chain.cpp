// SPDX-License-Identifier: Apache-2.0

#include "morprec/chain.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "morprec/errors.hpp"
#include "morprec/format.hpp"
#include "morprec/parallel.hpp"

namespace morprec {

UpdateFactor update_build(const SparseMatrix& a_prev, const SparseMatrix& a_new,
                          const SpaiConfig& cfg, UpdateDirection direction,
                          SweepPoint from, SweepPoint to) {
  if (a_prev.rows() != a_new.rows() || a_prev.cols() != a_new.cols())
    throw std::invalid_argument("update_build: shape mismatch");
  if (a_new.rows() != a_new.cols())
    throw std::invalid_argument("update_build: matrices must be square");
  const auto t0 = std::chrono::steady_clock::now();
  const index_t n = a_new.rows();

  struct ColumnOut {
    std::vector<index_t> rows;
    std::vector<double> values;
    double residual_sq = 0.0;
    bool fallback = false;
  };
  std::vector<ColumnOut> columns(static_cast<std::size_t>(n));

  parallel_for(0, n, cfg.threads, [&](index_t col) {
    const auto rhs_rows = a_prev.column_rows(col);
    const auto rhs_vals = a_prev.column_values(col);
    ColumnOut& slot = columns[static_cast<std::size_t>(col)];

    if (rhs_rows.empty()) {
      // Zero target column: the zero coefficient vector is exact.
      slot.rows = {col};
      slot.values = {0.0};
      return;
    }

    detail::AdaptiveOutcome got = detail::adaptive_column(a_new, col, rhs_rows, rhs_vals, cfg);
    if (got.rank_deficient) {
      // Identity fallback: q = e_col is always feasible and keeps the column
      // residual at the plain column change.
      slot.fallback = true;
      slot.rows = {col};
      slot.values = {1.0};
      double sq = 0.0;
      const auto new_rows = a_new.column_rows(col);
      const auto new_vals = a_new.column_values(col);
      std::size_t pa = 0, pb = 0;
      while (pa < rhs_rows.size() || pb < new_rows.size()) {
        if (pb >= new_rows.size() || (pa < rhs_rows.size() && rhs_rows[pa] < new_rows[pb])) {
          sq += rhs_vals[pa] * rhs_vals[pa];
          ++pa;
        } else if (pa >= rhs_rows.size() || new_rows[pb] < rhs_rows[pa]) {
          sq += new_vals[pb] * new_vals[pb];
          ++pb;
        } else {
          const double e = rhs_vals[pa] - new_vals[pb];
          sq += e * e;
          ++pa;
          ++pb;
        }
      }
      slot.residual_sq = sq;
      return;
    }
    slot.rows = std::move(got.pattern);
    slot.values.assign(got.coeffs.data(), got.coeffs.data() + got.coeffs.size());
    slot.residual_sq = got.residual * got.residual;
  });

  std::vector<Triplet> entries;
  double total_sq = 0.0;
  UpdateFactor factor;
  for (index_t col = 0; col < n; ++col) {
    const ColumnOut& slot = columns[static_cast<std::size_t>(col)];
    for (std::size_t k = 0; k < slot.rows.size(); ++k)
      entries.push_back({slot.rows[k], col, slot.values[k]});
    total_sq += slot.residual_sq;
    if (slot.fallback) ++factor.fallback_count;
  }
  factor.q = SparseMatrix::from_triplets(n, n, entries);
  factor.direction = direction;
  factor.from = from;
  factor.to = to;
  factor.min_residual = std::sqrt(total_sq);
  factor.matrix_change = frobenius_distance(a_prev, a_new);
  factor.build_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return factor;
}

PrecondChain::PrecondChain(SparseMatrix base, double base_build_seconds)
    : base_(std::move(base)), total_build_seconds_(base_build_seconds) {
  if (base_.rows() != base_.cols())
    throw std::invalid_argument("chain: base must be square");
}

PrecondChain PrecondChain::extended(std::shared_ptr<const UpdateFactor> factor) const {
  if (empty()) throw std::logic_error("chain: cannot extend an empty chain");
  if (!factor) throw std::invalid_argument("chain: null update factor");
  if (factor->q.rows() != dim() || factor->q.cols() != dim())
    throw std::invalid_argument("chain: factor dimension mismatch");
  PrecondChain next = *this;  // shares base and existing factors
  next.updates_.push_back(std::move(factor));
  next.total_build_seconds_ += next.updates_.back()->build_seconds;
  return next;
}

void PrecondChain::apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  if (empty()) throw std::logic_error("chain: apply on an empty chain");
  base_.multiply(in, out);
  if (updates_.empty()) return;
  Eigen::VectorXd tmp;
  for (const auto& f : updates_) {
    f->q.multiply(out, tmp);
    out.swap(tmp);
  }
}

Eigen::VectorXd PrecondChain::apply(const Eigen::VectorXd& in) const {
  Eigen::VectorXd out;
  apply(in, out);
  return out;
}

LinearOp PrecondChain::as_operator() const {
  return [chain = *this](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    chain.apply(in, out);
  };
}

double standard_residual(const SparseMatrix& a, const PrecondChain& p) {
  if (a.rows() != a.cols() || a.rows() != p.dim())
    throw std::invalid_argument("standard_residual: dimension mismatch");
  const index_t n = a.rows();
  if (n == 0) return 0.0;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd pe(n), ape(n);
  double sq = 0.0;
  for (index_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    p.apply(e, pe);
    a.multiply(pe, ape);
    ape[j] -= 1.0;
    sq += ape.squaredNorm();
    e[j] = 0.0;
  }
  return std::sqrt(sq) / std::sqrt(static_cast<double>(n));
}

LinearOp closed_form_update_qb(const LinearOp& a_prev_inv_d, index_t dim,
                               double sigma_prev, double sigma_new) {
  constexpr index_t MAX_DIM = 2048;
  if (dim <= 0 || dim > MAX_DIM)
    throw std::invalid_argument("closed_form_update_qb: validation-scale dimensions only");

  const double delta = sigma_new - sigma_prev;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd probe = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd image(dim);
  for (index_t j = 0; j < dim; ++j) {
    probe[j] = 1.0;
    a_prev_inv_d(probe, image);
    m.col(j) += delta * image;
    probe[j] = 0.0;
  }

  auto lu = std::make_shared<Eigen::FullPivLU<Eigen::MatrixXd>>(m);
  if (!lu->isInvertible())
    throw SolverError("closed_form_update_qb: shifted operator is singular (sigma_prev=" +
                      shortest(sigma_prev) + ", sigma_new=" + shortest(sigma_new) + ")");
  return [lu](const Eigen::VectorXd& in, Eigen::VectorXd& out) { out = lu->solve(in); };
}

}  // namespace morprec
