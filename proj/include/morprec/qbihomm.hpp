// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "morprec/chain.hpp"
#include "morprec/gmres.hpp"
#include "morprec/report.hpp"
#include "morprec/spai.hpp"
#include "morprec/sparse.hpp"

namespace morprec {

/// Single-input single-output quadratic-bilinear model
///   D x' = K x + H (x (x) x) + N x u + F u,  y = C^T x.
/// H couples the state with itself; its column index encodes the pair (b, c)
/// as b*n + c.
struct QbSystem {
  SparseMatrix d, k, n_op;  // n x n
  SparseMatrix h;           // n x n^2
  SparseMatrix f, c;        // n x 1

  static QbSystem create(SparseMatrix d, SparseMatrix k, SparseMatrix n_op, SparseMatrix h,
                         SparseMatrix f, SparseMatrix c);

  index_t dim() const { return d.rows(); }
};

struct QbConfig {
  std::vector<double> sigmas;  // interpolation points, distinct and nonzero
  int p_moments = 1;           // extra trial-side moment depth
  int q_moments = 1;           // test-side moment depth
  GmresConfig gmres{};
  SpaiConfig spai{};
  int max_chain_len = 16;
  index_t standard_residual_max_dim = 5000;
};

struct ReducedQb {
  Eigen::MatrixXd d, k, n_op;  // r x r
  Eigen::MatrixXd h;           // r x r^2
  Eigen::MatrixXd f, c;        // r x 1
  Eigen::MatrixXd basis;       // n x r, orthonormal columns

  index_t order() const { return d.rows(); }
};

/// Petrov-style moment collection: per point sigma_i the trial side solves
/// (sigma_i D - K) x = F once and then re-solves against D x_prev up to
/// p_moments + q_moments times (same matrix, same preconditioner); the test
/// side does the same on (2 sigma_i D - K)^T against C up to q_moments. The
/// union basis U orthonormalizes trial then test columns with rank-tolerance
/// deduplication, and all reduced matrices are U^T (.) U projections; the
/// quadratic coupling is compressed without forming U (x) U. With
/// PrecondMode::ReuseChain each side carries one horizontal update chain
/// across points; the test side chains over the transposed matrices
/// directly.
std::pair<ReducedQb, ReductionReport> qbihomm_reduce(const QbSystem& sys, const QbConfig& cfg,
                                                     PrecondMode mode);

/// U^T H (U (x) U) for sparse H (n x n^2) and dense U (n x r) without
/// materializing the n^2 x r^2 Kronecker factor: every sparse entry
/// H(a, b*n + c) contributes a rank-1 r x r update U.row(b)^T U.row(c) to a
/// per-row accumulator, which row a then scatters into the result through
/// U.row(a). Cost O(nnz(H) r^2 + rows(H) r^3).
Eigen::MatrixXd kron_compress_quadratic(const SparseMatrix& h, const Eigen::MatrixXd& u);

}  // namespace morprec
