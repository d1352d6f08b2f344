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

/// Second-order model M x'' + D x' + K x = F u, y = C^T x. The damping is
/// expected to be proportional (D = alpha M + beta K) for the reduction to
/// match moments of the second-order transfer function; ingested matrices
/// are trusted, with a warning when the stored alpha/beta disagree with D.
struct SecondOrderSystem {
  SparseMatrix m, d, k;  // n x n
  SparseMatrix f;        // n x n_in
  SparseMatrix c;        // n x n_out
  double alpha = 0.0;
  double beta = 0.0;

  static SecondOrderSystem create(SparseMatrix m, SparseMatrix d, SparseMatrix k,
                                  SparseMatrix f, SparseMatrix c, double alpha = 0.0,
                                  double beta = 0.0);
  /// D is formed as alpha M + beta K exactly.
  static SecondOrderSystem with_proportional_damping(SparseMatrix m, SparseMatrix k,
                                                     SparseMatrix f, SparseMatrix c,
                                                     double alpha, double beta);

  index_t dim() const { return m.rows(); }
  index_t inputs() const { return f.cols(); }
  index_t outputs() const { return c.cols(); }

  /// ||D - alpha M - beta K||_F, the proportionality defect.
  double proportional_defect() const;
};

/// A(s) = s^2 M + s D + K with merged sparsity.
SparseMatrix shifted_operator(const SecondOrderSystem& sys, double s);

struct AirgaConfig {
  std::vector<double> expansion_points;  // rad/s, positive and distinct
  int r_max = 20;
  double outer_tol = 1e-4;  // relative H2 gap between consecutive sweeps
  double inner_tol = 1e-6;  // relative H2 gap between consecutive inner models
  int max_outer = 20;
  GmresConfig gmres{};
  SpaiConfig spai{};
  int max_chain_len = 16;  // fresh rebuild once a chain would grow past this
  index_t standard_residual_max_dim = 5000;
  /// Also build the anchored variant (every update measured against the
  /// first matrix of the sweep) and record its minimum; costs one extra
  /// factor build per update.
  bool compare_first_approach = false;
};

struct ReducedSecondOrder {
  Eigen::MatrixXd m, d, k;  // r x r
  Eigen::MatrixXd f;        // r x n_in
  Eigen::MatrixXd c;        // r x n_out
  Eigen::MatrixXd basis;    // n x r, orthonormal columns

  index_t order() const { return m.rows(); }
};

/// Moment-matching reduction over adaptively refreshed expansion points.
/// Per sweep, per point: the zeroth moment block solves A(s_i) X = F, higher
/// moment blocks solve A(s_i) X = M X_prev with the same matrix (and the
/// same preconditioner); blocks are merged into one growing orthonormal
/// basis. Sweeps stop when consecutive reduced models are H2-close. With
/// PrecondMode::ReuseChain the preconditioner is built once at the first
/// (sweep, point) and afterwards only extended: across points within a sweep
/// and across sweeps at the first point.
std::pair<ReducedSecondOrder, ReductionReport> airga_reduce(const SecondOrderSystem& sys,
                                                            const AirgaConfig& cfg,
                                                            PrecondMode mode);

/// Next sweep's expansion points: eigenvalues of the reduced quadratic
/// pencil lambda^2 M + lambda D + K closest to the imaginary axis, mapped to
/// |Im(lambda)| (|lambda| when real), deduplicated, clamped positive. Falls
/// back to the current points when the pencil yields too few candidates.
std::vector<double> update_expansion_points(const Eigen::MatrixXd& m, const Eigen::MatrixXd& d,
                                            const Eigen::MatrixXd& k,
                                            const std::vector<double>& current);

struct TransferErrorConfig {
  GmresConfig gmres{1e-10, 1000, false};
  SpaiConfig spai{};
  PrecondMode mode = PrecondMode::ReuseChain;
  int max_chain_len = 16;
};

/// Relative transfer-function error ||H(s) - Hr(s)|| / ||H(s)|| on a grid of
/// s values. Full-order evaluations run through the same preconditioned
/// solver stack, walking one update chain along the grid. Entries where the
/// full-order solve fails are NaN.
std::vector<double> transfer_function_error(const SecondOrderSystem& sys,
                                            const ReducedSecondOrder& red,
                                            const std::vector<double>& s_grid,
                                            const TransferErrorConfig& cfg = {});

}  // namespace morprec
