// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "morprec/sparse.hpp"

namespace morprec {

/// Matrix-free operator: out = Op(in). Implementations must not alias the two
/// arguments.
using LinearOp = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

LinearOp identity_operator();
LinearOp matvec_operator(SparseMatrix a);

struct GmresConfig {
  double rel_tol = 1e-6;
  int max_iter = 1000;
  bool record_history = false;
};

struct GmresReport {
  int iterations = 0;
  bool converged = false;
  bool breakdown = false;            // zero Arnoldi vector before convergence
  double rhs_norm = 0.0;
  double final_residual = 0.0;       // true ||b - A x||, recomputed once at exit
  double solve_seconds = 0.0;
  std::vector<double> residual_history;  // least-squares estimates, nonincreasing
};

struct GmresResult {
  Eigen::VectorXd x;
  GmresReport report;
};

/// Full (restart-free) GMRES on A P xt = b with x = P xt, x0 = 0. Modified
/// Gram-Schmidt with one extra pass whenever the measured loss of
/// orthogonality of the new basis vector exceeds 1e-10. The residual is
/// tracked through Givens rotations; before declaring convergence the true
/// residual is recomputed once and iteration continues if it disagrees.
/// Breakdown and non-convergence are reported in the result, never silently
/// accepted; the partial iterate is still returned. Throws
/// std::invalid_argument for a zero right-hand side.
GmresResult gmres_right_preconditioned(const LinearOp& apply_a, const LinearOp& apply_p,
                                       const Eigen::VectorXd& b, const GmresConfig& cfg = {});

}  // namespace morprec
