// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace morprec {

/// Dense strictly proper first-order system x' = A x + B u, y = C x.
struct StateSpace {
  Eigen::MatrixXd a;  // ns x ns
  Eigen::MatrixXd b;  // ns x m
  Eigen::MatrixXd c;  // q x ns
};

/// Companion form of a small second-order model
/// m x'' + d x' + k x = f u, y = c^T x (all dense, m invertible).
StateSpace second_order_to_state_space(const Eigen::MatrixXd& m, const Eigen::MatrixXd& d,
                                       const Eigen::MatrixXd& k, const Eigen::MatrixXd& f,
                                       const Eigen::MatrixXd& c);

/// H2 norm via the controllability Gramian, computed from the complex
/// eigendecomposition of A. Returns +infinity when A is not asymptotically
/// stable (the norm does not exist then).
double h2_norm(const StateSpace& sys);

/// H2 norm of the difference of two systems with matching input/output
/// counts; the state dimensions may differ.
double h2_distance(const StateSpace& a, const StateSpace& b);

}  // namespace morprec
