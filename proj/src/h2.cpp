// SPDX-License-Identifier: Apache-2.0

#include "morprec/h2.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace morprec {

StateSpace second_order_to_state_space(const Eigen::MatrixXd& m, const Eigen::MatrixXd& d,
                                       const Eigen::MatrixXd& k, const Eigen::MatrixXd& f,
                                       const Eigen::MatrixXd& c) {
  const Eigen::Index r = m.rows();
  Eigen::PartialPivLU<Eigen::MatrixXd> mlu(m);
  StateSpace ss;
  ss.a = Eigen::MatrixXd::Zero(2 * r, 2 * r);
  ss.a.topRightCorner(r, r).setIdentity();
  ss.a.bottomLeftCorner(r, r) = -mlu.solve(k);
  ss.a.bottomRightCorner(r, r) = -mlu.solve(d);
  ss.b = Eigen::MatrixXd::Zero(2 * r, f.cols());
  ss.b.bottomRows(r) = mlu.solve(f);
  ss.c = Eigen::MatrixXd::Zero(c.cols(), 2 * r);
  ss.c.leftCols(r) = c.transpose();
  return ss;
}

double h2_norm(const StateSpace& sys) {
  const Eigen::Index ns = sys.a.rows();
  if (ns == 0) return 0.0;
  if (sys.a.cols() != ns || sys.b.rows() != ns || sys.c.cols() != ns)
    throw std::invalid_argument("h2_norm: inconsistent dimensions");

  Eigen::EigenSolver<Eigen::MatrixXd> es(sys.a);
  if (es.info() != Eigen::Success)
    return std::numeric_limits<double>::infinity();
  const Eigen::VectorXcd lam = es.eigenvalues();
  double max_abs = 0.0;
  for (Eigen::Index i = 0; i < ns; ++i) max_abs = std::max(max_abs, std::abs(lam[i]));
  for (Eigen::Index i = 0; i < ns; ++i)
    if (lam[i].real() >= -1e-12 * std::max(max_abs, 1.0))
      return std::numeric_limits<double>::infinity();

  // Diagonalized Lyapunov solve: with A = X L X^{-1}, the Gramian is
  // P = X S X^H where S_ij = -G_ij / (l_i + conj(l_j)), G = X^{-1} B B^T X^{-H}.
  const Eigen::MatrixXcd x = es.eigenvectors();
  Eigen::FullPivLU<Eigen::MatrixXcd> xlu(x);
  if (!xlu.isInvertible())
    return std::numeric_limits<double>::infinity();
  const Eigen::MatrixXcd xb = xlu.solve(sys.b.cast<std::complex<double>>());
  const Eigen::MatrixXcd g = xb * xb.adjoint();
  Eigen::MatrixXcd s(ns, ns);
  for (Eigen::Index i = 0; i < ns; ++i)
    for (Eigen::Index j = 0; j < ns; ++j)
      s(i, j) = -g(i, j) / (lam[i] + std::conj(lam[j]));
  const Eigen::MatrixXcd cx = sys.c.cast<std::complex<double>>() * x;
  const double trace = (cx * s * cx.adjoint()).trace().real();
  return std::sqrt(std::max(trace, 0.0));
}

double h2_distance(const StateSpace& a, const StateSpace& b) {
  if (a.b.cols() != b.b.cols() || a.c.rows() != b.c.rows())
    throw std::invalid_argument("h2_distance: input/output count mismatch");
  const Eigen::Index na = a.a.rows();
  const Eigen::Index nb = b.a.rows();
  StateSpace err;
  err.a = Eigen::MatrixXd::Zero(na + nb, na + nb);
  err.a.topLeftCorner(na, na) = a.a;
  err.a.bottomRightCorner(nb, nb) = b.a;
  err.b = Eigen::MatrixXd::Zero(na + nb, a.b.cols());
  err.b.topRows(na) = a.b;
  err.b.bottomRows(nb) = b.b;
  err.c = Eigen::MatrixXd::Zero(a.c.rows(), na + nb);
  err.c.leftCols(na) = a.c;
  err.c.rightCols(nb) = -b.c;
  return h2_norm(err);
}

}  // namespace morprec
