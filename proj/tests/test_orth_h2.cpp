// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "morprec/h2.hpp"
#include "morprec/orth.hpp"
#include "support.hpp"

using morprec::OrthBasis;
using morprec::StateSpace;
using testsupport::dense_kron;
using testsupport::random_dense;

namespace {

/// Dense Lyapunov oracle: P solves A P + P A^T = -B B^T via a Kronecker
/// linear system, then ||sys||_2 = sqrt(trace(C P C^T)).
double h2_norm_oracle(const StateSpace& sys) {
  const Eigen::Index ns = sys.a.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(ns, ns);
  const Eigen::MatrixXd lhs = dense_kron(id, sys.a) + dense_kron(sys.a, id);
  const Eigen::MatrixXd bbt = sys.b * sys.b.transpose();
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(bbt.data(), ns * ns);
  const Eigen::VectorXd vecp = lhs.fullPivLu().solve(rhs);
  const Eigen::MatrixXd p = Eigen::Map<const Eigen::MatrixXd>(vecp.data(), ns, ns);
  return std::sqrt((sys.c * p * sys.c.transpose()).trace());
}

StateSpace random_stable(Eigen::Index ns, Eigen::Index m, Eigen::Index q,
                         std::uint64_t seed) {
  StateSpace s;
  s.a = random_dense(ns, ns, seed) - (2.0 + 0.1 * ns) * Eigen::MatrixXd::Identity(ns, ns);
  s.b = random_dense(ns, m, seed + 1);
  s.c = random_dense(q, ns, seed + 2);
  return s;
}

}  // namespace

TEST_CASE("orthonormal basis stays orthonormal and drops dependent columns") {
  OrthBasis basis(10, 8);
  Eigen::MatrixXd block = random_dense(10, 3, 7);
  CHECK(basis.append_block(block) == 3);
  CHECK(basis.size() == 3);
  const Eigen::MatrixXd v = basis.matrix();
  CHECK((v.transpose() * v - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-12);

  // Re-appending the same block adds nothing new.
  CHECK(basis.append_block(block) == 0);
  CHECK(basis.size() == 3);

  // A block with one new direction and one dependent column keeps exactly one.
  Eigen::MatrixXd mixed(10, 2);
  mixed.col(0) = block.col(0) * 2.0;
  mixed.col(1) = random_dense(10, 1, 8);
  CHECK(basis.append_block(mixed) == 1);
  CHECK(basis.size() == 4);
}

TEST_CASE("orthonormal basis respects its capacity") {
  OrthBasis basis(6, 4);
  CHECK(basis.append_block(random_dense(6, 6, 17)) == 4);
  CHECK(basis.size() == 4);
  CHECK(basis.full());
}

TEST_CASE("companion form of a second-order model") {
  Eigen::MatrixXd m = 2.0 * Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd k(2, 2);
  k << 4, 0, 0, 6;
  Eigen::MatrixXd f(2, 1);
  f << 1, 0;
  Eigen::MatrixXd c(2, 1);
  c << 0, 1;
  const StateSpace ss = morprec::second_order_to_state_space(m, d, k, f, c);
  REQUIRE(ss.a.rows() == 4);
  // Top half is [0 I]; bottom-left is -inv(M) K.
  CHECK((ss.a.block(0, 2, 2, 2) - Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
  CHECK(ss.a(2, 0) == doctest::Approx(-2.0));
  CHECK(ss.a(3, 1) == doctest::Approx(-3.0));
  CHECK(ss.b(2, 0) == doctest::Approx(0.5));
  CHECK(ss.c(0, 1) == 1.0);
}

TEST_CASE("scalar system has a known closed-form norm") {
  // H(s) = 1 / (s + a) has squared norm 1 / (2a).
  StateSpace s;
  s.a = Eigen::MatrixXd::Constant(1, 1, -1.0);
  s.b = Eigen::MatrixXd::Constant(1, 1, 1.0);
  s.c = Eigen::MatrixXd::Constant(1, 1, 1.0);
  CHECK(morprec::h2_norm(s) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("norm matches the dense Lyapunov oracle") {
  for (std::uint64_t seed : {31u, 32u, 33u}) {
    const StateSpace s = random_stable(5, 2, 3, seed);
    const double want = h2_norm_oracle(s);
    CHECK(morprec::h2_norm(s) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("unstable systems have no finite norm") {
  StateSpace s;
  s.a = Eigen::MatrixXd::Constant(1, 1, 1.0);
  s.b = Eigen::MatrixXd::Constant(1, 1, 1.0);
  s.c = Eigen::MatrixXd::Constant(1, 1, 1.0);
  CHECK(morprec::h2_norm(s) == std::numeric_limits<double>::infinity());
}

TEST_CASE("distance of a system to itself is numerically zero") {
  const StateSpace s = random_stable(4, 1, 1, 41);
  // The Gramian route leaves eigen-decomposition rounding behind, so the
  // self-distance is tiny relative to the norm rather than exactly zero.
  CHECK(morprec::h2_distance(s, s) <= 1e-7 * (1.0 + morprec::h2_norm(s)));
}

TEST_CASE("distance to the zero system is the norm") {
  const StateSpace s = random_stable(4, 1, 1, 51);
  StateSpace zero = s;
  zero.c.setZero();
  CHECK(morprec::h2_distance(s, zero) == doctest::Approx(morprec::h2_norm(s)).epsilon(1e-9));
}

TEST_CASE("distance is symmetric and dominated by the triangle inequality") {
  const StateSpace x = random_stable(4, 1, 2, 61);
  const StateSpace y = random_stable(5, 1, 2, 62);
  const StateSpace z = random_stable(3, 1, 2, 63);
  const double xy = morprec::h2_distance(x, y);
  const double yx = morprec::h2_distance(y, x);
  CHECK(xy == doctest::Approx(yx).epsilon(1e-9));
  CHECK(morprec::h2_distance(x, z) <= xy + morprec::h2_distance(y, z) + 1e-9);
}
