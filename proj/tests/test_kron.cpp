// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <vector>

#include "morprec/errors.hpp"
#include "morprec/gmres.hpp"
#include "morprec/kron.hpp"
#include "morprec/sparse.hpp"
#include "support.hpp"

using morprec::ConfigError;
using morprec::KroneckerOperator;
using morprec::SparseMatrix;
using testsupport::dense_kron;
using testsupport::random_dense;
using testsupport::random_sparse;

namespace {

// Dense image of -(Lambda (x) I) - (I (x) base) - sum_j small_j^T (x) sparse_j.
Eigen::MatrixXd dense_operator(const KroneckerOperator& op) {
  const Eigen::Index n = op.base_dim();
  const Eigen::Index r = op.reduced_dim();
  Eigen::MatrixXd out = -dense_kron(op.lambda(), Eigen::MatrixXd::Identity(n, n)) -
                        dense_kron(Eigen::MatrixXd::Identity(r, r), op.base().to_dense());
  for (const auto& c : op.couplers())
    out -= dense_kron(c.small.transpose(), c.sparse.to_dense());
  return out;
}

KroneckerOperator sample_operator(Eigen::Index n, Eigen::Index r, int couplers,
                                  std::uint64_t seed) {
  Eigen::MatrixXd lambda = random_dense(r, r, seed);
  lambda.diagonal().array() += 3.0;  // keeps the sample solvable below
  SparseMatrix base = random_sparse(n, n, 0.4, seed + 1, /*diag_shift=*/-6.0);
  std::vector<KroneckerOperator::Coupler> cs;
  for (int j = 0; j < couplers; ++j)
    cs.push_back({0.2 * random_dense(r, r, seed + 10 + j),
                  random_sparse(n, n, 0.3, seed + 20 + j)});
  return KroneckerOperator(std::move(lambda), std::move(base), std::move(cs));
}

}  // namespace

TEST_CASE("operator application matches the dense formula") {
  const auto op = sample_operator(5, 3, 2, 11);
  const Eigen::MatrixXd dense = dense_operator(op);
  for (int t = 0; t < 5; ++t) {
    const Eigen::VectorXd x = random_dense(op.dim(), 1, 100 + t);
    const Eigen::VectorXd got = op.apply(x);
    CHECK((got - dense * x).norm() <= 1e-12 * dense.norm() * x.norm());
  }
}

TEST_CASE("diagonal shift factory matches the explicit lambda") {
  Eigen::VectorXd shifts(3);
  shifts << 1.0, -2.0, 0.5;
  SparseMatrix base = random_sparse(4, 4, 0.5, 7, 2.0);
  const auto a = KroneckerOperator::from_diag_shifts(shifts, base);
  const auto b = KroneckerOperator(Eigen::MatrixXd(shifts.asDiagonal()), base);
  const Eigen::VectorXd x = random_dense(12, 1, 8);
  CHECK((a.apply(x) - b.apply(x)).norm() == 0.0);
}

TEST_CASE("explicit assembly equals the dense operator") {
  const auto op = sample_operator(5, 3, 2, 23);
  const SparseMatrix assembled = morprec::assemble_explicit(op);
  const Eigen::MatrixXd dense = dense_operator(op);
  CHECK((assembled.to_dense() - dense).norm() <= 1e-12 * dense.norm());
}

TEST_CASE("explicit assembly respects the entry cap") {
  const auto op = sample_operator(6, 4, 1, 31);
  CHECK_THROWS_AS(morprec::assemble_explicit(op, 10), ConfigError);
}

TEST_CASE("implicit gmres solve agrees with a dense solve") {
  const auto op = sample_operator(6, 3, 2, 41);
  const Eigen::MatrixXd dense = dense_operator(op);
  REQUIRE(dense.fullPivLu().isInvertible());

  const Eigen::VectorXd b = random_dense(op.dim(), 1, 42);
  morprec::GmresConfig gc;
  gc.rel_tol = 1e-12;
  gc.max_iter = 200;
  const morprec::LinearOp a_op = [&op](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    out = op.apply(in);
  };
  const auto res = morprec::gmres_right_preconditioned(a_op, morprec::identity_operator(), b, gc);
  REQUIRE(res.report.converged);
  const Eigen::VectorXd want = dense.fullPivLu().solve(b);
  CHECK((res.x - want).norm() <= 1e-8 * want.norm());
}
