// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "morprec/chain.hpp"
#include "morprec/errors.hpp"
#include "morprec/spai.hpp"
#include "morprec/sparse.hpp"
#include "support.hpp"

using morprec::index_t;
using morprec::LinearOp;
using morprec::PrecondChain;
using morprec::SpaiConfig;
using morprec::SparseMatrix;
using morprec::UpdateFactor;
using morprec::update_build;
using testsupport::random_dense;
using testsupport::random_sparse;
using testsupport::sparse_from_dense;

namespace {

std::shared_ptr<const UpdateFactor> share(UpdateFactor f) {
  return std::make_shared<const UpdateFactor>(std::move(f));
}

}  // namespace

TEST_CASE("identical matrices update to the identity") {
  const auto a = random_sparse(6, 6, 0.5, 3, /*diag_shift=*/4.0);
  const auto f = update_build(a, a);
  CHECK(f.matrix_change == 0.0);
  CHECK(f.min_residual <= 1e-12);
  const Eigen::MatrixXd q = f.q.to_dense();
  CHECK((q - Eigen::MatrixXd::Identity(6, 6)).norm() <= 1e-12);
}

TEST_CASE("scalar rescale inverts the scale") {
  const auto prev = SparseMatrix::identity(3);
  Eigen::VectorXd two = Eigen::VectorXd::Constant(3, 2.0);
  const auto next = SparseMatrix::diagonal(two);
  const auto f = update_build(prev, next);
  const Eigen::MatrixXd q = f.q.to_dense();
  CHECK((q - 0.5 * Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-14);
  CHECK(f.min_residual <= 1e-14);
}

TEST_CASE("full pattern recovers the exact transition matrix") {
  Eigen::MatrixXd dp = random_dense(5, 5, 13);
  dp += 4.0 * Eigen::MatrixXd::Identity(5, 5);
  Eigen::MatrixXd dn = random_dense(5, 5, 14);
  dn += 4.0 * Eigen::MatrixXd::Identity(5, 5);
  const auto prev = sparse_from_dense(dp);
  const auto next = sparse_from_dense(dn);
  const auto f = update_build(prev, next);
  const Eigen::MatrixXd want = dn.inverse() * dp;
  CHECK((f.q.to_dense() - want).norm() <= 1e-10 * want.norm());
}

TEST_CASE("minimized residual never exceeds the plain matrix change") {
  for (int trial = 0; trial < 8; ++trial) {
    const auto prev = random_sparse(12, 12, 0.3, 100 + static_cast<std::uint64_t>(trial),
                                    /*diag_shift=*/3.0);
    const auto next = random_sparse(12, 12, 0.3, 200 + static_cast<std::uint64_t>(trial),
                                    /*diag_shift=*/3.0);
    const auto f = update_build(prev, next);
    CHECK(f.min_residual <= f.matrix_change * (1.0 + 1e-12));
  }
}

TEST_CASE("chain with no updates is the base preconditioner") {
  const auto base = random_sparse(5, 5, 0.6, 23);
  PrecondChain chain(base);
  const Eigen::VectorXd v = random_dense(5, 1, 24);
  CHECK((chain.apply(v) - base.multiply(v)).norm() == 0.0);
  CHECK(chain.length() == 0);
}

TEST_CASE("two-factor toy chain") {
  PrecondChain chain(SparseMatrix::diagonal(Eigen::VectorXd::Constant(1, 2.0)));
  UpdateFactor f;
  f.q = SparseMatrix::diagonal(Eigen::VectorXd::Constant(1, 3.0));
  const auto c2 = chain.extended(share(std::move(f)));
  Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  CHECK(c2.apply(one)(0) == 6.0);
}

TEST_CASE("chain application equals the explicit factor product") {
  const auto base = random_sparse(8, 8, 0.5, 33);
  Eigen::MatrixXd product = base.to_dense();
  PrecondChain chain(base);
  for (int k = 0; k < 3; ++k) {
    UpdateFactor f;
    f.q = random_sparse(8, 8, 0.5, 40 + static_cast<std::uint64_t>(k));
    product = f.q.to_dense() * product;  // newest factor acts last
    chain = chain.extended(share(std::move(f)));
  }
  for (int t = 0; t < 4; ++t) {
    const Eigen::VectorXd v = random_dense(8, 1, 50 + static_cast<std::uint64_t>(t));
    const Eigen::VectorXd want = product * v;
    CHECK((chain.apply(v) - want).norm() <= 1e-12 * (1.0 + want.norm()));
  }
}

TEST_CASE("extension leaves the original chain and shared prefix untouched") {
  const auto base = random_sparse(6, 6, 0.5, 63);
  PrecondChain c1(base);
  UpdateFactor f1;
  f1.q = random_sparse(6, 6, 0.5, 64);
  c1 = c1.extended(share(std::move(f1)));

  UpdateFactor f2;
  f2.q = random_sparse(6, 6, 0.5, 65);
  UpdateFactor f3;
  f3.q = random_sparse(6, 6, 0.5, 66);
  const PrecondChain c2 = c1.extended(share(std::move(f2)));
  const PrecondChain c3 = c1.extended(share(std::move(f3)));

  CHECK(c1.length() == 1);
  CHECK(c2.length() == 2);
  CHECK(c3.length() == 2);
  // The first factor is the same object, not a copy.
  CHECK(c2.updates()[0].get() == c1.updates()[0].get());
  CHECK(c3.updates()[0].get() == c1.updates()[0].get());
  const Eigen::VectorXd v = random_dense(6, 1, 67);
  CHECK((c2.updates()[0]->q.multiply(v) - c3.updates()[0]->q.multiply(v)).norm() == 0.0);
}

TEST_CASE("reuse identity holds at operator level on full patterns") {
  // With exact Q, A_new (Q P_prev) v = A_prev P_prev v for any v.
  Eigen::MatrixXd dp = random_dense(8, 8, 73);
  dp += 5.0 * Eigen::MatrixXd::Identity(8, 8);
  Eigen::MatrixXd dn = dp + 0.3 * random_dense(8, 8, 74);
  const auto prev = sparse_from_dense(dp);
  const auto next = sparse_from_dense(dn);

  const auto p_prev = morprec::spai_build(prev).p;
  const auto f = update_build(prev, next);
  PrecondChain chain(p_prev);
  chain = chain.extended(share(f));

  for (int t = 0; t < 4; ++t) {
    const Eigen::VectorXd v = random_dense(8, 1, 80 + static_cast<std::uint64_t>(t));
    const Eigen::VectorXd lhs = next.multiply(chain.apply(v));
    const Eigen::VectorXd rhs = prev.multiply(p_prev.multiply(v));
    CHECK((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("zero target columns produce zero update columns") {
  // a_prev has an empty column; the exact minimizer for it is q = 0.
  std::vector<morprec::Triplet> tp{{0, 0, 1.0}, {2, 2, 3.0}};
  const auto prev = SparseMatrix::from_triplets(3, 3, tp);
  const auto next = SparseMatrix::identity(3);
  const auto f = update_build(prev, next);
  const Eigen::MatrixXd q = f.q.to_dense();
  CHECK(q(1, 1) == 0.0);
  CHECK(q(0, 0) == doctest::Approx(1.0));
  CHECK(q(2, 2) == doctest::Approx(3.0));
  CHECK(f.min_residual <= 1e-14);
}

TEST_CASE("closed-form shift update") {
  // A(sigma) = sigma D - K; A_new = A_prev + (sigma_new - sigma_prev) D.
  const Eigen::MatrixXd d = random_dense(3, 3, 91) + 4.0 * Eigen::MatrixXd::Identity(3, 3);
  const Eigen::MatrixXd k = random_dense(3, 3, 92);
  const double s_prev = 1.0, s_new = 1.7;
  const Eigen::MatrixXd a_prev = s_prev * d - k;
  const Eigen::MatrixXd a_new = s_new * d - k;

  const Eigen::MatrixXd apinv_d = a_prev.inverse() * d;
  LinearOp apinv_d_op = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    out.noalias() = apinv_d * in;
  };

  SUBCASE("same shift is the identity") {
    const auto op = morprec::closed_form_update_qb(apinv_d_op, 3, s_prev, s_prev);
    const Eigen::VectorXd v = random_dense(3, 1, 93);
    Eigen::VectorXd got(3);
    op(v, got);
    CHECK((got - v).norm() <= 1e-12);
  }

  SUBCASE("matches the exact transition matrix") {
    const auto op = morprec::closed_form_update_qb(apinv_d_op, 3, s_prev, s_new);
    const Eigen::MatrixXd want = a_new.inverse() * a_prev;
    const Eigen::VectorXd v = random_dense(3, 1, 94);
    Eigen::VectorXd got(3);
    op(v, got);
    CHECK((got - want * v).norm() <= 1e-10 * (1.0 + (want * v).norm()));
  }

  SUBCASE("full-pattern minimization agrees with the closed form") {
    const auto f = update_build(sparse_from_dense(a_prev), sparse_from_dense(a_new));
    const auto op = morprec::closed_form_update_qb(apinv_d_op, 3, s_prev, s_new);
    const Eigen::VectorXd v = random_dense(3, 1, 95);
    Eigen::VectorXd want(3);
    op(v, want);
    CHECK((f.q.multiply(v) - want).norm() <= 1e-10 * (1.0 + want.norm()));
  }
}

TEST_CASE("singular closed-form shift is rejected") {
  // A_prev = I (D = I, K = 0, sigma_prev = 1); sigma_new = 0 makes I + delta I = 0.
  LinearOp ident = [](const Eigen::VectorXd& in, Eigen::VectorXd& out) { out = in; };
  CHECK_THROWS_AS((void)morprec::closed_form_update_qb(ident, 3, 1.0, 0.0),
                  morprec::SolverError);
}

TEST_CASE("update factor dimensions are validated") {
  const auto a = SparseMatrix::identity(3);
  const auto b = SparseMatrix::identity(4);
  CHECK_THROWS_AS((void)update_build(a, b), std::invalid_argument);
}
