// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <sstream>
#include <string>

#include "morprec/errors.hpp"
#include "morprec/matrix_market.hpp"
#include "morprec/sparse.hpp"
#include "support.hpp"

using morprec::IoError;
using morprec::read_matrix_market;
using morprec::SparseMatrix;
using morprec::write_matrix_market;
using testsupport::random_sparse;

namespace {

SparseMatrix parse(const std::string& text) {
  std::istringstream in(text);
  return read_matrix_market(in, "test");
}

}  // namespace

TEST_CASE("write then read is exact") {
  const auto a = random_sparse(17, 9, 0.3, 42);
  std::ostringstream out;
  write_matrix_market(out, a);
  std::istringstream in(out.str());
  const auto b = read_matrix_market(in, "roundtrip");
  REQUIRE(b.rows() == a.rows());
  REQUIRE(b.cols() == a.cols());
  CHECK(morprec::frobenius_distance(a, b) == 0.0);
}

TEST_CASE("dense write then read preserves shape and explicit zeros") {
  Eigen::MatrixXd m(2, 3);
  m << 1.5, 0.0, -2.25, 0.0, 0.0, 1e-300;
  std::ostringstream out;
  write_matrix_market(out, m);
  std::istringstream in(out.str());
  const auto b = read_matrix_market(in, "dense");
  REQUIRE(b.rows() == 2);
  REQUIRE(b.cols() == 3);
  CHECK((b.to_dense() - m).norm() == 0.0);
}

TEST_CASE("single entry file") {
  const auto a = parse(
      "%%MatrixMarket matrix coordinate real general\n"
      "1 1 1\n"
      "1 1 5.0\n");
  REQUIRE(a.rows() == 1);
  REQUIRE(a.cols() == 1);
  CHECK(a.to_dense()(0, 0) == 5.0);
}

TEST_CASE("comments and blank-ish spacing are tolerated") {
  const auto a = parse(
      "%%MatrixMarket matrix coordinate real general\n"
      "% produced by hand\n"
      "%\n"
      "2 2 2\n"
      "  1   2   3.5\n"
      "2 1 -1.0\n");
  CHECK(a.to_dense()(0, 1) == 3.5);
  CHECK(a.to_dense()(1, 0) == -1.0);
  CHECK(a.nnz() == 2);
}

TEST_CASE("symmetric storage expands the lower triangle") {
  const auto a = parse(
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "3 3 3\n"
      "1 1 2.0\n"
      "2 1 7.0\n"
      "3 3 1.0\n");
  Eigen::MatrixXd want = Eigen::MatrixXd::Zero(3, 3);
  want(0, 0) = 2.0;
  want(1, 0) = 7.0;
  want(0, 1) = 7.0;
  want(2, 2) = 1.0;
  CHECK((a.to_dense() - want).norm() == 0.0);
}

TEST_CASE("symmetric diagonal entries are not doubled") {
  const auto a = parse(
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "2 2 1\n"
      "1 1 3.0\n");
  CHECK(a.to_dense()(0, 0) == 3.0);
}

TEST_CASE("duplicate entries are summed") {
  const auto a = parse(
      "%%MatrixMarket matrix coordinate real general\n"
      "1 1 2\n"
      "1 1 2.0\n"
      "1 1 3.0\n");
  CHECK(a.to_dense()(0, 0) == 5.0);
}

TEST_CASE("malformed input names the line") {
  // Bad banner.
  CHECK_THROWS_AS(parse("%%MatrixMarket matrix array real general\n1 1 1\n1 1 1\n"), IoError);
  // Pattern/complex fields are not supported.
  CHECK_THROWS_AS(parse("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"),
                  IoError);
  // Size line with garbage.
  CHECK_THROWS_AS(parse("%%MatrixMarket matrix coodinate real general\n1 x 1\n"), IoError);
  // Entry out of range.
  CHECK_THROWS_AS(parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"),
                  IoError);
  // Non-numeric value.
  CHECK_THROWS_AS(parse("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 abc\n"),
                  IoError);
  // Truncated entry list.
  CHECK_THROWS_AS(parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n"),
                  IoError);
  // The message carries the origin tag and a line number.
  try {
    parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("test:") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
  }
}

TEST_CASE("missing file reports the path") {
  try {
    morprec::read_matrix_market_file("/nonexistent/morprec-io-test.mtx");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/morprec-io-test.mtx") != std::string::npos);
  }
}
