// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "morprec/sparse.hpp"

namespace testsupport {

using morprec::index_t;
using morprec::SparseMatrix;
using morprec::Triplet;

inline Eigen::MatrixXd random_dense(index_t r, index_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (index_t j = 0; j < c; ++j)
    for (index_t i = 0; i < r; ++i) m(i, j) = u(rng);
  return m;
}

inline SparseMatrix sparse_from_dense(const Eigen::MatrixXd& m, double drop_tol = 0.0) {
  std::vector<Triplet> t;
  for (index_t i = 0; i < m.rows(); ++i)
    for (index_t j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > drop_tol) t.push_back({i, j, m(i, j)});
  return SparseMatrix::from_triplets(m.rows(), m.cols(), t);
}

/// Seeded sparse matrix, entries U[-1,1] kept with probability `density`,
/// plus `diag_shift` added on the whole diagonal (square matrices only).
inline SparseMatrix random_sparse(index_t r, index_t c, double density,
                                  std::uint64_t seed, double diag_shift = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> keep(0.0, 1.0);
  std::vector<Triplet> t;
  for (index_t i = 0; i < r; ++i)
    for (index_t j = 0; j < c; ++j)
      if (keep(rng) < density) t.push_back({i, j, u(rng)});
  if (diag_shift != 0.0)
    for (index_t i = 0; i < std::min(r, c); ++i) t.push_back({i, i, diag_shift});
  return SparseMatrix::from_triplets(r, c, t);
}

inline Eigen::MatrixXd dense_kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

inline Eigen::Index svd_rank(const Eigen::MatrixXd& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++r;
  return r;
}

/// span(a) == span(b), decided by three rank evaluations.
inline bool same_span(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol = 1e-10) {
  if (a.rows() != b.rows()) return false;
  Eigen::MatrixXd ab(a.rows(), a.cols() + b.cols());
  ab << a, b;
  const Eigen::Index ra = svd_rank(a, tol);
  const Eigen::Index rb = svd_rank(b, tol);
  return ra == rb && svd_rank(ab, tol) == ra;
}

/// span(sub) is contained in span(big).
inline bool span_contains(const Eigen::MatrixXd& big, const Eigen::MatrixXd& sub,
                          double tol = 1e-10) {
  if (big.rows() != sub.rows()) return false;
  Eigen::MatrixXd ab(big.rows(), big.cols() + sub.cols());
  ab << big, sub;
  return svd_rank(ab, tol) == svd_rank(big, tol);
}

}  // namespace testsupport
