// SPDX-License-Identifier: Apache-2.0

#include "morprec/generator.hpp"

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "morprec/errors.hpp"

namespace morprec {

namespace {

SparseMatrix unit_first_column(index_t n) {
  const Triplet one[] = {{0, 0, 1.0}};
  return SparseMatrix::from_triplets(n, 1, one);
}

/// Symmetric tridiagonal stencil (off, diag, off) on n nodes.
SparseMatrix tridiag(index_t n, double off, double diag) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(3 * n));
  for (index_t i = 0; i < n; ++i) {
    t.push_back({i, i, diag});
    if (i + 1 < n) {
      t.push_back({i, i + 1, off});
      t.push_back({i + 1, i, off});
    }
  }
  return SparseMatrix::from_triplets(n, n, t);
}

}  // namespace

SecondOrderSystem generate_disc_brake_like(index_t n, double omega, double alpha, double beta,
                                           std::uint64_t seed) {
  if (n < 4) throw ConfigError("generator: n must be at least 4");
  if (!std::isfinite(omega) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw ConfigError("generator: omega, alpha, beta must be finite");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double kappa = 1e9;  // stiffness-to-mass scale
  const index_t g = static_cast<index_t>(std::ceil(std::sqrt(static_cast<double>(n))));

  // Per-node material scales over six decades: the mix of soft and stiff
  // regions is what makes the shifted operators hard for plain GMRES, while
  // the induced row scaling is exactly what a local approximate inverse
  // repairs.
  std::vector<double> scale(static_cast<std::size_t>(n));
  for (index_t v = 0; v < n; ++v) scale[static_cast<std::size_t>(v)] = std::pow(10.0, 6.0 * u01(rng));

  std::vector<Triplet> m_t, ke_t, kr_t, kg_t;
  m_t.reserve(static_cast<std::size_t>(n));
  kg_t.reserve(static_cast<std::size_t>(n));
  ke_t.reserve(static_cast<std::size_t>(5 * n));
  for (index_t v = 0; v < n; ++v) {
    const double sv = scale[static_cast<std::size_t>(v)];
    m_t.push_back({v, v, sv * (1.0 + 0.2 * u01(rng))});
    kg_t.push_back({v, v, 1e3 * sv * (1.0 + 0.2 * u01(rng))});
  }
  for (index_t v = 0; v < n; ++v) {
    const double sv = scale[static_cast<std::size_t>(v)];
    const index_t row = v / g;
    const index_t right = v + 1;
    const index_t down = v + g;
    const bool has_right = right < n && right / g == row;
    const bool has_down = down < n;
    if (has_right) {
      const double w = kappa * std::sqrt(sv * scale[static_cast<std::size_t>(right)]) *
                       (1.0 + 0.5 * u01(rng));
      ke_t.push_back({v, v, w});
      ke_t.push_back({right, right, w});
      ke_t.push_back({v, right, -w});
      ke_t.push_back({right, v, -w});
    }
    if (has_down) {
      const double w = kappa * std::sqrt(sv * scale[static_cast<std::size_t>(down)]) *
                       (1.0 + 0.5 * u01(rng));
      ke_t.push_back({v, v, w});
      ke_t.push_back({down, down, w});
      ke_t.push_back({v, down, -w});
      ke_t.push_back({down, v, -w});
    }
    // Dirichlet boundary: absent neighbors anchor the diagonal, keeping the
    // stencil strictly diagonally dominant (hence nonsingular).
    const bool has_left = v % g != 0;
    const bool has_up = v >= g;
    int missing = 0;
    if (!has_left) ++missing;
    if (!has_right) ++missing;
    if (!has_up) ++missing;
    if (!has_down) ++missing;
    for (int b = 0; b < missing; ++b)
      ke_t.push_back({v, v, kappa * sv * (1.0 + 0.5 * u01(rng))});
  }

  // Circulatory part: skew transport around a closed loop through the grid
  // (rotation carries material circumferentially), plus sparse random skew
  // pairs. Pure skew leaves the symmetric part definite, but the directed
  // loop pushes the operator far from normal, which is what defeats plain
  // GMRES while a local approximate inverse still captures it.
  for (index_t v = 0; v < n; ++v) {
    const index_t nxt = (v + 1) % n;
    const double w = 16.0 * kappa *
                     std::sqrt(scale[static_cast<std::size_t>(v)] *
                               scale[static_cast<std::size_t>(nxt)]) *
                     (1.0 + 0.5 * u01(rng));
    kr_t.push_back({v, nxt, w});
    kr_t.push_back({nxt, v, -w});
  }
  const index_t pairs = std::max<index_t>(1, n / 8);
  std::uniform_int_distribution<index_t> node(0, n - 1);
  for (index_t p = 0; p < pairs; ++p) {
    const index_t u = node(rng);
    const index_t v = node(rng);
    const double draw = 2.0 * u01(rng) - 1.0;
    if (u == v) continue;  // rng state already advanced; skip keeps determinism
    const double w = 0.3 * kappa *
                     std::sqrt(scale[static_cast<std::size_t>(u)] *
                               scale[static_cast<std::size_t>(v)]) *
                     draw;
    kr_t.push_back({u, v, w});
    kr_t.push_back({v, u, -w});
  }

  const SparseMatrix m = SparseMatrix::from_triplets(n, n, m_t);
  const SparseMatrix ke = SparseMatrix::from_triplets(n, n, ke_t);
  const SparseMatrix kr = SparseMatrix::from_triplets(n, n, kr_t);
  const SparseMatrix kg = SparseMatrix::from_triplets(n, n, kg_t);
  const std::pair<double, const SparseMatrix*> k_terms[] = {
      {1.0, &ke}, {1.0, &kr}, {omega * omega, &kg}};
  SparseMatrix k = SparseMatrix::linear_combination(k_terms);

  return SecondOrderSystem::with_proportional_damping(m, std::move(k), unit_first_column(n),
                                                      unit_first_column(n), alpha, beta);
}

BilinearSystem generate_bilinear_toy(index_t n, index_t m, std::uint64_t seed) {
  if (n < 2) throw ConfigError("generator: n must be at least 2");
  if (m < 1) throw ConfigError("generator: at least one input is required");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::uniform_int_distribution<index_t> node(0, n - 1);

  // K = -(stencil + I) plus a mild nonsymmetric part; eigenvalues stay in
  // the open left half plane.
  const SparseMatrix stencil = tridiag(n, -1.0, 3.0);
  std::vector<Triplet> skew;
  for (index_t p = 0; p < n / 2; ++p) {
    const index_t i = node(rng);
    const index_t j = node(rng);
    const double w = 0.1 * sym(rng);
    if (i == j) continue;
    skew.push_back({i, j, w});
  }
  const SparseMatrix pert = SparseMatrix::from_triplets(n, n, skew);
  const std::pair<double, const SparseMatrix*> k_terms[] = {{-1.0, &stencil}, {1.0, &pert}};
  SparseMatrix k = SparseMatrix::linear_combination(k_terms);

  std::vector<SparseMatrix> n_ops;
  n_ops.reserve(static_cast<std::size_t>(m));
  for (index_t j = 0; j < m; ++j) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i) t.push_back({i, node(rng), 0.05 * sym(rng)});
    n_ops.push_back(SparseMatrix::from_triplets(n, n, t));
  }

  std::vector<Triplet> f_t, c_t;
  for (index_t j = 0; j < m; ++j)
    for (index_t i = 0; i < n; ++i) f_t.push_back({i, j, sym(rng)});
  for (index_t i = 0; i < n; ++i) c_t.push_back({i, 0, sym(rng)});
  return BilinearSystem::create(std::move(k), std::move(n_ops),
                                SparseMatrix::from_triplets(n, m, f_t),
                                SparseMatrix::from_triplets(n, 1, c_t));
}

QbSystem generate_qb_toy(index_t n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("generator: n must be at least 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::uniform_int_distribution<index_t> node(0, n - 1);

  SparseMatrix d = tridiag(n, -1.0, 4.0);
  const SparseMatrix stencil = tridiag(n, -1.0, 2.5);
  const std::pair<double, const SparseMatrix*> k_terms[] = {{-1.0, &stencil}};
  SparseMatrix k = SparseMatrix::linear_combination(k_terms);

  std::vector<Triplet> n_t;
  for (index_t i = 0; i < n; ++i) n_t.push_back({i, node(rng), 0.05 * sym(rng)});
  SparseMatrix n_op = SparseMatrix::from_triplets(n, n, n_t);

  std::vector<Triplet> h_t;
  for (index_t a = 0; a < n; ++a)
    for (int e = 0; e < 2; ++e) {
      const index_t b = node(rng);
      const index_t c = node(rng);
      h_t.push_back({a, b * n + c, 0.1 * sym(rng)});
    }
  SparseMatrix h = SparseMatrix::from_triplets(n, n * n, h_t);

  return QbSystem::create(std::move(d), std::move(k), std::move(n_op), std::move(h),
                          unit_first_column(n), unit_first_column(n));
}

}  // namespace morprec
