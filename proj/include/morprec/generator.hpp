// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "morprec/airga.hpp"
#include "morprec/birka.hpp"
#include "morprec/qbihomm.hpp"
#include "morprec/sparse.hpp"

namespace morprec {

/// Synthetic rotating-structure model on a strip grid of n nodes:
///   M   lumped positive diagonal with per-node scales spread over six
///       decades (heterogeneous materials),
///   K_E stiff 5-point Dirichlet stencil, edge weights ~1e9 times the
///       geometric mean of the node scales (symmetric positive definite),
///   K_R skew circulatory part: a directed transport ring through all nodes
///       at a multiple of the stiffness scale plus sparse random skew pairs
///       (pushes the shifted operators far from normal),
///   K_G mass-like positive diagonal,
///   K   = K_E + K_R + omega^2 K_G,  D = alpha M + beta K,  F = C = e_1.
/// Deterministic for a fixed seed. Requires n >= 4.
SecondOrderSystem generate_disc_brake_like(index_t n, double omega, double alpha, double beta,
                                           std::uint64_t seed);

/// Small stable bilinear model: K is a shifted negative stencil with a mild
/// nonsymmetric part, the m couplings are sparse and weak (fixed-point
/// iterations stay contractive), F is n x m and C a single random column.
/// Requires n >= 2, m >= 1.
BilinearSystem generate_bilinear_toy(index_t n, index_t m, std::uint64_t seed);

/// Small quadratic-bilinear model: D a diagonally dominant stencil, K a
/// shifted negative stencil, weak coupling N, a sparse random quadratic term
/// H with two entries per row, F = C = e_1. Requires n >= 2.
QbSystem generate_qb_toy(index_t n, std::uint64_t seed);

}  // namespace morprec
