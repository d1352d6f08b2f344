// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "morprec/chain.hpp"
#include "morprec/gmres.hpp"
#include "morprec/kron.hpp"
#include "morprec/report.hpp"
#include "morprec/spai.hpp"
#include "morprec/sparse.hpp"

namespace morprec {

/// Bilinear model x' = K x + sum_j N_j x u_j + F u, y = C^T x. One N per
/// input channel.
struct BilinearSystem {
  SparseMatrix k;                   // n x n
  std::vector<SparseMatrix> n_ops;  // m matrices, n x n
  SparseMatrix f;                   // n x m
  SparseMatrix c;                   // n x q

  static BilinearSystem create(SparseMatrix k, std::vector<SparseMatrix> n_ops, SparseMatrix f,
                               SparseMatrix c);

  index_t dim() const { return k.rows(); }
  index_t inputs() const { return f.cols(); }
  index_t outputs() const { return c.cols(); }
};

/// Reduced bilinear model plus the bases that produced it. Also used as the
/// fixed-point seed, where v/w/lambda stay empty.
struct BirkaState {
  Eigen::MatrixXd kr;               // r x r
  std::vector<Eigen::MatrixXd> nr;  // m matrices, r x r
  Eigen::MatrixXd fr;               // r x m
  Eigen::MatrixXd cr;               // r x q
  Eigen::VectorXcd lambda;          // eigenvalues of kr, sorted by (re, im)
  Eigen::MatrixXd v, w;             // n x r Petrov-Galerkin bases
  int sweeps = 0;

  index_t order() const { return kr.rows(); }
};

struct BirkaConfig {
  int r = 2;
  double tol = 1e-4;  // relative change of the sorted reduced spectrum
  int max_sweeps = 50;
  std::uint64_t seed = 1;  // drives the default initial guess only
  // The fixed-point iteration compares spectra across sweeps; inner solves
  // must be accurate well below `tol` or solver noise masks convergence.
  GmresConfig gmres{1e-10, 1000, false};
  SpaiConfig spai{};
  int max_chain_len = 16;
  index_t explicit_nnz_cap = 200000;
  index_t standard_residual_max_dim = 5000;
};

/// Default initial guess: diagonal reduced state matrix with eigenvalues
/// -logspace over [1e-3, 1] times a power-iteration estimate of the spectral
/// radius of K, zero reduced couplings, random unit input/output maps.
BirkaState birka_default_seed(const BilinearSystem& sys, int r, std::uint64_t seed);

/// Fixed-point interpolation reduction. Each sweep eigendecomposes the
/// reduced state matrix into a real block form, transforms the reduced data,
/// solves one Kronecker-structured system of size n*r per side (trial V and
/// test W) with GMRES, orthonormalizes, and projects. Convergence is a
/// relative change below tol of the sorted reduced spectrum. Preconditioners
/// act on the sparse explicit assembly of the Kronecker operator: one chain
/// per side, extended sweep to sweep; when the assembly would exceed
/// explicit_nnz_cap the run degrades to unpreconditioned solves with a
/// warning. A non-diagonalizable reduced state matrix is perturbed and
/// retried once. Singular projection (W^T V) aborts.
std::pair<BirkaState, ReductionReport> birka_reduce(const BilinearSystem& sys,
                                                    const BirkaConfig& cfg, PrecondMode mode,
                                                    const BirkaState* init = nullptr);

}  // namespace morprec
