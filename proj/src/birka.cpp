// SPDX-License-Identifier: Apache-2.0

#include "morprec/birka.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <random>
#include <string>
#include <utility>

#include "morprec/errors.hpp"
#include "morprec/format.hpp"

namespace morprec {

BilinearSystem BilinearSystem::create(SparseMatrix k, std::vector<SparseMatrix> n_ops,
                                      SparseMatrix f, SparseMatrix c) {
  const index_t n = k.rows();
  if (k.cols() != n) throw ConfigError("bilinear system: K must be square");
  if (f.rows() != n || f.cols() < 1)
    throw ConfigError("bilinear system: F must have n rows and at least one column");
  if (c.rows() != n || c.cols() < 1)
    throw ConfigError("bilinear system: C must have n rows and at least one column");
  if (static_cast<index_t>(n_ops.size()) != f.cols())
    throw ConfigError("bilinear system: one coupling matrix per input column is required (" +
                      std::to_string(n_ops.size()) + " given, " + std::to_string(f.cols()) +
                      " inputs)");
  for (const SparseMatrix& op : n_ops)
    if (op.rows() != n || op.cols() != n)
      throw ConfigError("bilinear system: coupling matrices must be n x n");
  BilinearSystem sys;
  sys.k = std::move(k);
  sys.n_ops = std::move(n_ops);
  sys.f = std::move(f);
  sys.c = std::move(c);
  return sys;
}

BirkaState birka_default_seed(const BilinearSystem& sys, int r, std::uint64_t seed) {
  if (r < 1) throw ConfigError("birka: reduced order must be at least 1");
  if (static_cast<index_t>(r) > sys.dim())
    throw ConfigError("birka: reduced order exceeds the system dimension");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  // Spectral-radius estimate of K by plain power iteration; the seed only
  // needs the right order of magnitude.
  const index_t n = sys.dim();
  Eigen::VectorXd x(n);
  for (index_t i = 0; i < n; ++i) x[i] = unit(rng);
  double radius = 0.0;
  if (x.norm() > 0.0) {
    x.normalize();
    for (int it = 0; it < 20; ++it) {
      const Eigen::VectorXd y = sys.k.multiply(x);
      const double ny = y.norm();
      if (ny == 0.0) {
        radius = 0.0;
        break;
      }
      radius = ny;
      x = y / ny;
    }
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) radius = 1.0;

  BirkaState state;
  state.kr = Eigen::MatrixXd::Zero(r, r);
  for (int i = 0; i < r; ++i) {
    const double t = r == 1 ? 1.0 : static_cast<double>(i) / (r - 1);
    state.kr(i, i) = -radius * std::pow(10.0, -3.0 * (1.0 - t));
  }
  state.nr.assign(sys.n_ops.size(), Eigen::MatrixXd::Zero(r, r));
  state.fr.resize(r, sys.inputs());
  state.cr.resize(r, sys.outputs());
  for (Eigen::Index j = 0; j < state.fr.cols(); ++j) {
    for (int i = 0; i < r; ++i) state.fr(i, j) = unit(rng);
    const double norm = state.fr.col(j).norm();
    if (norm > 0.0) state.fr.col(j) /= norm;
  }
  for (Eigen::Index j = 0; j < state.cr.cols(); ++j) {
    for (int i = 0; i < r; ++i) state.cr(i, j) = unit(rng);
    const double norm = state.cr.col(j).norm();
    if (norm > 0.0) state.cr.col(j) /= norm;
  }
  return state;
}

namespace {

Eigen::VectorXcd sorted_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw SolverError("birka: eigenvalue computation on the reduced state matrix failed");
  Eigen::VectorXcd lam = es.eigenvalues();
  std::sort(lam.data(), lam.data() + lam.size(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real()) return a.real() < b.real();
              return a.imag() < b.imag();
            });
  return lam;
}

/// Real block eigendecomposition kr = basis * blocks * basis^{-1} with 1x1
/// blocks for real eigenvalues and 2x2 rotation-scaled blocks for pairs.
struct RealSpectrum {
  Eigen::MatrixXd blocks;
  Eigen::MatrixXd basis;
  Eigen::MatrixXd basis_inv;
};

bool real_spectrum(const Eigen::MatrixXd& kr, RealSpectrum& out) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(kr);
  if (es.info() != Eigen::Success) return false;
  out.blocks = es.pseudoEigenvalueMatrix();
  out.basis = es.pseudoEigenvectors();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(out.basis);
  if (!lu.isInvertible()) return false;
  out.basis_inv = lu.inverse();
  return true;
}

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

/// Per-side preconditioner state carried across sweeps.
struct SidePrecond {
  PrecondChain chain;
  SparseMatrix prev_explicit;
  bool degraded = false;  // explicit assembly over the nnz cap
};

}  // namespace

std::pair<BirkaState, ReductionReport> birka_reduce(const BilinearSystem& sys,
                                                    const BirkaConfig& cfg, PrecondMode mode,
                                                    const BirkaState* init) {
  const index_t n = sys.dim();
  const index_t m = sys.inputs();
  if (cfg.max_sweeps < 1) throw ConfigError("birka: max_sweeps must be at least 1");
  if (cfg.max_chain_len < 1) throw ConfigError("birka: max_chain_len must be at least 1");
  BirkaState state = init ? *init : birka_default_seed(sys, cfg.r, cfg.seed);
  const index_t r = state.order();
  if (r < 1 || r > n) throw ConfigError("birka: reduced order must be in [1, n]");
  if (static_cast<index_t>(state.nr.size()) != m || state.fr.rows() != r ||
      state.fr.cols() != m || state.cr.rows() != r || state.cr.cols() != sys.outputs())
    throw ConfigError("birka: initial state dimensions do not match the system");

  const Eigen::MatrixXd f_dense = sys.f.to_dense();
  const Eigen::MatrixXd c_dense = sys.c.to_dense();

  ReductionReport report;
  report.reduced_order = static_cast<int>(r);
  SidePrecond sides[2];
  std::mt19937_64 perturb_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);

  Eigen::VectorXcd lambda_prev = sorted_eigenvalues(state.kr);
  bool converged = false;
  int sweeps_done = 0;

  for (int z = 1; z <= cfg.max_sweeps && !converged; ++z) {
    RealSpectrum spec;
    if (!real_spectrum(state.kr, spec)) {
      // One nudge is allowed before giving up; a defective reduced matrix is
      // a measure-zero accident of the fixed-point path.
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      Eigen::MatrixXd nudged = state.kr;
      const double scale = 1e-8 * std::max(1.0, state.kr.norm());
      for (Eigen::Index j = 0; j < nudged.size(); ++j)
        nudged.data()[j] += scale * unit(perturb_rng);
      if (!real_spectrum(nudged, spec))
        throw SolverError("birka: reduced state matrix is not diagonalizable (sweep " +
                          std::to_string(z) + "), even after perturbation");
      state.kr = std::move(nudged);
      lambda_prev = sorted_eigenvalues(state.kr);
    }

    const Eigen::MatrixXd rinv_t = spec.basis_inv.transpose();
    const Eigen::MatrixXd f2 = state.fr.transpose() * rinv_t;   // m x r
    const Eigen::MatrixXd c2 = state.cr.transpose() * spec.basis;  // q x r
    std::vector<Eigen::MatrixXd> n2(static_cast<std::size_t>(m));
    for (index_t j = 0; j < m; ++j)
      n2[j] = spec.basis.transpose() * state.nr[j] * rinv_t;

    std::vector<KroneckerOperator::Coupler> v_couplers, w_couplers;
    v_couplers.reserve(static_cast<std::size_t>(m));
    w_couplers.reserve(static_cast<std::size_t>(m));
    for (index_t j = 0; j < m; ++j) {
      v_couplers.push_back({n2[j], sys.n_ops[j]});
      w_couplers.push_back({n2[j].transpose(), sys.n_ops[j].transpose()});
    }
    const KroneckerOperator ops[2] = {
        KroneckerOperator(spec.blocks, sys.k, std::move(v_couplers)),
        KroneckerOperator(spec.blocks, sys.k.transpose(), std::move(w_couplers))};
    const Eigen::MatrixXd rhs_mats[2] = {f_dense * f2, c_dense * c2};

    Eigen::MatrixXd bases[2];
    for (int side = 0; side < 2; ++side) {
      ReportRow row;
      row.sweep = z;
      row.point = side + 1;  // 1 = trial side, 2 = test side
      row.kind = PrecondKind::None;

      SidePrecond& sp = sides[side];
      LinearOp prec = identity_operator();
      bool have_explicit = false;
      SparseMatrix a_explicit;
      if (mode != PrecondMode::None && !sp.degraded) {
        try {
          a_explicit = assemble_explicit(ops[side], cfg.explicit_nnz_cap);
          have_explicit = true;
        } catch (const ConfigError& e) {
          sp.degraded = true;
          report.warnings.push_back(std::string(side == 0 ? "trial" : "test") +
                                    " side continues unpreconditioned: " + e.what());
        }
      }
      if (have_explicit) {
        switch (mode) {
          case PrecondMode::None:
            break;
          case PrecondMode::FreshSpai: {
            const SpaiResult built = spai_build(a_explicit, cfg.spai);
            sp.chain = PrecondChain(built.p, built.build_seconds);
            row.kind = PrecondKind::Fresh;
            row.precond_build_seconds = built.build_seconds;
            break;
          }
          case PrecondMode::ReuseChain: {
            if (sp.chain.empty() || sp.chain.length() + 1 > cfg.max_chain_len) {
              const SpaiResult built = spai_build(a_explicit, cfg.spai);
              sp.chain = PrecondChain(built.p, built.build_seconds);
              row.kind = PrecondKind::Fresh;
              row.precond_build_seconds = built.build_seconds;
            } else {
              UpdateFactor f = update_build(sp.prev_explicit, a_explicit, cfg.spai,
                                            UpdateDirection::Vertical,
                                            SweepPoint{z - 1, side + 1}, SweepPoint{z, side + 1});
              row.kind = PrecondKind::Vertical;
              row.precond_build_seconds = f.build_seconds;
              row.min_residual = f.min_residual;
              row.matrix_change = f.matrix_change;
              sp.chain = sp.chain.extended(std::make_shared<const UpdateFactor>(std::move(f)));
            }
            sp.prev_explicit = a_explicit;
            break;
          }
        }
        prec = sp.chain.as_operator();
        if (a_explicit.rows() <= cfg.standard_residual_max_dim)
          row.standard_residual = standard_residual(a_explicit, sp.chain);
      }

      const Eigen::Map<const Eigen::VectorXd> b(rhs_mats[side].data(), n * r);
      if (b.norm() == 0.0)
        throw SolverError(std::string("birka: zero right-hand side on the ") +
                          (side == 0 ? "trial" : "test") + " side (sweep " + std::to_string(z) +
                          "); input/output maps must be nonzero");
      const LinearOp a_op = [&op = ops[side]](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
        op.apply(in, out);
      };
      const GmresResult res = gmres_right_preconditioned(a_op, prec, b, cfg.gmres);
      row.solves = 1;
      row.gmres_iterations = res.report.iterations;
      row.gmres_seconds = res.report.solve_seconds;
      report.rows.push_back(row);
      if (!res.report.converged)
        throw SolverError(std::string("birka: gmres did not converge on the ") +
                          (side == 0 ? "trial" : "test") + " side (sweep " + std::to_string(z) +
                          "; relative residual " +
                          shortest(res.report.final_residual /
                                   std::max(res.report.rhs_norm, 1e-300)) +
                          " after " + std::to_string(res.report.iterations) + " iterations)");
      bases[side] = thin_q(Eigen::Map<const Eigen::MatrixXd>(res.x.data(), n, r));
    }

    const Eigen::MatrixXd& v = bases[0];
    const Eigen::MatrixXd& w = bases[1];
    Eigen::FullPivLU<Eigen::MatrixXd> wtv(w.transpose() * v);
    if (!wtv.isInvertible())
      throw SolverError("birka: projection matrix (test basis^T trial basis) is singular at sweep " +
                        std::to_string(z));
    state.kr = wtv.solve(w.transpose() * sys.k.multiply(v));
    for (index_t j = 0; j < m; ++j)
      state.nr[j] = wtv.solve(w.transpose() * sys.n_ops[j].multiply(v));
    state.fr = wtv.solve(w.transpose() * f_dense);
    state.cr = v.transpose() * c_dense;
    state.v = v;
    state.w = w;
    sweeps_done = z;

    const Eigen::VectorXcd lambda_new = sorted_eigenvalues(state.kr);
    const double denom = std::max(lambda_prev.norm(), 1e-300);
    if ((lambda_new - lambda_prev).norm() / denom < cfg.tol) converged = true;
    lambda_prev = lambda_new;
  }

  state.lambda = lambda_prev;
  state.sweeps = sweeps_done;
  report.converged = converged;
  report.sweeps = sweeps_done;
  if (!converged)
    report.warnings.push_back("fixed point left unconverged after " +
                              std::to_string(sweeps_done) + " sweeps");
  return {std::move(state), std::move(report)};
}

}  // namespace morprec
