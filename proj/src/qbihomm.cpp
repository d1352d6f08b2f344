// SPDX-License-Identifier: Apache-2.0

#include "morprec/qbihomm.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "morprec/errors.hpp"
#include "morprec/format.hpp"
#include "morprec/orth.hpp"

namespace morprec {

QbSystem QbSystem::create(SparseMatrix d, SparseMatrix k, SparseMatrix n_op, SparseMatrix h,
                          SparseMatrix f, SparseMatrix c) {
  const index_t n = d.rows();
  if (d.cols() != n) throw ConfigError("quadratic-bilinear system: D must be square");
  if (k.rows() != n || k.cols() != n)
    throw ConfigError("quadratic-bilinear system: K must be n x n");
  if (n_op.rows() != n || n_op.cols() != n)
    throw ConfigError("quadratic-bilinear system: N must be n x n");
  if (h.rows() != n || h.cols() != n * n)
    throw ConfigError("quadratic-bilinear system: H must be n x n^2 (got " +
                      std::to_string(h.rows()) + " x " + std::to_string(h.cols()) + ")");
  if (f.rows() != n || f.cols() != 1)
    throw ConfigError("quadratic-bilinear system: F must be a single n-column (SISO)");
  if (c.rows() != n || c.cols() != 1)
    throw ConfigError("quadratic-bilinear system: C must be a single n-column (SISO)");
  QbSystem sys;
  sys.d = std::move(d);
  sys.k = std::move(k);
  sys.n_op = std::move(n_op);
  sys.h = std::move(h);
  sys.f = std::move(f);
  sys.c = std::move(c);
  return sys;
}

namespace {

constexpr int kTrialSide = 0;
constexpr int kTestSide = 1;

const char* side_name(int side) { return side == kTrialSide ? "trial" : "test"; }

struct SideResult {
  std::vector<Eigen::VectorXd> columns;
  std::vector<ReportRow> rows;
};

/// Runs one side's point loop: solve A_i x = rhs0, then A_i x = mat * x_prev
/// `depth` more times, with one preconditioner per point and an optional
/// horizontal chain across points.
SideResult run_side(int side, const std::vector<SparseMatrix>& a_mats, const SparseMatrix& mat,
                    const Eigen::VectorXd& rhs0, int depth, const QbConfig& cfg,
                    PrecondMode mode, const std::vector<double>& sigmas) {
  SideResult out;
  const index_t n = rhs0.size();
  PrecondChain chain;
  for (std::size_t i = 0; i < a_mats.size(); ++i) {
    const SparseMatrix& a = a_mats[i];
    ReportRow build_row;
    build_row.sweep = side + 1;  // 1 = trial side, 2 = test side
    build_row.point = static_cast<int>(i) + 1;
    build_row.kind = PrecondKind::None;

    LinearOp prec = identity_operator();
    switch (mode) {
      case PrecondMode::None:
        break;
      case PrecondMode::FreshSpai: {
        const SpaiResult built = spai_build(a, cfg.spai);
        chain = PrecondChain(built.p, built.build_seconds);
        build_row.kind = PrecondKind::Fresh;
        build_row.precond_build_seconds = built.build_seconds;
        prec = chain.as_operator();
        break;
      }
      case PrecondMode::ReuseChain: {
        if (i == 0 || chain.length() + 1 > cfg.max_chain_len) {
          const SpaiResult built = spai_build(a, cfg.spai);
          chain = PrecondChain(built.p, built.build_seconds);
          build_row.kind = PrecondKind::Fresh;
          build_row.precond_build_seconds = built.build_seconds;
        } else {
          UpdateFactor f =
              update_build(a_mats[i - 1], a, cfg.spai, UpdateDirection::Horizontal,
                           SweepPoint{side + 1, static_cast<int>(i)},
                           SweepPoint{side + 1, static_cast<int>(i) + 1});
          build_row.kind = PrecondKind::Horizontal;
          build_row.precond_build_seconds = f.build_seconds;
          build_row.min_residual = f.min_residual;
          build_row.matrix_change = f.matrix_change;
          chain = chain.extended(std::make_shared<const UpdateFactor>(std::move(f)));
        }
        prec = chain.as_operator();
        break;
      }
    }
    if (mode != PrecondMode::None && n <= cfg.standard_residual_max_dim)
      build_row.standard_residual = standard_residual(a, chain);

    const LinearOp a_op = matvec_operator(a);
    ReportRow moment_row;
    moment_row.sweep = build_row.sweep;
    moment_row.point = build_row.point;
    moment_row.kind = PrecondKind::ReusedSameMatrix;

    Eigen::VectorXd x = rhs0;
    for (int j = 0; j <= depth; ++j) {
      const Eigen::VectorXd rhs = j == 0 ? rhs0 : mat.multiply(x);
      if (rhs.norm() == 0.0) {
        x.setZero();
        out.columns.push_back(x);
        continue;
      }
      const GmresResult res = gmres_right_preconditioned(a_op, prec, rhs, cfg.gmres);
      ReportRow& row = j == 0 ? build_row : moment_row;
      ++row.solves;
      row.gmres_iterations += res.report.iterations;
      row.gmres_seconds += res.report.solve_seconds;
      if (!res.report.converged)
        throw SolverError(std::string("qbihomm: gmres did not converge on the ") +
                          side_name(side) + " side (sigma_" + std::to_string(i + 1) + " = " +
                          shortest(sigmas[i]) + ", moment " + std::to_string(j) +
                          "; the shifted matrix may be singular; relative residual " +
                          shortest(res.report.final_residual /
                                   std::max(res.report.rhs_norm, 1e-300)) +
                          ")");
      x = res.x;
      out.columns.push_back(x);
    }
    out.rows.push_back(build_row);
    if (moment_row.solves > 0) out.rows.push_back(moment_row);
  }
  return out;
}

}  // namespace

std::pair<ReducedQb, ReductionReport> qbihomm_reduce(const QbSystem& sys, const QbConfig& cfg,
                                                     PrecondMode mode) {
  const index_t n = sys.dim();
  if (cfg.sigmas.empty())
    throw ConfigError("qbihomm: at least one interpolation point is required");
  for (double s : cfg.sigmas)
    if (s == 0.0 || !std::isfinite(s))
      throw ConfigError("qbihomm: interpolation points must be nonzero and finite");
  for (std::size_t i = 0; i < cfg.sigmas.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.sigmas.size(); ++j)
      if (cfg.sigmas[i] == cfg.sigmas[j])
        throw ConfigError("qbihomm: interpolation points must be distinct");
  if (cfg.p_moments < 0 || cfg.q_moments < 0)
    throw ConfigError("qbihomm: moment depths must be nonnegative");
  if (cfg.max_chain_len < 1) throw ConfigError("qbihomm: max_chain_len must be at least 1");

  const std::size_t ell = cfg.sigmas.size();
  std::vector<SparseMatrix> a_trial, a_test;
  a_trial.reserve(ell);
  a_test.reserve(ell);
  for (double sigma : cfg.sigmas) {
    const std::pair<double, const SparseMatrix*> trial_terms[] = {{sigma, &sys.d},
                                                                  {-1.0, &sys.k}};
    a_trial.push_back(SparseMatrix::linear_combination(trial_terms));
    const std::pair<double, const SparseMatrix*> test_terms[] = {{2.0 * sigma, &sys.d},
                                                                 {-1.0, &sys.k}};
    a_test.push_back(SparseMatrix::linear_combination(test_terms).transpose());
  }

  const Eigen::VectorXd f_col = sys.f.to_dense().col(0);
  const Eigen::VectorXd c_col = sys.c.to_dense().col(0);
  const SparseMatrix d_t = sys.d.transpose();

  const SideResult trial = run_side(kTrialSide, a_trial, sys.d, f_col,
                                    cfg.p_moments + cfg.q_moments, cfg, mode, cfg.sigmas);
  const SideResult test =
      run_side(kTestSide, a_test, d_t, c_col, cfg.q_moments, cfg, mode, cfg.sigmas);

  ReductionReport report;
  report.rows = trial.rows;
  report.rows.insert(report.rows.end(), test.rows.begin(), test.rows.end());
  report.sweeps = 1;
  report.final_points = cfg.sigmas;

  const index_t capacity = static_cast<index_t>(trial.columns.size() + test.columns.size());
  OrthBasis basis(n, capacity);
  for (const Eigen::VectorXd& col : trial.columns) basis.append_block(col);
  for (const Eigen::VectorXd& col : test.columns) basis.append_block(col);
  if (basis.size() == 0)
    throw SolverError("qbihomm: the collected moment columns are all zero");
  const Eigen::MatrixXd u = basis.matrix();

  ReducedQb red;
  red.d = u.transpose() * sys.d.multiply(u);
  red.k = u.transpose() * sys.k.multiply(u);
  red.n_op = u.transpose() * sys.n_op.multiply(u);
  red.h = kron_compress_quadratic(sys.h, u);
  red.f = u.transpose() * f_col;
  red.c = u.transpose() * c_col;
  red.basis = u;

  report.converged = true;
  report.reduced_order = static_cast<int>(red.order());
  return {std::move(red), std::move(report)};
}

Eigen::MatrixXd kron_compress_quadratic(const SparseMatrix& h, const Eigen::MatrixXd& u) {
  const index_t n = u.rows();
  const index_t r = u.cols();
  if (h.rows() != n || h.cols() != n * n)
    throw std::invalid_argument("kron_compress_quadratic: H must be n x n^2 for U with n rows");

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r, r * r);
  if (r == 0) return out;
  Eigen::MatrixXd acc(r, r);
  Eigen::RowVectorXd flat(r * r);
  for (index_t a = 0; a < n; ++a) {
    const auto cols = h.row_cols(a);
    if (cols.empty()) continue;
    const auto vals = h.row_values(a);
    acc.setZero();
    for (std::size_t e = 0; e < cols.size(); ++e) {
      const index_t b = cols[e] / n;
      const index_t c = cols[e] % n;
      acc.noalias() += vals[e] * (u.row(b).transpose() * u.row(c));
    }
    // Flatten with the same pair encoding the input uses: (p, q) -> p*r + q.
    for (index_t p = 0; p < r; ++p)
      for (index_t q = 0; q < r; ++q) flat(p * r + q) = acc(p, q);
    out.noalias() += u.row(a).transpose() * flat;
  }
  return out;
}

}  // namespace morprec
