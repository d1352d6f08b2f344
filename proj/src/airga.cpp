// SPDX-License-Identifier: Apache-2.0

#include "morprec/airga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>

#include "morprec/errors.hpp"
#include "morprec/format.hpp"
#include "morprec/h2.hpp"
#include "morprec/orth.hpp"

namespace morprec {

namespace {

void check_square(const SparseMatrix& a, index_t n, const char* name) {
  if (a.rows() != n || a.cols() != n)
    throw ConfigError(std::string("second-order system: ") + name + " must be " +
                      std::to_string(n) + "x" + std::to_string(n));
}

StateSpace to_state_space(const ReducedSecondOrder& red) {
  return second_order_to_state_space(red.m, red.d, red.k, red.f, red.c);
}

/// Relative H2 gap with an absolute floor of 1: small models compare
/// absolutely, large ones relatively. Infinite when either model is unstable.
double h2_gap(const StateSpace& prev, const StateSpace& next) {
  const double dist = h2_distance(prev, next);
  if (!std::isfinite(dist)) return std::numeric_limits<double>::infinity();
  const double scale = h2_norm(next);
  if (!std::isfinite(scale)) return std::numeric_limits<double>::infinity();
  return dist / std::max(1.0, scale);
}

}  // namespace

SecondOrderSystem SecondOrderSystem::create(SparseMatrix m, SparseMatrix d, SparseMatrix k,
                                            SparseMatrix f, SparseMatrix c, double alpha,
                                            double beta) {
  const index_t n = m.rows();
  check_square(m, n, "M");
  check_square(d, n, "D");
  check_square(k, n, "K");
  if (f.rows() != n || f.cols() < 1)
    throw ConfigError("second-order system: F must have n rows and at least one column");
  if (c.rows() != n || c.cols() < 1)
    throw ConfigError("second-order system: C must have n rows and at least one column");
  SecondOrderSystem sys;
  sys.m = std::move(m);
  sys.d = std::move(d);
  sys.k = std::move(k);
  sys.f = std::move(f);
  sys.c = std::move(c);
  sys.alpha = alpha;
  sys.beta = beta;
  return sys;
}

SecondOrderSystem SecondOrderSystem::with_proportional_damping(SparseMatrix m, SparseMatrix k,
                                                               SparseMatrix f, SparseMatrix c,
                                                               double alpha, double beta) {
  const std::pair<double, const SparseMatrix*> terms[] = {{alpha, &m}, {beta, &k}};
  SparseMatrix d = SparseMatrix::linear_combination(terms);
  return create(std::move(m), std::move(d), std::move(k), std::move(f), std::move(c), alpha,
                beta);
}

double SecondOrderSystem::proportional_defect() const {
  const std::pair<double, const SparseMatrix*> terms[] = {
      {1.0, &d}, {-alpha, &m}, {-beta, &k}};
  return SparseMatrix::linear_combination(terms).frobenius_norm();
}

SparseMatrix shifted_operator(const SecondOrderSystem& sys, double s) {
  if (!std::isfinite(s)) throw ConfigError("shifted_operator: s must be finite");
  const std::pair<double, const SparseMatrix*> terms[] = {
      {s * s, &sys.m}, {s, &sys.d}, {1.0, &sys.k}};
  return SparseMatrix::linear_combination(terms);
}

namespace {

struct SolveStats {
  int solves = 0;
  long iterations = 0;
  double seconds = 0.0;
};

/// Solves A X = rhs column by column with an optional sign flip, aborting
/// with solve coordinates on non-convergence. Zero columns short-circuit.
Eigen::MatrixXd solve_block(const LinearOp& a_op, const LinearOp& p_op,
                            const Eigen::MatrixXd& rhs, const GmresConfig& gmres, double sign,
                            int sweep, int point, int moment, SolveStats& stats) {
  Eigen::MatrixXd x(rhs.rows(), rhs.cols());
  for (Eigen::Index col = 0; col < rhs.cols(); ++col) {
    if (rhs.col(col).norm() == 0.0) {
      x.col(col).setZero();
      continue;
    }
    const GmresResult res = gmres_right_preconditioned(a_op, p_op, rhs.col(col), gmres);
    stats.iterations += res.report.iterations;
    stats.seconds += res.report.solve_seconds;
    ++stats.solves;
    if (!res.report.converged)
      throw SolverError("gmres did not converge (sweep " + std::to_string(sweep) + ", point " +
                        std::to_string(point) + ", moment " + std::to_string(moment) +
                        ", column " + std::to_string(col) + "; relative residual " +
                        shortest(res.report.final_residual /
                                 std::max(res.report.rhs_norm, 1e-300)) +
                        " after " + std::to_string(res.report.iterations) + " iterations)");
    x.col(col) = sign * res.x;
  }
  return x;
}

ReducedSecondOrder project(const SecondOrderSystem& sys, const Eigen::MatrixXd& v,
                           const Eigen::MatrixXd& f_dense, const Eigen::MatrixXd& c_dense) {
  ReducedSecondOrder red;
  red.m = v.transpose() * sys.m.multiply(v);
  red.d = v.transpose() * sys.d.multiply(v);
  red.k = v.transpose() * sys.k.multiply(v);
  red.f = v.transpose() * f_dense;
  red.c = v.transpose() * c_dense;
  red.basis = v;
  return red;
}

}  // namespace

std::pair<ReducedSecondOrder, ReductionReport> airga_reduce(const SecondOrderSystem& sys,
                                                            const AirgaConfig& cfg,
                                                            PrecondMode mode) {
  const index_t n = sys.dim();
  std::vector<double> points = cfg.expansion_points;
  if (points.empty()) throw ConfigError("airga: at least one expansion point is required");
  std::sort(points.begin(), points.end());
  for (double s : points)
    if (!(s > 0.0) || !std::isfinite(s))
      throw ConfigError("airga: expansion points must be positive and finite");
  if (std::adjacent_find(points.begin(), points.end()) != points.end())
    throw ConfigError("airga: expansion points must be distinct");
  const int ell = static_cast<int>(points.size());
  if (cfg.r_max < ell)
    throw ConfigError("airga: r_max (" + std::to_string(cfg.r_max) +
                      ") must be at least the number of expansion points (" +
                      std::to_string(ell) + ")");
  if (cfg.max_outer < 1) throw ConfigError("airga: max_outer must be at least 1");
  if (cfg.max_chain_len < 1) throw ConfigError("airga: max_chain_len must be at least 1");

  ReductionReport report;
  {
    const double dnorm = sys.d.frobenius_norm();
    const double defect = sys.proportional_defect();
    if (dnorm > 0.0 && defect > 1e-12 * dnorm)
      report.warnings.push_back(
          "damping deviates from alpha*M + beta*K (relative defect " +
          shortest(defect / dnorm) + "); reduction proceeds on D as given");
  }

  const Eigen::MatrixXd f_dense = sys.f.to_dense();
  const Eigen::MatrixXd c_dense = sys.c.to_dense();

  // Vertical-reuse anchors: the chain and matrix at the previous sweep's
  // first point.
  PrecondChain prev_first_chain;
  SparseMatrix prev_first_matrix;
  SparseMatrix very_first_matrix;  // anchor for the compare_first_approach column

  ReducedSecondOrder model;
  StateSpace prev_ss;
  bool have_prev_model = false;
  bool converged = false;
  int sweeps_done = 0;
  std::vector<double> final_points = points;

  for (int z = 1; z <= cfg.max_outer; ++z) {
    OrthBasis basis(n, cfg.r_max);
    std::vector<SparseMatrix> a_ops;
    a_ops.reserve(static_cast<std::size_t>(ell));
    for (double s : points) a_ops.push_back(shifted_operator(sys, s));
    if (z == 1 && mode == PrecondMode::ReuseChain && cfg.compare_first_approach)
      very_first_matrix = a_ops[0];

    std::vector<PrecondChain> chains(static_cast<std::size_t>(ell));
    std::vector<LinearOp> precs(static_cast<std::size_t>(ell));
    std::vector<Eigen::MatrixXd> blocks(static_cast<std::size_t>(ell));

    for (int i = 0; i < ell; ++i) {
      ReportRow row;
      row.sweep = z;
      row.point = i + 1;

      switch (mode) {
        case PrecondMode::None:
          precs[i] = identity_operator();
          row.kind = PrecondKind::None;
          break;
        case PrecondMode::FreshSpai: {
          const SpaiResult built = spai_build(a_ops[static_cast<std::size_t>(i)], cfg.spai);
          chains[i] = PrecondChain(built.p, built.build_seconds);
          precs[i] = chains[i].as_operator();
          row.kind = PrecondKind::Fresh;
          row.precond_build_seconds = built.build_seconds;
          break;
        }
        case PrecondMode::ReuseChain: {
          const bool first_ever = z == 1 && i == 0;
          const PrecondChain* parent =
              i == 0 ? (z == 1 ? nullptr : &prev_first_chain) : &chains[i - 1];
          if (first_ever || parent->length() + 1 > cfg.max_chain_len) {
            const SpaiResult built = spai_build(a_ops[static_cast<std::size_t>(i)], cfg.spai);
            chains[i] = PrecondChain(built.p, built.build_seconds);
            row.kind = PrecondKind::Fresh;
            row.precond_build_seconds = built.build_seconds;
          } else {
            const SparseMatrix& a_prev =
                i == 0 ? prev_first_matrix : a_ops[static_cast<std::size_t>(i - 1)];
            const UpdateDirection dir =
                i == 0 ? UpdateDirection::Vertical : UpdateDirection::Horizontal;
            const SweepPoint from = i == 0 ? SweepPoint{z - 1, 1} : SweepPoint{z, i};
            UpdateFactor f = update_build(a_prev, a_ops[static_cast<std::size_t>(i)], cfg.spai,
                                          dir, from, SweepPoint{z, i + 1});
            row.kind = dir == UpdateDirection::Vertical ? PrecondKind::Vertical
                                                        : PrecondKind::Horizontal;
            row.precond_build_seconds = f.build_seconds;
            row.min_residual = f.min_residual;
            row.matrix_change = f.matrix_change;
            chains[i] = parent->extended(std::make_shared<const UpdateFactor>(std::move(f)));
            if (cfg.compare_first_approach) {
              const SparseMatrix& anchor =
                  dir == UpdateDirection::Horizontal ? a_ops[0] : very_first_matrix;
              row.first_approach_min_residual =
                  update_build(anchor, a_ops[static_cast<std::size_t>(i)], cfg.spai, dir, from,
                               SweepPoint{z, i + 1})
                      .min_residual;
            }
          }
          precs[i] = chains[i].as_operator();
          break;
        }
      }

      SolveStats stats;
      const LinearOp a_op = matvec_operator(a_ops[static_cast<std::size_t>(i)]);
      blocks[i] = solve_block(a_op, precs[i], f_dense, cfg.gmres, 1.0, z, i + 1, 0, stats);
      row.solves = stats.solves;
      row.gmres_iterations = stats.iterations;
      row.gmres_seconds = stats.seconds;
      if (mode != PrecondMode::None && n <= cfg.standard_residual_max_dim)
        row.standard_residual = standard_residual(a_ops[static_cast<std::size_t>(i)], chains[i]);
      report.rows.push_back(row);
    }

    for (int i = 0; i < ell; ++i) basis.append_block(blocks[i]);

    ReducedSecondOrder red = project(sys, basis.matrix(), f_dense, c_dense);
    StateSpace red_ss = to_state_space(red);

    std::vector<ReportRow> moment_rows(static_cast<std::size_t>(ell));
    for (int i = 0; i < ell; ++i) {
      moment_rows[i].sweep = z;
      moment_rows[i].point = i + 1;
      moment_rows[i].kind = PrecondKind::ReusedSameMatrix;
    }

    for (int j = 1; !basis.full(); ++j) {
      bool appended = false;
      for (int i = 0; i < ell && !basis.full(); ++i) {
        const Eigen::MatrixXd rhs = sys.m.multiply(blocks[i]);
        SolveStats stats;
        const LinearOp a_op = matvec_operator(a_ops[static_cast<std::size_t>(i)]);
        blocks[i] = solve_block(a_op, precs[i], rhs, cfg.gmres, -1.0, z, i + 1, j, stats);
        moment_rows[i].solves += stats.solves;
        moment_rows[i].gmres_iterations += stats.iterations;
        moment_rows[i].gmres_seconds += stats.seconds;
        if (basis.append_block(blocks[i]) > 0) appended = true;
      }
      if (!appended) break;  // no new directions left at these points

      ReducedSecondOrder next = project(sys, basis.matrix(), f_dense, c_dense);
      StateSpace next_ss = to_state_space(next);
      const double gap = h2_gap(red_ss, next_ss);
      red = std::move(next);
      red_ss = std::move(next_ss);
      if (gap <= cfg.inner_tol) break;
    }
    if (basis.full() && cfg.r_max > ell)
      report.warnings.push_back("sweep " + std::to_string(z) +
                                ": basis reached r_max before inner convergence");
    for (const ReportRow& r : moment_rows)
      if (r.solves > 0) report.rows.push_back(r);

    sweeps_done = z;
    model = std::move(red);
    final_points = points;

    if (have_prev_model && h2_gap(prev_ss, red_ss) <= cfg.outer_tol) {
      converged = true;
      break;
    }
    prev_ss = std::move(red_ss);
    have_prev_model = true;

    if (mode == PrecondMode::ReuseChain) {
      prev_first_chain = chains[0];
      prev_first_matrix = a_ops[0];
    }
    if (z < cfg.max_outer)
      points = update_expansion_points(model.m, model.d, model.k, points);
  }

  report.converged = converged;
  report.reduced_order = static_cast<int>(model.order());
  report.sweeps = sweeps_done;
  report.final_points = final_points;
  if (!converged)
    report.warnings.push_back("outer loop left unconverged after " +
                              std::to_string(sweeps_done) + " sweeps");
  return {std::move(model), std::move(report)};
}

std::vector<double> update_expansion_points(const Eigen::MatrixXd& m, const Eigen::MatrixXd& d,
                                            const Eigen::MatrixXd& k,
                                            const std::vector<double>& current) {
  const std::size_t want = current.size();
  if (want == 0) return {};
  const Eigen::Index r = m.rows();
  if (r == 0) return current;

  const Eigen::MatrixXd zero_in = Eigen::MatrixXd::Zero(r, 1);
  const StateSpace ss = second_order_to_state_space(m, d, k, zero_in, zero_in);
  Eigen::EigenSolver<Eigen::MatrixXd> es(ss.a);
  if (es.info() != Eigen::Success) return current;
  const Eigen::VectorXcd lam = es.eigenvalues();

  // Closest-to-axis eigenvalues dominate the response; visit them first.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(lam.size()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ra = std::abs(lam[a].real());
    const double rb = std::abs(lam[b].real());
    if (ra != rb) return ra < rb;
    return std::abs(lam[a].imag()) > std::abs(lam[b].imag());
  });

  std::vector<double> next;
  double max_s = 0.0;
  for (Eigen::Index idx : order) {
    if (next.size() >= want) break;
    const std::complex<double> l = lam[idx];
    double s = std::abs(l.imag());
    if (s <= 1e-12 * std::abs(l)) s = std::abs(l);
    if (!(s > 0.0) || !std::isfinite(s)) continue;
    bool close = false;
    const double spacing = 1e-6 * std::max({max_s, s, 1.0});
    for (double have : next)
      if (std::abs(have - s) <= spacing) {
        close = true;
        break;
      }
    if (close) continue;
    next.push_back(s);
    max_s = std::max(max_s, s);
  }
  // Pad from the current points when the pencil was too degenerate.
  for (double s : current) {
    if (next.size() >= want) break;
    bool close = false;
    for (double have : next)
      if (std::abs(have - s) <= 1e-6 * std::max({max_s, s, 1.0})) {
        close = true;
        break;
      }
    if (!close) next.push_back(s);
  }
  std::sort(next.begin(), next.end());
  return next;
}

std::vector<double> transfer_function_error(const SecondOrderSystem& sys,
                                            const ReducedSecondOrder& red,
                                            const std::vector<double>& s_grid,
                                            const TransferErrorConfig& cfg) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> errors(s_grid.size(), nan);
  const Eigen::MatrixXd f_dense = sys.f.to_dense();
  const Eigen::MatrixXd c_dense = sys.c.to_dense();

  PrecondChain chain;
  SparseMatrix chain_matrix;
  for (std::size_t g = 0; g < s_grid.size(); ++g) {
    const double s = s_grid[g];
    if (!(s > 0.0) || !std::isfinite(s)) continue;
    const SparseMatrix a = shifted_operator(sys, s);

    LinearOp prec = identity_operator();
    switch (cfg.mode) {
      case PrecondMode::None:
        break;
      case PrecondMode::FreshSpai:
        prec = PrecondChain(spai_build(a, cfg.spai).p).as_operator();
        break;
      case PrecondMode::ReuseChain: {
        if (chain.empty() || chain.length() + 1 > cfg.max_chain_len) {
          chain = PrecondChain(spai_build(a, cfg.spai).p);
        } else {
          UpdateFactor f = update_build(chain_matrix, a, cfg.spai, UpdateDirection::Horizontal);
          chain = chain.extended(std::make_shared<const UpdateFactor>(std::move(f)));
        }
        chain_matrix = a;
        prec = chain.as_operator();
        break;
      }
    }

    const LinearOp a_op = matvec_operator(a);
    Eigen::MatrixXd x(sys.dim(), sys.inputs());
    bool ok = true;
    for (Eigen::Index col = 0; col < f_dense.cols() && ok; ++col) {
      if (f_dense.col(col).norm() == 0.0) {
        x.col(col).setZero();
        continue;
      }
      const GmresResult res = gmres_right_preconditioned(a_op, prec, f_dense.col(col), cfg.gmres);
      if (!res.report.converged) ok = false;
      x.col(col) = res.x;
    }
    if (!ok) continue;
    const Eigen::MatrixXd h = c_dense.transpose() * x;

    const Eigen::MatrixXd ar = s * s * red.m + s * red.d + red.k;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(ar);
    if (!lu.isInvertible()) continue;
    const Eigen::MatrixXd hr = red.c.transpose() * lu.solve(red.f);

    const double denom = h.norm();
    if (denom == 0.0) continue;
    errors[g] = (h - hr).norm() / denom;
  }
  return errors;
}

}  // namespace morprec
