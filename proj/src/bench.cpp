// SPDX-License-Identifier: Apache-2.0

#include "morprec/bench.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <string>
#include <system_error>
#include <utility>

#include "morprec/errors.hpp"
#include "morprec/format.hpp"
#include "morprec/matrix_market.hpp"

namespace morprec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir + ": cannot create output directory: " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_report_file(const std::string& path, const ReductionReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  report.write_csv(out);
  if (!out) throw IoError(path + ": write failed");
}

void log_summary(std::ostream& log, const std::string& algo, const ReductionReport& report) {
  const ReportTotals t = report.totals();
  log << algo << ": reduced order " << report.reduced_order << ", sweeps " << report.sweeps
      << ", " << (report.converged ? "converged" : "NOT converged") << "\n";
  log << algo << ": solves " << t.solves << ", precond build " << t.precond_build_seconds
      << " s, gmres " << t.gmres_iterations << " iterations in " << t.gmres_seconds << " s\n";
  if (!report.final_points.empty()) {
    log << algo << ": final points";
    for (double p : report.final_points) log << ' ' << p;
    log << "\n";
  }
  for (const std::string& w : report.warnings) log << algo << ": warning: " << w << "\n";
}

}  // namespace

std::vector<double> linear_grid(const GridSpec& grid) {
  if (grid.count < 1) throw ConfigError("grid: count must be at least 1");
  if (!(grid.f_min > 0.0) || !(grid.f_max >= grid.f_min))
    throw ConfigError("grid: need 0 < f_min <= f_max");
  std::vector<double> f(static_cast<std::size_t>(grid.count));
  if (grid.count == 1) {
    f[0] = grid.f_min;
    return f;
  }
  const double step = (grid.f_max - grid.f_min) / (grid.count - 1);
  for (int i = 0; i < grid.count; ++i) f[static_cast<std::size_t>(i)] = grid.f_min + step * i;
  return f;
}

void write_error_curve(std::ostream& out, const std::vector<double>& frequencies,
                       const std::vector<double>& errors) {
  if (frequencies.size() != errors.size())
    throw std::invalid_argument("error curve: frequency and error counts differ");
  out << "frequency,relative_error\n";
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    out << shortest(frequencies[i]) << ',';
    if (std::isnan(errors[i]))
      out << "nan";
    else
      out << shortest(errors[i]);
    out << '\n';
  }
}

ReductionReport run_airga_bench(const SecondOrderSystem& sys, const AirgaConfig& cfg,
                                PrecondMode mode, const GridSpec& error_grid,
                                const std::string& out_dir, std::ostream& log) {
  auto [red, report] = airga_reduce(sys, cfg, mode);
  log_summary(log, "airga", report);

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_report_file(join(out_dir, "airga_report.csv"), report);
    write_matrix_market_file(join(out_dir, "airga_reduced_m.mtx"), red.m);
    write_matrix_market_file(join(out_dir, "airga_reduced_d.mtx"), red.d);
    write_matrix_market_file(join(out_dir, "airga_reduced_k.mtx"), red.k);
    write_matrix_market_file(join(out_dir, "airga_reduced_f.mtx"), red.f);
    write_matrix_market_file(join(out_dir, "airga_reduced_c.mtx"), red.c);

    const std::vector<double> freq = linear_grid(error_grid);
    std::vector<double> s_grid(freq.size());
    for (std::size_t i = 0; i < freq.size(); ++i) s_grid[i] = kTwoPi * freq[i];
    TransferErrorConfig tcfg;
    tcfg.gmres = cfg.gmres;
    tcfg.spai = cfg.spai;
    tcfg.mode = mode;
    tcfg.max_chain_len = cfg.max_chain_len;
    const std::vector<double> errors = transfer_function_error(sys, red, s_grid, tcfg);
    const std::string curve_path = join(out_dir, "airga_error_curve.csv");
    std::ofstream curve(curve_path);
    if (!curve) throw IoError(curve_path + ": cannot open for writing");
    write_error_curve(curve, freq, errors);
    if (!curve) throw IoError(curve_path + ": write failed");
    log << "airga: wrote report, reduced matrices, and error curve under " << out_dir << "\n";
  }
  return report;
}

ReductionReport run_birka_bench(const BilinearSystem& sys, const BirkaConfig& cfg,
                                PrecondMode mode, const std::string& out_dir,
                                std::ostream& log) {
  auto [state, report] = birka_reduce(sys, cfg, mode);
  log_summary(log, "birka", report);

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_report_file(join(out_dir, "birka_report.csv"), report);
    write_matrix_market_file(join(out_dir, "birka_reduced_k.mtx"), state.kr);
    for (std::size_t j = 0; j < state.nr.size(); ++j)
      write_matrix_market_file(join(out_dir, "birka_reduced_n" + std::to_string(j + 1) + ".mtx"),
                               state.nr[j]);
    write_matrix_market_file(join(out_dir, "birka_reduced_f.mtx"), state.fr);
    write_matrix_market_file(join(out_dir, "birka_reduced_c.mtx"), state.cr);
    log << "birka: wrote report and reduced matrices under " << out_dir << "\n";
  }
  return report;
}

ReductionReport run_qbihomm_bench(const QbSystem& sys, const QbConfig& cfg, PrecondMode mode,
                                  const std::string& out_dir, std::ostream& log) {
  auto [red, report] = qbihomm_reduce(sys, cfg, mode);
  log_summary(log, "qbihomm", report);

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_report_file(join(out_dir, "qbihomm_report.csv"), report);
    write_matrix_market_file(join(out_dir, "qbihomm_reduced_d.mtx"), red.d);
    write_matrix_market_file(join(out_dir, "qbihomm_reduced_k.mtx"), red.k);
    write_matrix_market_file(join(out_dir, "qbihomm_reduced_n.mtx"), red.n_op);
    write_matrix_market_file(join(out_dir, "qbihomm_reduced_h.mtx"), red.h);
    write_matrix_market_file(join(out_dir, "qbihomm_reduced_f.mtx"), red.f);
    write_matrix_market_file(join(out_dir, "qbihomm_reduced_c.mtx"), red.c);
    log << "qbihomm: wrote report and reduced matrices under " << out_dir << "\n";
  }
  return report;
}

SpaiBenchResult run_spai_bench(const SecondOrderSystem& sys, const std::vector<double>& points,
                               const SpaiConfig& spai, const GmresConfig& gmres,
                               PrecondMode mode, int max_chain_len, const std::string& out_dir,
                               std::ostream& log) {
  if (points.empty()) throw ConfigError("spai-bench: at least one point is required");
  for (double s : points)
    if (!(s > 0.0) || !std::isfinite(s))
      throw ConfigError("spai-bench: points must be positive and finite");
  if (max_chain_len < 1) throw ConfigError("spai-bench: max_chain_len must be at least 1");

  SpaiBenchResult result;
  const Eigen::MatrixXd f_dense = sys.f.to_dense();
  if (f_dense.cols() < 1 || f_dense.col(0).norm() == 0.0)
    throw ConfigError("spai-bench: the first input column must be nonzero");
  const Eigen::VectorXd b = f_dense.col(0);

  PrecondChain chain;
  SparseMatrix prev;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SparseMatrix a = shifted_operator(sys, points[i]);
    ReportRow row;
    row.sweep = 1;
    row.point = static_cast<int>(i) + 1;
    row.kind = PrecondKind::None;

    LinearOp prec = identity_operator();
    switch (mode) {
      case PrecondMode::None:
        break;
      case PrecondMode::FreshSpai: {
        const SpaiResult built = spai_build(a, spai);
        chain = PrecondChain(built.p, built.build_seconds);
        row.kind = PrecondKind::Fresh;
        row.precond_build_seconds = built.build_seconds;
        prec = chain.as_operator();
        break;
      }
      case PrecondMode::ReuseChain: {
        if (i == 0 || chain.length() + 1 > max_chain_len) {
          const SpaiResult built = spai_build(a, spai);
          chain = PrecondChain(built.p, built.build_seconds);
          row.kind = PrecondKind::Fresh;
          row.precond_build_seconds = built.build_seconds;
        } else {
          UpdateFactor f = update_build(prev, a, spai, UpdateDirection::Horizontal,
                                        SweepPoint{1, static_cast<int>(i)},
                                        SweepPoint{1, static_cast<int>(i) + 1});
          row.kind = PrecondKind::Horizontal;
          row.precond_build_seconds = f.build_seconds;
          row.min_residual = f.min_residual;
          row.matrix_change = f.matrix_change;
          chain = chain.extended(std::make_shared<const UpdateFactor>(std::move(f)));
        }
        prec = chain.as_operator();
        break;
      }
    }
    prev = a;
    if (mode != PrecondMode::None && sys.dim() <= 5000)
      row.standard_residual = standard_residual(a, chain);

    const GmresResult res = gmres_right_preconditioned(matvec_operator(a), prec, b, gmres);
    row.solves = 1;
    row.gmres_iterations = res.report.iterations;
    row.gmres_seconds = res.report.solve_seconds;
    result.report.rows.push_back(row);
    if (!res.report.converged) {
      ++result.failed_solves;
      result.report.warnings.push_back(
          "solve at point " + std::to_string(i + 1) + " (s = " + shortest(points[i]) +
          ") did not converge: relative residual " +
          shortest(res.report.final_residual / std::max(res.report.rhs_norm, 1e-300)) +
          " after " + std::to_string(res.report.iterations) + " iterations");
    }
  }
  result.report.converged = result.failed_solves == 0;
  result.report.sweeps = 1;
  result.report.final_points = points;

  log_summary(log, "spai-bench", result.report);
  if (result.failed_solves > 0)
    log << "spai-bench: " << result.failed_solves << " of " << points.size()
        << " solves did not converge\n";

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_report_file(join(out_dir, "spai_bench_report.csv"), result.report);
    log << "spai-bench: wrote report under " << out_dir << "\n";
  }
  return result;
}

}  // namespace morprec
