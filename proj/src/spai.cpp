// SPDX-License-Identifier: Apache-2.0

#include "morprec/spai.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "morprec/parallel.hpp"

namespace morprec {

namespace detail {

PatternSolve solve_pattern(const SparseMatrix& a, std::span<const index_t> pattern,
                           std::span<const index_t> rhs_rows,
                           std::span<const double> rhs_values) {
  ColumnSubmatrix sub = a.extract_column_submatrix(pattern);
  const auto& rows = sub.row_map;

  // Restrict the rhs to the touched rows; mass outside them is a fixed
  // residual contribution no coefficient can remove.
  Eigen::VectorXd rhs_local = Eigen::VectorXd::Zero(static_cast<index_t>(rows.size()));
  double outside_sq = 0.0;
  for (std::size_t k = 0; k < rhs_rows.size(); ++k) {
    const auto it = std::lower_bound(rows.begin(), rows.end(), rhs_rows[k]);
    if (it != rows.end() && *it == rhs_rows[k])
      rhs_local[it - rows.begin()] = rhs_values[k];
    else
      outside_sq += rhs_values[k] * rhs_values[k];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub.block);
  PatternSolve out;
  out.coeffs = qr.solve(rhs_local);
  out.rank_deficient = qr.rank() < static_cast<Eigen::Index>(pattern.size());
  const double local_sq = (rhs_local - sub.block * out.coeffs).squaredNorm();
  out.residual = std::sqrt(local_sq + outside_sq);
  return out;
}

std::vector<index_t> initial_pattern(const SparseMatrix& a, index_t col,
                                     const SpaiConfig& cfg) {
  std::vector<index_t> pattern;
  switch (cfg.pattern.kind) {
    case SpaiPattern::Kind::Diagonal:
      pattern.push_back(col);
      break;
    case SpaiPattern::Kind::PatternOfA: {
      const auto rows = a.column_rows(col);
      pattern.assign(rows.begin(), rows.end());
      break;
    }
    case SpaiPattern::Kind::PatternOfAPow: {
      // Structural support of column `col` of A^k, grown by k expansions.
      std::vector<index_t> frontier{col};
      std::vector<char> seen(static_cast<std::size_t>(a.rows()), 0);
      for (int step = 0; step < std::max(cfg.pattern.power, 1); ++step) {
        std::vector<index_t> next;
        for (index_t j : frontier)
          for (index_t i : a.column_rows(j))
            if (!seen[static_cast<std::size_t>(i)]) {
              seen[static_cast<std::size_t>(i)] = 1;
              next.push_back(i);
            }
        pattern.insert(pattern.end(), next.begin(), next.end());
        frontier = std::move(next);
        if (frontier.empty()) break;
      }
      break;
    }
  }
  pattern.push_back(col);  // the diagonal stays representable even when a_ii = 0
  std::sort(pattern.begin(), pattern.end());
  pattern.erase(std::unique(pattern.begin(), pattern.end()), pattern.end());
  if (static_cast<int>(pattern.size()) > cfg.max_fill_per_col) {
    // Deterministic truncation: keep the lowest indices plus the diagonal.
    std::vector<index_t> kept(pattern.begin(), pattern.begin() + cfg.max_fill_per_col);
    if (!std::binary_search(kept.begin(), kept.end(), col)) {
      kept.back() = col;
      std::sort(kept.begin(), kept.end());
    }
    pattern = std::move(kept);
  }
  return pattern;
}

AdaptiveOutcome adaptive_column(const SparseMatrix& a, index_t col,
                                std::span<const index_t> rhs_rows,
                                std::span<const double> rhs_values,
                                const SpaiConfig& cfg) {
  AdaptiveOutcome out;
  out.pattern = initial_pattern(a, col, cfg);

  double rhs_norm = 0.0;
  for (double v : rhs_values) rhs_norm += v * v;
  rhs_norm = std::sqrt(rhs_norm);
  const double threshold = cfg.fill_tol * rhs_norm;

  PatternSolve solve = solve_pattern(a, out.pattern, rhs_rows, rhs_values);

  for (int sweep = 0; sweep < cfg.max_pattern_sweeps; ++sweep) {
    if (solve.residual <= threshold) break;
    if (static_cast<int>(out.pattern.size()) >= cfg.max_fill_per_col) break;

    // Residual scatter over touched rows only.
    std::vector<index_t> touched(rhs_rows.begin(), rhs_rows.end());
    for (index_t j : out.pattern) {
      const auto rows = a.column_rows(j);
      touched.insert(touched.end(), rows.begin(), rows.end());
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

    std::vector<double> resid(touched.size(), 0.0);
    auto slot = [&](index_t row) {
      return std::lower_bound(touched.begin(), touched.end(), row) - touched.begin();
    };
    for (std::size_t k = 0; k < rhs_rows.size(); ++k)
      resid[static_cast<std::size_t>(slot(rhs_rows[k]))] += rhs_values[k];
    for (std::size_t c = 0; c < out.pattern.size(); ++c) {
      const auto rows = a.column_rows(out.pattern[c]);
      const auto vals = a.column_values(out.pattern[c]);
      for (std::size_t k = 0; k < rows.size(); ++k)
        resid[static_cast<std::size_t>(slot(rows[k]))] -= solve.coeffs[static_cast<Eigen::Index>(c)] * vals[k];
    }

    // Largest-magnitude residual row becomes the new pattern index; ties go
    // to the lowest index (ascending scan with a strict comparison). Rows
    // already in the pattern or with empty columns cannot help.
    index_t best = -1;
    double best_mag = 0.0;
    for (std::size_t k = 0; k < touched.size(); ++k) {
      const index_t row = touched[k];
      const double mag = std::abs(resid[k]);
      if (mag <= best_mag) continue;
      if (row >= a.cols()) continue;
      if (std::binary_search(out.pattern.begin(), out.pattern.end(), row)) continue;
      if (a.column_rows(row).empty()) continue;
      best = row;
      best_mag = mag;
    }
    if (best < 0) break;

    out.pattern.insert(std::lower_bound(out.pattern.begin(), out.pattern.end(), best), best);
    solve = solve_pattern(a, out.pattern, rhs_rows, rhs_values);
  }

  out.coeffs = std::move(solve.coeffs);
  out.residual = solve.residual;
  out.rank_deficient = solve.rank_deficient;
  return out;
}

}  // namespace detail

SpaiColumn spai_column_solve(const SparseMatrix& a, index_t col,
                             std::span<const index_t> pattern) {
  if (col < 0 || col >= a.cols())
    throw std::invalid_argument("spai_column_solve: column out of range");
  std::vector<index_t> sorted(pattern.begin(), pattern.end());
  std::sort(sorted.begin(), sorted.end());
  const index_t unit_row[] = {col};
  const double unit_val[] = {1.0};
  detail::PatternSolve solve = detail::solve_pattern(a, sorted, unit_row, unit_val);
  SpaiColumn out;
  out.rows = std::move(sorted);
  out.values.assign(solve.coeffs.data(), solve.coeffs.data() + solve.coeffs.size());
  out.residual = solve.residual;
  out.rank_deficient = solve.rank_deficient;
  return out;
}

SpaiResult spai_build(const SparseMatrix& a, const SpaiConfig& cfg) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("spai_build: matrix must be square");
  if (cfg.fill_tol < 0.0 || cfg.max_fill_per_col < 1 || cfg.max_pattern_sweeps < 0)
    throw std::invalid_argument("spai_build: invalid configuration");
  const auto t0 = std::chrono::steady_clock::now();
  const index_t n = a.rows();

  struct ColumnOut {
    std::vector<index_t> rows;
    std::vector<double> values;
    double residual = 0.0;
    bool fallback = false;
  };
  std::vector<ColumnOut> columns(static_cast<std::size_t>(n));

  parallel_for(0, n, cfg.threads, [&](index_t col) {
    const index_t unit_row[] = {col};
    const double unit_val[] = {1.0};
    detail::AdaptiveOutcome got = detail::adaptive_column(a, col, unit_row, unit_val, cfg);
    ColumnOut& slot = columns[static_cast<std::size_t>(col)];
    if (got.rank_deficient) {
      // Diagonal fallback keeps the column bounded; residual recomputed for
      // the substituted column.
      slot.fallback = true;
      double diag = 0.0;
      const auto rows = a.column_rows(col);
      const auto vals = a.column_values(col);
      for (std::size_t k = 0; k < rows.size(); ++k)
        if (rows[k] == col) diag = vals[k];
      const double coeff = diag != 0.0 ? 1.0 / diag : 1.0;
      slot.rows = {col};
      slot.values = {coeff};
      double sq = 0.0;
      bool hit_unit = false;
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const double e = (rows[k] == col ? 1.0 : 0.0) - coeff * vals[k];
        if (rows[k] == col) hit_unit = true;
        sq += e * e;
      }
      if (!hit_unit) sq += 1.0;
      slot.residual = std::sqrt(sq);
      return;
    }
    slot.rows = std::move(got.pattern);
    slot.values.assign(got.coeffs.data(), got.coeffs.data() + got.coeffs.size());
    slot.residual = got.residual;
  });

  std::vector<Triplet> entries;
  SpaiResult result;
  result.column_residuals.resize(static_cast<std::size_t>(n));
  for (index_t col = 0; col < n; ++col) {
    const ColumnOut& slot = columns[static_cast<std::size_t>(col)];
    for (std::size_t k = 0; k < slot.rows.size(); ++k)
      entries.push_back({slot.rows[k], col, slot.values[k]});
    result.column_residuals[static_cast<std::size_t>(col)] = slot.residual;
    if (slot.fallback) ++result.fallback_count;
  }
  result.p = SparseMatrix::from_triplets(n, n, entries);
  result.build_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace morprec
