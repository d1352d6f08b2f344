// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "morprec/sparse.hpp"

namespace morprec {

/// Initial sparsity pattern for approximate-inverse columns. The diagonal
/// index is always included, so the identity stays representable.
struct SpaiPattern {
  enum class Kind { Diagonal, PatternOfA, PatternOfAPow };
  Kind kind = Kind::PatternOfA;
  int power = 2;  // used by PatternOfAPow only

  static SpaiPattern diagonal() { return {Kind::Diagonal, 0}; }
  static SpaiPattern pattern_of_a() { return {Kind::PatternOfA, 0}; }
  static SpaiPattern pattern_of_a_pow(int k) { return {Kind::PatternOfAPow, k}; }
};

struct SpaiConfig {
  SpaiPattern pattern{};
  /// Per-column target: augment while ||rhs - A q||_2 > fill_tol * ||rhs||_2.
  /// Unit right-hand sides make this coincide with an absolute tolerance.
  double fill_tol = 1e-4;
  int max_fill_per_col = 50;   // pattern size cap per column
  int max_pattern_sweeps = 3;  // augmentation rounds per column
  int threads = 1;
};

/// One column of an approximate inverse: P(rows, col) = values.
struct SpaiColumn {
  std::vector<index_t> rows;
  std::vector<double> values;
  double residual = 0.0;        // full ||e_col - A p||_2
  bool rank_deficient = false;  // QR saw a rank-deficient local block
};

struct SpaiResult {
  SparseMatrix p;
  std::vector<double> column_residuals;
  index_t fallback_count = 0;  // columns replaced by the diagonal fallback
  double build_seconds = 0.0;
};

/// Right approximate inverse minimizing ||I - A P||_F column by column:
/// min ||e_i - A p_i||_2 over the configured pattern, dense QR per column,
/// adaptive augmentation by the largest-magnitude residual row (ties toward
/// the lowest index). Columns are independent; solve order and thread count
/// do not change the result. Rank-deficient local blocks fall back to
/// 1/a_ii on the diagonal (or a unit column when a_ii = 0) and are counted.
SpaiResult spai_build(const SparseMatrix& a, const SpaiConfig& cfg = {});

/// Single fixed-pattern column solve (no augmentation, no fallback): the
/// least-squares minimizer of ||e_col - A p||_2 supported on `pattern`, and
/// its residual.
SpaiColumn spai_column_solve(const SparseMatrix& a, index_t col,
                             std::span<const index_t> pattern);

namespace detail {

struct PatternSolve {
  Eigen::VectorXd coeffs;
  double residual = 0.0;
  bool rank_deficient = false;
};

/// min ||rhs - A(:, pattern) q||_2 for a sparse rhs; the residual includes
/// the rhs mass on rows the pattern cannot reach.
PatternSolve solve_pattern(const SparseMatrix& a, std::span<const index_t> pattern,
                           std::span<const index_t> rhs_rows,
                           std::span<const double> rhs_values);

struct AdaptiveOutcome {
  std::vector<index_t> pattern;  // ascending
  Eigen::VectorXd coeffs;
  double residual = 0.0;
  bool rank_deficient = false;
};

std::vector<index_t> initial_pattern(const SparseMatrix& a, index_t col,
                                     const SpaiConfig& cfg);

/// Shared adaptive column loop for approximate inverses (rhs = e_col) and
/// update factors (rhs = a column of the previous matrix).
AdaptiveOutcome adaptive_column(const SparseMatrix& a, index_t col,
                                std::span<const index_t> rhs_rows,
                                std::span<const double> rhs_values,
                                const SpaiConfig& cfg);

}  // namespace detail

}  // namespace morprec
