// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace morprec {

using index_t = std::int64_t;

struct Triplet {
  index_t row = 0;
  index_t col = 0;
  double value = 0.0;
};

/// Rows touched by a set of columns, gathered as a dense block. row_map is
/// strictly ascending and maps local block rows back to global rows.
struct ColumnSubmatrix {
  Eigen::MatrixXd block;
  std::vector<index_t> row_map;
};

/// Immutable real sparse matrix in compressed-row form. A column-compressed
/// shadow is built once at construction so column slices cost O(nnz(column)).
/// Copies share storage; every operation that would mutate returns a new
/// matrix instead.
class SparseMatrix {
public:
  SparseMatrix();

  /// Duplicate (row, col) entries are summed before construction. Entries
  /// summing to exactly zero are kept as stored zeros.
  static SparseMatrix from_triplets(index_t nrows, index_t ncols,
                                    std::span<const Triplet> entries);

  /// Takes validated CSR arrays. Throws std::invalid_argument when offsets are
  /// not nondecreasing, column indices are out of range or not strictly
  /// increasing within a row, or array lengths disagree.
  static SparseMatrix from_csr(index_t nrows, index_t ncols,
                               std::vector<index_t> row_offsets,
                               std::vector<index_t> col_indices,
                               std::vector<double> values);

  static SparseMatrix identity(index_t n);
  static SparseMatrix diagonal(const Eigen::VectorXd& entries);
  static SparseMatrix zero(index_t nrows, index_t ncols);

  /// sum_k coeff_k * M_k over a merged pattern. All terms must share
  /// dimensions; entries that cancel to exactly zero are dropped.
  static SparseMatrix linear_combination(
      std::span<const std::pair<double, const SparseMatrix*>> terms);

  index_t rows() const;
  index_t cols() const;
  index_t nnz() const;

  std::span<const index_t> row_offsets() const;
  std::span<const index_t> col_indices() const;
  std::span<const double> values() const;

  std::span<const index_t> row_cols(index_t i) const;
  std::span<const double> row_values(index_t i) const;

  /// Column slice via the shadow: global row indices (ascending) and values.
  std::span<const index_t> column_rows(index_t j) const;
  std::span<const double> column_values(index_t j) const;

  /// y = A x. Throws std::invalid_argument on dimension mismatch. The per-row
  /// reduction order is fixed, so results are bitwise reproducible.
  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;

  /// y = A^T x without materializing the transpose.
  Eigen::VectorXd multiply_transpose(const Eigen::VectorXd& x) const;

  /// A * X for a dense block X (column by column).
  Eigen::MatrixXd multiply(const Eigen::MatrixXd& x) const;

  double frobenius_norm() const;

  SparseMatrix transpose() const;

  /// Dense copy; guarded against accidental huge materializations.
  Eigen::MatrixXd to_dense(index_t max_entries = index_t{1} << 24) const;

  /// Gathers A(:, pattern) as a dense block over the union of touched rows.
  /// Throws std::invalid_argument on an empty pattern, an out-of-range index,
  /// or a repeated index.
  ColumnSubmatrix extract_column_submatrix(std::span<const index_t> pattern) const;

private:
  struct Data;
  explicit SparseMatrix(std::shared_ptr<const Data> data);
  std::shared_ptr<const Data> data_;
};

/// ||A - B||_F over the merged pattern.
double frobenius_distance(const SparseMatrix& a, const SparseMatrix& b);

}  // namespace morprec
