// SPDX-License-Identifier: Apache-2.0

#include "morprec/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace morprec {

struct SparseMatrix::Data {
  index_t nrows = 0;
  index_t ncols = 0;
  std::vector<index_t> row_offsets;   // nrows + 1
  std::vector<index_t> col_indices;   // nnz, strictly increasing per row
  std::vector<double> values;         // nnz
  // Column-compressed shadow, built once; row indices ascending per column.
  std::vector<index_t> col_offsets;   // ncols + 1
  std::vector<index_t> shadow_rows;   // nnz
  std::vector<double> shadow_values;  // nnz

  static void build_shadow(Data& d);
  static void validate_csr(const Data& d);
};

void SparseMatrix::Data::build_shadow(SparseMatrix::Data& d) {
  const index_t nnz = static_cast<index_t>(d.col_indices.size());
  d.col_offsets.assign(static_cast<std::size_t>(d.ncols) + 1, 0);
  for (index_t k = 0; k < nnz; ++k) ++d.col_offsets[static_cast<std::size_t>(d.col_indices[static_cast<std::size_t>(k)]) + 1];
  for (index_t j = 0; j < d.ncols; ++j)
    d.col_offsets[static_cast<std::size_t>(j) + 1] += d.col_offsets[static_cast<std::size_t>(j)];
  d.shadow_rows.resize(static_cast<std::size_t>(nnz));
  d.shadow_values.resize(static_cast<std::size_t>(nnz));
  std::vector<index_t> cursor(d.col_offsets.begin(), d.col_offsets.end() - 1);
  // Row-major traversal fills each column with ascending row indices.
  for (index_t i = 0; i < d.nrows; ++i) {
    for (index_t k = d.row_offsets[static_cast<std::size_t>(i)];
         k < d.row_offsets[static_cast<std::size_t>(i) + 1]; ++k) {
      const index_t j = d.col_indices[static_cast<std::size_t>(k)];
      const index_t slot = cursor[static_cast<std::size_t>(j)]++;
      d.shadow_rows[static_cast<std::size_t>(slot)] = i;
      d.shadow_values[static_cast<std::size_t>(slot)] = d.values[static_cast<std::size_t>(k)];
    }
  }
}

void SparseMatrix::Data::validate_csr(const SparseMatrix::Data& d) {
  if (d.nrows < 0 || d.ncols < 0)
    throw std::invalid_argument("sparse: negative dimension");
  if (d.row_offsets.size() != static_cast<std::size_t>(d.nrows) + 1)
    throw std::invalid_argument("sparse: row_offsets length must be nrows + 1");
  if (d.row_offsets.front() != 0)
    throw std::invalid_argument("sparse: row_offsets must start at 0");
  if (d.col_indices.size() != d.values.size())
    throw std::invalid_argument("sparse: col_indices and values lengths differ");
  if (d.row_offsets.back() != static_cast<index_t>(d.col_indices.size()))
    throw std::invalid_argument("sparse: row_offsets must end at nnz");
  for (index_t i = 0; i < d.nrows; ++i) {
    const index_t lo = d.row_offsets[static_cast<std::size_t>(i)];
    const index_t hi = d.row_offsets[static_cast<std::size_t>(i) + 1];
    if (hi < lo) throw std::invalid_argument("sparse: row_offsets must be nondecreasing");
    index_t prev = -1;
    for (index_t k = lo; k < hi; ++k) {
      const index_t j = d.col_indices[static_cast<std::size_t>(k)];
      if (j < 0 || j >= d.ncols)
        throw std::invalid_argument("sparse: column index out of range in row " + std::to_string(i));
      if (j <= prev)
        throw std::invalid_argument(
            "sparse: column indices must be strictly increasing in row " + std::to_string(i));
      prev = j;
    }
  }
}

SparseMatrix::SparseMatrix() : SparseMatrix(zero(0, 0).data_) {}

SparseMatrix::SparseMatrix(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

SparseMatrix SparseMatrix::from_triplets(index_t nrows, index_t ncols,
                                         std::span<const Triplet> entries) {
  if (nrows < 0 || ncols < 0) throw std::invalid_argument("sparse: negative dimension");
  std::vector<Triplet> sorted(entries.begin(), entries.end());
  for (const Triplet& t : sorted) {
    if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
      throw std::invalid_argument("sparse: triplet index out of range");
  }
  std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  auto d = std::make_shared<Data>();
  d->nrows = nrows;
  d->ncols = ncols;
  d->row_offsets.assign(static_cast<std::size_t>(nrows) + 1, 0);
  d->col_indices.reserve(sorted.size());
  d->values.reserve(sorted.size());
  std::size_t p = 0;
  while (p < sorted.size()) {
    const index_t r = sorted[p].row;
    const index_t c = sorted[p].col;
    double sum = 0.0;
    while (p < sorted.size() && sorted[p].row == r && sorted[p].col == c) {
      sum += sorted[p].value;  // duplicates are summed at ingestion
      ++p;
    }
    d->col_indices.push_back(c);
    d->values.push_back(sum);
    ++d->row_offsets[static_cast<std::size_t>(r) + 1];
  }
  for (index_t i = 0; i < nrows; ++i)
    d->row_offsets[static_cast<std::size_t>(i) + 1] += d->row_offsets[static_cast<std::size_t>(i)];
  Data::build_shadow(*d);
  return SparseMatrix(std::move(d));
}

SparseMatrix SparseMatrix::from_csr(index_t nrows, index_t ncols,
                                    std::vector<index_t> row_offsets,
                                    std::vector<index_t> col_indices,
                                    std::vector<double> values) {
  auto d = std::make_shared<Data>();
  d->nrows = nrows;
  d->ncols = ncols;
  d->row_offsets = std::move(row_offsets);
  d->col_indices = std::move(col_indices);
  d->values = std::move(values);
  Data::validate_csr(*d);
  Data::build_shadow(*d);
  return SparseMatrix(std::move(d));
}

SparseMatrix SparseMatrix::identity(index_t n) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n));
  for (index_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, t);
}

SparseMatrix SparseMatrix::diagonal(const Eigen::VectorXd& entries) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(entries.size()));
  for (index_t i = 0; i < entries.size(); ++i) t.push_back({i, i, entries[i]});
  return from_triplets(entries.size(), entries.size(), t);
}

SparseMatrix SparseMatrix::zero(index_t nrows, index_t ncols) {
  if (nrows < 0 || ncols < 0) throw std::invalid_argument("sparse: negative dimension");
  auto d = std::make_shared<Data>();
  d->nrows = nrows;
  d->ncols = ncols;
  d->row_offsets.assign(static_cast<std::size_t>(nrows) + 1, 0);
  Data::build_shadow(*d);
  return SparseMatrix(std::move(d));
}

SparseMatrix SparseMatrix::linear_combination(
    std::span<const std::pair<double, const SparseMatrix*>> terms) {
  if (terms.empty()) throw std::invalid_argument("linear_combination: no terms");
  const index_t nrows = terms.front().second->rows();
  const index_t ncols = terms.front().second->cols();
  for (const auto& [coeff, mat] : terms) {
    (void)coeff;
    if (mat->rows() != nrows || mat->cols() != ncols)
      throw std::invalid_argument("linear_combination: dimension mismatch");
  }

  auto d = std::make_shared<Data>();
  d->nrows = nrows;
  d->ncols = ncols;
  d->row_offsets.assign(static_cast<std::size_t>(nrows) + 1, 0);
  // Merge the sorted rows of every term; k-way walk keeps columns ordered.
  std::vector<std::pair<index_t, double>> merged;
  for (index_t i = 0; i < nrows; ++i) {
    merged.clear();
    for (const auto& [coeff, mat] : terms) {
      const auto cols = mat->row_cols(i);
      const auto vals = mat->row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k)
        merged.emplace_back(cols[k], coeff * vals[k]);
    }
    std::sort(merged.begin(), merged.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t p = 0;
    while (p < merged.size()) {
      const index_t j = merged[p].first;
      double sum = 0.0;
      while (p < merged.size() && merged[p].first == j) {
        sum += merged[p].second;
        ++p;
      }
      if (sum != 0.0) {
        d->col_indices.push_back(j);
        d->values.push_back(sum);
        ++d->row_offsets[static_cast<std::size_t>(i) + 1];
      }
    }
  }
  for (index_t i = 0; i < nrows; ++i)
    d->row_offsets[static_cast<std::size_t>(i) + 1] += d->row_offsets[static_cast<std::size_t>(i)];
  Data::build_shadow(*d);
  return SparseMatrix(std::move(d));
}

index_t SparseMatrix::rows() const { return data_->nrows; }
index_t SparseMatrix::cols() const { return data_->ncols; }
index_t SparseMatrix::nnz() const { return static_cast<index_t>(data_->values.size()); }

std::span<const index_t> SparseMatrix::row_offsets() const { return data_->row_offsets; }
std::span<const index_t> SparseMatrix::col_indices() const { return data_->col_indices; }
std::span<const double> SparseMatrix::values() const { return data_->values; }

std::span<const index_t> SparseMatrix::row_cols(index_t i) const {
  const auto lo = static_cast<std::size_t>(data_->row_offsets[static_cast<std::size_t>(i)]);
  const auto hi = static_cast<std::size_t>(data_->row_offsets[static_cast<std::size_t>(i) + 1]);
  return {data_->col_indices.data() + lo, hi - lo};
}

std::span<const double> SparseMatrix::row_values(index_t i) const {
  const auto lo = static_cast<std::size_t>(data_->row_offsets[static_cast<std::size_t>(i)]);
  const auto hi = static_cast<std::size_t>(data_->row_offsets[static_cast<std::size_t>(i) + 1]);
  return {data_->values.data() + lo, hi - lo};
}

std::span<const index_t> SparseMatrix::column_rows(index_t j) const {
  const auto lo = static_cast<std::size_t>(data_->col_offsets[static_cast<std::size_t>(j)]);
  const auto hi = static_cast<std::size_t>(data_->col_offsets[static_cast<std::size_t>(j) + 1]);
  return {data_->shadow_rows.data() + lo, hi - lo};
}

std::span<const double> SparseMatrix::column_values(index_t j) const {
  const auto lo = static_cast<std::size_t>(data_->col_offsets[static_cast<std::size_t>(j)]);
  const auto hi = static_cast<std::size_t>(data_->col_offsets[static_cast<std::size_t>(j) + 1]);
  return {data_->shadow_values.data() + lo, hi - lo};
}

void SparseMatrix::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  if (x.size() != data_->ncols)
    throw std::invalid_argument("sparse multiply: dimension mismatch");
  y.resize(data_->nrows);
  const auto& off = data_->row_offsets;
  const auto& cols = data_->col_indices;
  const auto& vals = data_->values;
  for (index_t i = 0; i < data_->nrows; ++i) {
    double acc = 0.0;
    for (index_t k = off[static_cast<std::size_t>(i)]; k < off[static_cast<std::size_t>(i) + 1]; ++k)
      acc += vals[static_cast<std::size_t>(k)] * x[cols[static_cast<std::size_t>(k)]];
    y[i] = acc;
  }
}

Eigen::VectorXd SparseMatrix::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y;
  multiply(x, y);
  return y;
}

Eigen::VectorXd SparseMatrix::multiply_transpose(const Eigen::VectorXd& x) const {
  if (x.size() != data_->nrows)
    throw std::invalid_argument("sparse multiply_transpose: dimension mismatch");
  Eigen::VectorXd y(data_->ncols);
  for (index_t j = 0; j < data_->ncols; ++j) {
    const auto rows = column_rows(j);
    const auto vals = column_values(j);
    double acc = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) acc += vals[k] * x[rows[k]];
    y[j] = acc;
  }
  return y;
}

Eigen::MatrixXd SparseMatrix::multiply(const Eigen::MatrixXd& x) const {
  if (x.rows() != data_->ncols)
    throw std::invalid_argument("sparse multiply: dimension mismatch");
  Eigen::MatrixXd y(data_->nrows, x.cols());
  Eigen::VectorXd column;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    multiply(x.col(c), column);
    y.col(c) = column;
  }
  return y;
}

double SparseMatrix::frobenius_norm() const {
  double sum = 0.0;
  for (double v : data_->values) sum += v * v;
  return std::sqrt(sum);
}

SparseMatrix SparseMatrix::transpose() const {
  auto d = std::make_shared<Data>();
  d->nrows = data_->ncols;
  d->ncols = data_->nrows;
  // The shadow of A is exactly the CSR form of A^T.
  d->row_offsets = data_->col_offsets;
  d->col_indices = data_->shadow_rows;
  d->values = data_->shadow_values;
  Data::build_shadow(*d);
  return SparseMatrix(std::move(d));
}

Eigen::MatrixXd SparseMatrix::to_dense(index_t max_entries) const {
  if (data_->nrows * data_->ncols > max_entries)
    throw std::invalid_argument("sparse to_dense: matrix too large to materialize");
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(data_->nrows, data_->ncols);
  for (index_t i = 0; i < data_->nrows; ++i) {
    const auto cols = row_cols(i);
    const auto vals = row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) dense(i, cols[k]) = vals[k];
  }
  return dense;
}

ColumnSubmatrix SparseMatrix::extract_column_submatrix(std::span<const index_t> pattern) const {
  if (pattern.empty())
    throw std::invalid_argument("extract_column_submatrix: empty pattern");
  for (index_t j : pattern)
    if (j < 0 || j >= data_->ncols)
      throw std::invalid_argument("extract_column_submatrix: column index out of range");

  ColumnSubmatrix out;
  out.row_map.reserve(pattern.size() * 8);
  for (index_t j : pattern) {
    const auto rows = column_rows(j);
    out.row_map.insert(out.row_map.end(), rows.begin(), rows.end());
  }
  std::sort(out.row_map.begin(), out.row_map.end());
  out.row_map.erase(std::unique(out.row_map.begin(), out.row_map.end()), out.row_map.end());

  std::vector<index_t> seen(pattern.begin(), pattern.end());
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw std::invalid_argument("extract_column_submatrix: repeated pattern index");

  out.block = Eigen::MatrixXd::Zero(static_cast<index_t>(out.row_map.size()),
                                    static_cast<index_t>(pattern.size()));
  for (std::size_t c = 0; c < pattern.size(); ++c) {
    const auto rows = column_rows(pattern[c]);
    const auto vals = column_values(pattern[c]);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto it = std::lower_bound(out.row_map.begin(), out.row_map.end(), rows[k]);
      out.block(it - out.row_map.begin(), static_cast<index_t>(c)) = vals[k];
    }
  }
  return out;
}

double frobenius_distance(const SparseMatrix& a, const SparseMatrix& b) {
  const std::pair<double, const SparseMatrix*> terms[] = {{1.0, &a}, {-1.0, &b}};
  return SparseMatrix::linear_combination(terms).frobenius_norm();
}

}  // namespace morprec
