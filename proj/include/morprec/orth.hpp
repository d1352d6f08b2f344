// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "morprec/sparse.hpp"

namespace morprec {

/// Growing orthonormal basis with rank-tolerance deflation. Columns are added
/// by two-pass modified Gram-Schmidt; a column whose orthogonal remainder
/// falls below drop_tol times the incoming block's leading singular value is
/// dropped instead of appended. Deterministic for fixed inputs.
class OrthBasis {
public:
  OrthBasis(index_t dim, index_t capacity);

  index_t dim() const { return dim_; }
  index_t size() const { return size_; }
  index_t capacity() const { return capacity_; }
  bool full() const { return size_ >= capacity_; }

  /// View of the current basis (dim x size).
  Eigen::Ref<const Eigen::MatrixXd> matrix() const { return store_.leftCols(size_); }

  /// Appends as many block columns as capacity allows; returns how many were
  /// kept (dropped columns do not count).
  index_t append_block(const Eigen::MatrixXd& block, double drop_tol = 1e-10);

private:
  index_t dim_ = 0;
  index_t capacity_ = 0;
  index_t size_ = 0;
  Eigen::MatrixXd store_;
};

}  // namespace morprec
