// SPDX-License-Identifier: Apache-2.0

#include "morprec/orth.hpp"

#include <stdexcept>

namespace morprec {

OrthBasis::OrthBasis(index_t dim, index_t capacity)
    : dim_(dim), capacity_(capacity), store_(dim, capacity) {
  if (dim <= 0 || capacity <= 0)
    throw std::invalid_argument("orth: dimension and capacity must be positive");
}

index_t OrthBasis::append_block(const Eigen::MatrixXd& block, double drop_tol) {
  if (block.rows() != dim_)
    throw std::invalid_argument("orth: block row count mismatch");
  if (block.cols() == 0) return 0;

  // Leading singular value of the incoming block sets the deflation scale.
  const double scale =
      Eigen::JacobiSVD<Eigen::MatrixXd>(block).singularValues().coeff(0);
  if (scale == 0.0) return 0;
  const double cutoff = drop_tol * scale;

  index_t kept = 0;
  Eigen::VectorXd w(dim_);
  for (Eigen::Index c = 0; c < block.cols() && size_ < capacity_; ++c) {
    w = block.col(c);
    for (int pass = 0; pass < 2; ++pass)
      for (index_t j = 0; j < size_; ++j)
        w -= store_.col(j).dot(w) * store_.col(j);
    const double norm = w.norm();
    if (norm <= cutoff) continue;  // direction already represented
    store_.col(size_) = w / norm;
    ++size_;
    ++kept;
  }
  return kept;
}

}  // namespace morprec
