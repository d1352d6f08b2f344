// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "morprec/sparse.hpp"

namespace morprec {

/// Reads a coordinate-format file: header
///   %%MatrixMarket matrix coordinate real general|symmetric
/// then comments, the size line, and 1-based (row, col, value) triples.
/// Symmetric files are expanded to full storage; duplicate entries are
/// summed. Malformed input throws IoError naming `origin` and the line.
SparseMatrix read_matrix_market(std::istream& in, const std::string& origin = "<stream>");
SparseMatrix read_matrix_market_file(const std::string& path);

/// Writes coordinate/real/general with stored entries in row-major order and
/// shortest round-trip decimal values, so write-then-read is exact.
void write_matrix_market(std::ostream& out, const SparseMatrix& a);
void write_matrix_market_file(const std::string& path, const SparseMatrix& a);

/// Dense blocks (reduced models) go through the same grammar with every
/// entry stored, zeros included, so the shape always survives the trip.
void write_matrix_market(std::ostream& out, const Eigen::MatrixXd& a);
void write_matrix_market_file(const std::string& path, const Eigen::MatrixXd& a);

}  // namespace morprec
