// SPDX-License-Identifier: Apache-2.0

#include "morprec/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "morprec/errors.hpp"

namespace morprec {

namespace {

[[noreturn]] void fail(const std::string& origin, long line, const std::string& what) {
  throw IoError(origin + ":" + std::to_string(line) + ": " + what);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

void put_double(std::ostream& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

SparseMatrix read_matrix_market(std::istream& in, const std::string& origin) {
  std::string line;
  long lineno = 0;

  if (!std::getline(in, line)) fail(origin, 1, "empty input");
  ++lineno;
  {
    std::istringstream head(line);
    std::string banner, object, format, field, symmetry;
    head >> banner >> object >> format >> field >> symmetry;
    if (lower(banner) != "%%matrixmarket" || lower(object) != "matrix")
      fail(origin, lineno, "expected '%%MatrixMarket matrix ...' header");
    if (lower(format) != "coordinate")
      fail(origin, lineno, "only coordinate format is supported");
    if (lower(field) != "real")
      fail(origin, lineno, "only real-valued matrices are supported");
    const std::string sym = lower(symmetry);
    if (sym != "general" && sym != "symmetric")
      fail(origin, lineno, "symmetry must be 'general' or 'symmetric'");
    if (sym == "symmetric") {
      // handled after the size line below
    }
    line = sym;
  }
  const bool symmetric = line == "symmetric";

  index_t nrows = 0, ncols = 0;
  long nnz = 0;
  while (true) {
    if (!std::getline(in, line)) fail(origin, lineno + 1, "missing size line");
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream sz(line);
    if (!(sz >> nrows >> ncols >> nnz) || nrows < 0 || ncols < 0 || nnz < 0)
      fail(origin, lineno, "malformed size line (want 'rows cols nnz')");
    break;
  }

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
  long seen = 0;
  while (seen < nnz) {
    if (!std::getline(in, line))
      fail(origin, lineno + 1,
           "unexpected end of file after " + std::to_string(seen) + " of " +
               std::to_string(nnz) + " entries");
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ent(line);
    index_t i = 0, j = 0;
    double v = 0.0;
    if (!(ent >> i >> j >> v)) fail(origin, lineno, "malformed entry (want 'row col value')");
    if (i < 1 || i > nrows || j < 1 || j > ncols)
      fail(origin, lineno, "entry index out of range");
    entries.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
    ++seen;
  }
  return SparseMatrix::from_triplets(nrows, ncols, entries);
}

SparseMatrix read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_matrix_market(in, path);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  for (index_t i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      out << (i + 1) << ' ' << (cols[k] + 1) << ' ';
      put_double(out, vals[k]);
      out << '\n';
    }
  }
}

void write_matrix_market_file(const std::string& path, const SparseMatrix& a) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_matrix_market(out, a);
  if (!out) throw IoError("write to '" + path + "' failed");
}

void write_matrix_market(std::ostream& out, const Eigen::MatrixXd& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.size() << '\n';
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out << (i + 1) << ' ' << (j + 1) << ' ';
      put_double(out, a(i, j));
      out << '\n';
    }
}

void write_matrix_market_file(const std::string& path, const Eigen::MatrixXd& a) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_matrix_market(out, a);
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace morprec
