// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace morprec {

/// How the preconditioner used for a row's solves came to be.
enum class PrecondKind {
  None,              // unpreconditioned
  Fresh,             // approximate inverse built from scratch
  Horizontal,        // chain extended across points within a sweep
  Vertical,          // chain extended across sweeps at the first point
  ReusedSameMatrix,  // same matrix, same preconditioner, new right-hand sides
};

std::string_view to_string(PrecondKind kind);

inline constexpr double REPORT_NAN = std::numeric_limits<double>::quiet_NaN();

/// One (sweep, point, kind) group of solves. Quantities that do not apply
/// stay NaN and serialize as empty CSV cells.
struct ReportRow {
  int sweep = 0;
  int point = 0;
  PrecondKind kind = PrecondKind::None;
  int solves = 0;
  double precond_build_seconds = 0.0;
  long gmres_iterations = 0;
  double gmres_seconds = 0.0;
  double min_residual = REPORT_NAN;        // update objective at its minimizer
  double matrix_change = REPORT_NAN;       // ||A_prev - A_new||_F
  double standard_residual = REPORT_NAN;   // ||I - A P||_F / ||I||_F
  double first_approach_min_residual = REPORT_NAN;  // anchored-to-first comparison
};

struct ReportTotals {
  int solves = 0;
  double precond_build_seconds = 0.0;
  long gmres_iterations = 0;
  double gmres_seconds = 0.0;
};

struct ReductionReport {
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;
  bool converged = false;
  int reduced_order = 0;
  int sweeps = 0;
  std::vector<double> final_points;  // expansion/interpolation points of the result

  ReportTotals totals() const;
  /// Header, one line per row, then a TOTAL line whose numeric columns are
  /// the column sums.
  void write_csv(std::ostream& os) const;
};

}  // namespace morprec
