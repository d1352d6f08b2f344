// SPDX-License-Identifier: Apache-2.0

#include "morprec/report.hpp"

#include <cmath>
#include <ostream>

namespace morprec {

std::string_view to_string(PrecondKind kind) {
  switch (kind) {
    case PrecondKind::None:
      return "none";
    case PrecondKind::Fresh:
      return "fresh";
    case PrecondKind::Horizontal:
      return "horizontal";
    case PrecondKind::Vertical:
      return "vertical";
    case PrecondKind::ReusedSameMatrix:
      return "reused_same_matrix";
  }
  return "unknown";
}

ReportTotals ReductionReport::totals() const {
  ReportTotals t;
  for (const ReportRow& r : rows) {
    t.solves += r.solves;
    t.precond_build_seconds += r.precond_build_seconds;
    t.gmres_iterations += r.gmres_iterations;
    t.gmres_seconds += r.gmres_seconds;
  }
  return t;
}

namespace {

void put_metric(std::ostream& os, double v) {
  os << ',';
  if (!std::isnan(v)) os << v;
}

}  // namespace

void ReductionReport::write_csv(std::ostream& os) const {
  os << "sweep,point,precond,solves,precond_build_seconds,gmres_iterations,"
        "gmres_seconds,min_residual,matrix_change,standard_residual,"
        "first_approach_min_residual\n";
  for (const ReportRow& r : rows) {
    os << r.sweep << ',' << r.point << ',' << to_string(r.kind) << ','
       << r.solves << ',' << r.precond_build_seconds << ','
       << r.gmres_iterations << ',' << r.gmres_seconds;
    put_metric(os, r.min_residual);
    put_metric(os, r.matrix_change);
    put_metric(os, r.standard_residual);
    put_metric(os, r.first_approach_min_residual);
    os << '\n';
  }
  const ReportTotals t = totals();
  os << "TOTAL,," << ',' << t.solves << ',' << t.precond_build_seconds << ','
     << t.gmres_iterations << ',' << t.gmres_seconds << ",,,,\n";
}

}  // namespace morprec
