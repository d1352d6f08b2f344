// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "morprec/airga.hpp"
#include "morprec/birka.hpp"
#include "morprec/qbihomm.hpp"
#include "morprec/report.hpp"

namespace morprec {

/// Linearly spaced frequency grid; the solvers see s = 2*pi*f.
struct GridSpec {
  double f_min = 1.0;
  double f_max = 500.0;
  int count = 200;
};

std::vector<double> linear_grid(const GridSpec& grid);

/// Writes "frequency,relative_error" rows; failed evaluations print "nan".
void write_error_curve(std::ostream& out, const std::vector<double>& frequencies,
                       const std::vector<double>& errors);

/// Each run_* orchestrates one reduction end to end: run the algorithm,
/// write <prefix>_report.csv, the reduced matrices as <prefix>_reduced_*.mtx,
/// and (for the second-order run) <prefix>_error_curve.csv under out_dir,
/// then print a short summary to `log`. An empty out_dir skips all files.
/// Filesystem problems throw IoError; solver failures propagate.

ReductionReport run_airga_bench(const SecondOrderSystem& sys, const AirgaConfig& cfg,
                                PrecondMode mode, const GridSpec& error_grid,
                                const std::string& out_dir, std::ostream& log);

ReductionReport run_birka_bench(const BilinearSystem& sys, const BirkaConfig& cfg,
                                PrecondMode mode, const std::string& out_dir, std::ostream& log);

ReductionReport run_qbihomm_bench(const QbSystem& sys, const QbConfig& cfg, PrecondMode mode,
                                  const std::string& out_dir, std::ostream& log);

/// Pure solve-sequence benchmark: one GMRES solve A(s_i) x = F e_1 per
/// point, preconditioned per mode (reuse extends one horizontal chain along
/// the sequence). Unlike the reductions, non-convergence is recorded, not
/// thrown, so the modes can be compared on hard sequences.
struct SpaiBenchResult {
  ReductionReport report;
  int failed_solves = 0;
};

SpaiBenchResult run_spai_bench(const SecondOrderSystem& sys, const std::vector<double>& points,
                               const SpaiConfig& spai, const GmresConfig& gmres,
                               PrecondMode mode, int max_chain_len, const std::string& out_dir,
                               std::ostream& log);

}  // namespace morprec
