// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "morprec/bench.hpp"
#include "morprec/errors.hpp"
#include "morprec/generator.hpp"
#include "morprec/matrix_market.hpp"
#include "morprec/sparse.hpp"

using morprec::ConfigError;
using morprec::GridSpec;
using morprec::linear_grid;
using morprec::PrecondMode;
using morprec::SparseMatrix;

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

#ifdef MORPREC_CLI_PATH
int run_cli(const std::string& args) {
  const std::string cmd = std::string(MORPREC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}
#endif

}  // namespace

TEST_CASE("linear grid spans the range inclusively") {
  const auto g = linear_grid(GridSpec{2.0, 10.0, 5});
  REQUIRE(g.size() == 5);
  CHECK(g.front() == doctest::Approx(2.0));
  CHECK(g[2] == doctest::Approx(6.0));
  CHECK(g.back() == doctest::Approx(10.0));

  const auto single = linear_grid(GridSpec{3.0, 3.0, 1});
  REQUIRE(single.size() == 1);
  CHECK(single[0] == doctest::Approx(3.0));

  CHECK_THROWS_AS(linear_grid(GridSpec{1.0, 2.0, 0}), ConfigError);
  CHECK_THROWS_AS(linear_grid(GridSpec{0.0, 2.0, 3}), ConfigError);
  CHECK_THROWS_AS(linear_grid(GridSpec{5.0, 2.0, 3}), ConfigError);
}

TEST_CASE("error curve rows carry nan for failed points") {
  std::ostringstream out;
  morprec::write_error_curve(out, {1.0, 2.0, 3.0},
                             {0.5, std::nan(""), 0.25});
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "frequency,relative_error");
  std::getline(in, line);
  CHECK(line.rfind("1", 0) == 0);
  std::getline(in, line);
  CHECK(line.find("nan") != std::string::npos);
  std::getline(in, line);
  CHECK(line.find("0.25") != std::string::npos);
}

TEST_CASE("generators are deterministic in the seed") {
  const auto a = morprec::generate_disc_brake_like(32, 6.28, 5e-2, 5e-6, 9);
  const auto b = morprec::generate_disc_brake_like(32, 6.28, 5e-2, 5e-6, 9);
  CHECK(morprec::frobenius_distance(a.m, b.m) == 0.0);
  CHECK(morprec::frobenius_distance(a.d, b.d) == 0.0);
  CHECK(morprec::frobenius_distance(a.k, b.k) == 0.0);
  CHECK(morprec::frobenius_distance(a.f, b.f) == 0.0);
  CHECK(morprec::frobenius_distance(a.c, b.c) == 0.0);

  const auto c = morprec::generate_disc_brake_like(32, 6.28, 5e-2, 5e-6, 10);
  CHECK(morprec::frobenius_distance(a.k, c.k) > 0.0);

  const auto t1 = morprec::generate_bilinear_toy(12, 2, 4);
  const auto t2 = morprec::generate_bilinear_toy(12, 2, 4);
  CHECK(morprec::frobenius_distance(t1.k, t2.k) == 0.0);
  CHECK(morprec::frobenius_distance(t1.n_ops[1], t2.n_ops[1]) == 0.0);

  const auto q1 = morprec::generate_qb_toy(10, 4);
  const auto q2 = morprec::generate_qb_toy(10, 4);
  CHECK(morprec::frobenius_distance(q1.h, q2.h) == 0.0);
  CHECK(q1.h.rows() == 10);
  CHECK(q1.h.cols() == 100);
}

TEST_CASE("generator damping and rotation terms behave") {
  // alpha = beta = 0 leaves the damping identically zero.
  const auto undamped = morprec::generate_disc_brake_like(24, 6.28, 0.0, 0.0, 2);
  CHECK(undamped.d.nnz() == 0);

  // The rotation speed enters only through the diagonal geometric term.
  const auto still = morprec::generate_disc_brake_like(24, 0.0, 5e-2, 5e-6, 2);
  const auto spinning = morprec::generate_disc_brake_like(24, 3.0, 5e-2, 5e-6, 2);
  const std::pair<double, const SparseMatrix*> terms[] = {{1.0, &spinning.k},
                                                          {-1.0, &still.k}};
  const auto diff = SparseMatrix::linear_combination(terms);
  const auto dd = diff.to_dense();
  CHECK((dd - Eigen::MatrixXd(dd.diagonal().asDiagonal())).norm() <= 1e-12 * dd.norm());
  CHECK(dd.diagonal().minCoeff() > 0.0);

  CHECK_THROWS_AS(morprec::generate_disc_brake_like(3, 6.28, 5e-2, 5e-6, 2), ConfigError);
}

TEST_CASE("spai bench records failures instead of throwing") {
  const auto sys = morprec::generate_disc_brake_like(64, 6.28, 5e-2, 5e-6, 5);
  const std::vector<double> points = {6.28, 80.0, 300.0};

  morprec::GmresConfig starved;
  starved.rel_tol = 1e-6;
  starved.max_iter = 3;
  std::ostringstream log;
  const auto bad = morprec::run_spai_bench(sys, points, morprec::SpaiConfig{}, starved,
                                           PrecondMode::None, 16, "", log);
  CHECK(bad.failed_solves == 3);
  CHECK_FALSE(bad.report.converged);

  morprec::GmresConfig ok;
  ok.rel_tol = 1e-8;
  ok.max_iter = 500;
  const auto dir = fresh_dir("morprec-spai-bench-test");
  const auto good = morprec::run_spai_bench(sys, points, morprec::SpaiConfig{}, ok,
                                            PrecondMode::ReuseChain, 16, dir.string(), log);
  CHECK(good.failed_solves == 0);
  CHECK(good.report.converged);
  REQUIRE(good.report.rows.size() == 3);
  CHECK(good.report.rows[0].kind == morprec::PrecondKind::Fresh);
  CHECK(good.report.rows[1].kind == morprec::PrecondKind::Horizontal);
  CHECK(good.report.rows[2].kind == morprec::PrecondKind::Horizontal);

  const fs::path csv = dir / "spai_bench_report.csv";
  REQUIRE(fs::exists(csv));
  CHECK(first_line(csv).rfind("sweep,point,precond", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("report csv has one row per entry plus header and totals") {
  const auto sys = morprec::generate_disc_brake_like(48, 6.28, 5e-2, 5e-6, 6);
  morprec::AirgaConfig cfg;
  cfg.expansion_points = {6.28, 100.0};
  cfg.r_max = 6;
  cfg.max_outer = 1;
  std::ostringstream log;
  const auto dir = fresh_dir("morprec-bench-files-test");
  const auto report =
      morprec::run_airga_bench(sys, cfg, PrecondMode::ReuseChain, GridSpec{1.0, 100.0, 4},
                               dir.string(), log);

  const fs::path csv = dir / "airga_report.csv";
  REQUIRE(fs::exists(csv));
  CHECK(line_count(csv) == report.rows.size() + 2);

  const fs::path curve = dir / "airga_error_curve.csv";
  REQUIRE(fs::exists(curve));
  CHECK(line_count(curve) == 5);

  // Reduced matrices survive a write/read round trip.
  for (const char* name : {"airga_reduced_m.mtx", "airga_reduced_d.mtx", "airga_reduced_k.mtx",
                           "airga_reduced_f.mtx", "airga_reduced_c.mtx"}) {
    const fs::path p = dir / name;
    REQUIRE(fs::exists(p));
    const auto m = morprec::read_matrix_market_file(p.string());
    CHECK(m.rows() == report.reduced_order);
  }
  fs::remove_all(dir);

  // The summary log mentions the reduction outcome.
  CHECK(log.str().find("reduced order") != std::string::npos);
}

#ifdef MORPREC_CLI_PATH

TEST_CASE("cli generates ingestible models and round trips them") {
  const auto dir = fresh_dir("morprec-cli-gen-test");
  REQUIRE(run_cli("gen --model second-order --n 24 --seed 3 --out " + dir.string()) == 0);
  for (const char* name : {"m.mtx", "d.mtx", "k.mtx", "f.mtx", "c.mtx"})
    CHECK(fs::exists(dir / name));

  const auto out = fresh_dir("morprec-cli-airga-test");
  const std::string files = " --matrix-m " + (dir / "m.mtx").string() + " --matrix-d " +
                            (dir / "d.mtx").string() + " --matrix-k " + (dir / "k.mtx").string() +
                            " --matrix-f " + (dir / "f.mtx").string() + " --matrix-c " +
                            (dir / "c.mtx").string();
  REQUIRE(run_cli("airga" + files +
                  " --points 6.28 --points 200 --r-max 6 --max-outer 2 --grid-count 4 --out " +
                  out.string()) == 0);
  CHECK(fs::exists(out / "airga_report.csv"));
  CHECK(fs::exists(out / "airga_error_curve.csv"));
  CHECK(line_count(out / "airga_error_curve.csv") == 5);
  fs::remove_all(dir);
  fs::remove_all(out);
}

TEST_CASE("cli exit codes distinguish failure classes") {
  const auto out = fresh_dir("morprec-cli-exit-test");
  const std::string o = " --out " + out.string();

  // Unknown flags and bad values are configuration errors.
  CHECK(run_cli("airga --definitely-not-a-flag" + o) == 2);
  CHECK(run_cli("airga --n 24 --points=-5" + o) == 2);
  CHECK(run_cli("nonsense-subcommand") == 2);

  // Reading a missing matrix file is an io error.
  CHECK(run_cli("airga --matrix-m /nonexistent/m.mtx --matrix-d /nonexistent/d.mtx"
                " --matrix-k /nonexistent/k.mtx --matrix-f /nonexistent/f.mtx"
                " --matrix-c /nonexistent/c.mtx" + o) == 4);

  // A starved solver is a solver failure.
  CHECK(run_cli("airga --n 32 --precond none --gmres-max-iter 2 --max-outer 1 --r-max 4" + o) ==
        3);
  CHECK(run_cli("spai-bench --n 32 --precond none --gmres-max-iter 2" + o) == 3);

  // The bilinear and quadratic drivers run end to end.
  CHECK(run_cli("birka --n 8 --m 1 --r 2 --seed 1" + o) == 0);
  CHECK(fs::exists(out / "birka_report.csv"));
  CHECK(fs::exists(out / "birka_reduced_n1.mtx"));
  CHECK(run_cli("qbihomm --n 12 --sigmas 1 --sigmas 2" + o) == 0);
  CHECK(fs::exists(out / "qbihomm_report.csv"));
  fs::remove_all(out);
}

TEST_CASE("cli reads key value config files and rejects unknown keys") {
  const auto out = fresh_dir("morprec-cli-config-test");
  const fs::path good = out / "good.ini";
  {
    std::ofstream f(good);
    f << "n=24\ngrid-count=3\nr-max=6\nmax-outer=1\n";
  }
  REQUIRE(run_cli("airga --config " + good.string() + " --out " + out.string()) == 0);
  CHECK(line_count(out / "airga_error_curve.csv") == 4);  // header + grid-count rows

  const fs::path bad = out / "bad.ini";
  {
    std::ofstream f(bad);
    f << "n=24\nnot-an-option=1\n";
  }
  CHECK(run_cli("airga --config " + bad.string() + " --out " + out.string()) == 2);
  fs::remove_all(out);
}

#endif  // MORPREC_CLI_PATH
