// SPDX-License-Identifier: Apache-2.0
//
// Benchmark harness: model reduction with preconditioner reuse across the
// inner linear-system sequences. Subcommands cover the three reduction
// drivers, a pure solve-sequence benchmark, and a model generator; every
// subcommand also reads a flat key = value config file via --config.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "morprec/bench.hpp"
#include "morprec/errors.hpp"
#include "morprec/generator.hpp"
#include "morprec/matrix_market.hpp"

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct SolveOptions {
  double gmres_tol = 1e-6;
  int gmres_max_iter = 1000;
  double spai_tol = 1e-4;
  int spai_max_fill = 50;
  int spai_sweeps = 3;
  std::string pattern = "a";
  int threads = 1;
  std::string precond = "reuse";
  int max_chain_len = 16;
  std::string out_dir = "out";
};

void add_solve_options(CLI::App* cmd, SolveOptions& o) {
  cmd->add_option("--gmres-tol", o.gmres_tol, "GMRES relative residual tolerance")
      ->capture_default_str();
  cmd->add_option("--gmres-max-iter", o.gmres_max_iter, "GMRES iteration cap")
      ->capture_default_str();
  cmd->add_option("--spai-tol", o.spai_tol,
                  "approximate-inverse per-column residual target (relative)")
      ->capture_default_str();
  cmd->add_option("--spai-max-fill", o.spai_max_fill, "pattern size cap per column")
      ->capture_default_str();
  cmd->add_option("--spai-sweeps", o.spai_sweeps, "pattern augmentation rounds per column")
      ->capture_default_str();
  cmd->add_option("--pattern", o.pattern,
                  "initial approximate-inverse pattern: diag, a, a2, or a3")
      ->check(CLI::IsMember({"diag", "a", "a2", "a3"}))
      ->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker threads for per-column least squares")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--precond", o.precond, "preconditioning mode: none, spai, or reuse")
      ->check(CLI::IsMember({"none", "spai", "reuse"}))
      ->capture_default_str();
  cmd->add_option("--max-chain-len", o.max_chain_len,
                  "update factors per chain before a fresh rebuild")
      ->capture_default_str();
  cmd->add_option("--out", o.out_dir, "output directory (empty writes no files)")
      ->capture_default_str();
}

morprec::GmresConfig make_gmres(const SolveOptions& o) {
  morprec::GmresConfig g;
  g.rel_tol = o.gmres_tol;
  g.max_iter = o.gmres_max_iter;
  return g;
}

morprec::SpaiConfig make_spai(const SolveOptions& o) {
  morprec::SpaiConfig s;
  if (o.pattern == "diag")
    s.pattern = morprec::SpaiPattern::diagonal();
  else if (o.pattern == "a")
    s.pattern = morprec::SpaiPattern::pattern_of_a();
  else if (o.pattern == "a2")
    s.pattern = morprec::SpaiPattern::pattern_of_a_pow(2);
  else
    s.pattern = morprec::SpaiPattern::pattern_of_a_pow(3);
  s.fill_tol = o.spai_tol;
  s.max_fill_per_col = o.spai_max_fill;
  s.max_pattern_sweeps = o.spai_sweeps;
  s.threads = o.threads;
  return s;
}

morprec::PrecondMode make_mode(const SolveOptions& o) {
  if (o.precond == "none") return morprec::PrecondMode::None;
  if (o.precond == "spai") return morprec::PrecondMode::FreshSpai;
  return morprec::PrecondMode::ReuseChain;
}

// CLI11 honors set_config only on the top-level app, so each subcommand
// loads its flat key = value file here. Every key must name an option of
// the subcommand (an optional [<subcommand>] section header is tolerated);
// anything else is rejected. Explicit command-line values always win.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw morprec::IoError(path + ": cannot open config file");
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI{}.from_config(in);
  } catch (const CLI::Error& e) {
    throw morprec::ConfigError(path + ": " + e.what());
  }
  for (const CLI::ConfigItem& item : items) {
    if (!item.parents.empty() &&
        (item.parents.size() != 1 || item.parents.front() != cmd->get_name())) {
      std::string section = item.parents.front();
      for (std::size_t i = 1; i < item.parents.size(); ++i) section += "." + item.parents[i];
      throw morprec::ConfigError(path + ": unknown section '" + section + "'");
    }
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (item.name == "config")
      throw morprec::ConfigError(path + ": config files cannot include other config files");
    CLI::Option* opt = cmd->get_option_no_throw("--" + item.name);
    if (opt == nullptr)
      throw morprec::ConfigError(path + ": unknown config key '" + item.name + "'");
    if (opt->count() > 0) continue;
    try {
      for (const std::string& v : item.inputs) opt->add_result(v);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw morprec::ConfigError(path + ": key '" + item.name + "': " + e.what());
    }
  }
}

struct SecondOrderSource {
  std::string m_path, d_path, k_path, f_path, c_path;
  morprec::index_t n = 200;
  double omega = kTwoPi;
  double alpha = 5e-2;
  double beta = 5e-6;
  std::uint64_t seed = 1;
};

void add_second_order_source(CLI::App* cmd, SecondOrderSource& s) {
  cmd->add_option("--matrix-m", s.m_path, "mass matrix file (Matrix Market)");
  cmd->add_option("--matrix-d", s.d_path, "damping matrix file (optional with alpha/beta)");
  cmd->add_option("--matrix-k", s.k_path, "stiffness matrix file");
  cmd->add_option("--matrix-f", s.f_path, "input map file");
  cmd->add_option("--matrix-c", s.c_path, "output map file");
  cmd->add_option("--n", s.n, "generated model size")->capture_default_str();
  cmd->add_option("--omega", s.omega, "generated model rotation speed")->capture_default_str();
  cmd->add_option("--alpha", s.alpha, "proportional damping mass coefficient")
      ->capture_default_str();
  cmd->add_option("--beta", s.beta, "proportional damping stiffness coefficient")
      ->capture_default_str();
  cmd->add_option("--seed", s.seed, "generator seed")->capture_default_str();
}

morprec::SecondOrderSystem load_second_order(const SecondOrderSource& s) {
  const bool any_file =
      !s.m_path.empty() || !s.d_path.empty() || !s.k_path.empty() || !s.f_path.empty() ||
      !s.c_path.empty();
  if (!any_file) return morprec::generate_disc_brake_like(s.n, s.omega, s.alpha, s.beta, s.seed);
  if (s.m_path.empty() || s.k_path.empty() || s.f_path.empty() || s.c_path.empty())
    throw morprec::ConfigError(
        "file-based runs need --matrix-m, --matrix-k, --matrix-f, and --matrix-c "
        "(--matrix-d is optional; alpha/beta build the damping otherwise)");
  morprec::SparseMatrix m = morprec::read_matrix_market_file(s.m_path);
  morprec::SparseMatrix k = morprec::read_matrix_market_file(s.k_path);
  morprec::SparseMatrix f = morprec::read_matrix_market_file(s.f_path);
  morprec::SparseMatrix c = morprec::read_matrix_market_file(s.c_path);
  if (s.d_path.empty())
    return morprec::SecondOrderSystem::with_proportional_damping(
        std::move(m), std::move(k), std::move(f), std::move(c), s.alpha, s.beta);
  morprec::SparseMatrix d = morprec::read_matrix_market_file(s.d_path);
  return morprec::SecondOrderSystem::create(std::move(m), std::move(d), std::move(k),
                                            std::move(f), std::move(c), s.alpha, s.beta);
}

std::vector<double> default_expansion_points() {
  const morprec::GridSpec four{1.0, 500.0, 4};
  std::vector<double> pts = morprec::linear_grid(four);
  for (double& p : pts) p *= kTwoPi;
  return pts;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw morprec::IoError(dir + ": cannot create output directory: " + ec.message());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse model reduction with preconditioner reuse"};
  app.require_subcommand(1);

  // airga ------------------------------------------------------------------
  auto* airga = app.add_subcommand(
      "airga", "Second-order moment-matching reduction with adaptive expansion points");
  std::string airga_config;
  airga->add_option("--config", airga_config,
                    "flat key = value file of this subcommand's options");
  SecondOrderSource airga_src;
  SolveOptions airga_solve;
  struct {
    std::vector<double> points;
    int r_max = 20;
    double outer_tol = 1e-4;
    double inner_tol = 1e-6;
    int max_outer = 20;
    bool compare_first = false;
    double grid_min = 1.0;
    double grid_max = 500.0;
    int grid_count = 200;
  } airga_opt;
  add_second_order_source(airga, airga_src);
  add_solve_options(airga, airga_solve);
  airga->add_option("--points", airga_opt.points,
                    "expansion points in rad/s (default: 2*pi times 4 frequencies in [1,500])");
  airga->add_option("--r-max", airga_opt.r_max, "reduced order cap")->capture_default_str();
  airga->add_option("--outer-tol", airga_opt.outer_tol, "sweep-to-sweep relative H2 tolerance")
      ->capture_default_str();
  airga->add_option("--inner-tol", airga_opt.inner_tol,
                    "moment-round relative H2 tolerance")
      ->capture_default_str();
  airga->add_option("--max-outer", airga_opt.max_outer, "sweep cap")->capture_default_str();
  airga->add_flag("--compare-first-approach", airga_opt.compare_first,
                  "also measure every update against the sweep-anchored variant");
  airga->add_option("--grid-min", airga_opt.grid_min, "error-curve lowest frequency")
      ->capture_default_str();
  airga->add_option("--grid-max", airga_opt.grid_max, "error-curve highest frequency")
      ->capture_default_str();
  airga->add_option("--grid-count", airga_opt.grid_count, "error-curve grid size")
      ->capture_default_str();
  airga->callback([&] {
    apply_config_file(airga, airga_config);
    morprec::AirgaConfig cfg;
    cfg.expansion_points =
        airga_opt.points.empty() ? default_expansion_points() : airga_opt.points;
    cfg.r_max = airga_opt.r_max;
    cfg.outer_tol = airga_opt.outer_tol;
    cfg.inner_tol = airga_opt.inner_tol;
    cfg.max_outer = airga_opt.max_outer;
    cfg.gmres = make_gmres(airga_solve);
    cfg.spai = make_spai(airga_solve);
    cfg.max_chain_len = airga_solve.max_chain_len;
    cfg.compare_first_approach = airga_opt.compare_first;
    const morprec::SecondOrderSystem sys = load_second_order(airga_src);
    const morprec::GridSpec grid{airga_opt.grid_min, airga_opt.grid_max, airga_opt.grid_count};
    morprec::run_airga_bench(sys, cfg, make_mode(airga_solve), grid, airga_solve.out_dir,
                             std::cout);
  });

  // birka ------------------------------------------------------------------
  auto* birka = app.add_subcommand(
      "birka", "Bilinear fixed-point interpolation reduction with sweep-to-sweep reuse");
  std::string birka_config;
  birka->add_option("--config", birka_config,
                    "flat key = value file of this subcommand's options");
  SolveOptions birka_solve;
  // Spectrum-change convergence needs inner solves well below --tol.
  birka_solve.gmres_tol = 1e-10;
  struct {
    std::string k_path, f_path, c_path;
    std::vector<std::string> n_paths;
    morprec::index_t n = 40;
    morprec::index_t m = 2;
    std::uint64_t seed = 1;
    int r = 4;
    double tol = 1e-4;
    int max_sweeps = 50;
    morprec::index_t explicit_cap = 200000;
  } birka_opt;
  birka->add_option("--matrix-k", birka_opt.k_path, "state matrix file");
  birka->add_option("--matrix-n", birka_opt.n_paths,
                    "coupling matrix files, one per input column");
  birka->add_option("--matrix-f", birka_opt.f_path, "input map file");
  birka->add_option("--matrix-c", birka_opt.c_path, "output map file");
  birka->add_option("--n", birka_opt.n, "generated model size")->capture_default_str();
  birka->add_option("--m", birka_opt.m, "generated model input count")->capture_default_str();
  birka->add_option("--seed", birka_opt.seed, "generator and initial-guess seed")
      ->capture_default_str();
  birka->add_option("--r", birka_opt.r, "reduced order")->capture_default_str();
  birka->add_option("--tol", birka_opt.tol, "relative spectrum-change tolerance")
      ->capture_default_str();
  birka->add_option("--max-sweeps", birka_opt.max_sweeps, "sweep cap")->capture_default_str();
  birka->add_option("--explicit-cap", birka_opt.explicit_cap,
                    "entry cap for the explicit Kronecker assembly")
      ->capture_default_str();
  add_solve_options(birka, birka_solve);
  birka->callback([&] {
    apply_config_file(birka, birka_config);
    morprec::BilinearSystem sys = [&] {
      const bool any_file = !birka_opt.k_path.empty() || !birka_opt.n_paths.empty() ||
                            !birka_opt.f_path.empty() || !birka_opt.c_path.empty();
      if (!any_file)
        return morprec::generate_bilinear_toy(birka_opt.n, birka_opt.m, birka_opt.seed);
      if (birka_opt.k_path.empty() || birka_opt.n_paths.empty() || birka_opt.f_path.empty() ||
          birka_opt.c_path.empty())
        throw morprec::ConfigError(
            "file-based runs need --matrix-k, --matrix-n (repeatable), --matrix-f, and "
            "--matrix-c");
      std::vector<morprec::SparseMatrix> n_ops;
      n_ops.reserve(birka_opt.n_paths.size());
      for (const std::string& p : birka_opt.n_paths)
        n_ops.push_back(morprec::read_matrix_market_file(p));
      return morprec::BilinearSystem::create(
          morprec::read_matrix_market_file(birka_opt.k_path), std::move(n_ops),
          morprec::read_matrix_market_file(birka_opt.f_path),
          morprec::read_matrix_market_file(birka_opt.c_path));
    }();
    morprec::BirkaConfig cfg;
    cfg.r = birka_opt.r;
    cfg.tol = birka_opt.tol;
    cfg.max_sweeps = birka_opt.max_sweeps;
    cfg.seed = birka_opt.seed;
    cfg.gmres = make_gmres(birka_solve);
    cfg.spai = make_spai(birka_solve);
    cfg.max_chain_len = birka_solve.max_chain_len;
    cfg.explicit_nnz_cap = birka_opt.explicit_cap;
    morprec::run_birka_bench(sys, cfg, make_mode(birka_solve), birka_solve.out_dir, std::cout);
  });

  // qbihomm ----------------------------------------------------------------
  auto* qb = app.add_subcommand(
      "qbihomm", "Quadratic-bilinear moment matching with per-point preconditioner reuse");
  std::string qb_config;
  qb->add_option("--config", qb_config, "flat key = value file of this subcommand's options");
  SolveOptions qb_solve;
  struct {
    std::string d_path, k_path, n_path, h_path, f_path, c_path;
    morprec::index_t n = 30;
    std::uint64_t seed = 1;
    std::vector<double> sigmas;
    int p_moments = 1;
    int q_moments = 1;
  } qb_opt;
  qb->add_option("--matrix-d", qb_opt.d_path, "descriptor matrix file");
  qb->add_option("--matrix-k", qb_opt.k_path, "state matrix file");
  qb->add_option("--matrix-n", qb_opt.n_path, "bilinear coupling file");
  qb->add_option("--matrix-h", qb_opt.h_path, "quadratic coupling file (n x n^2)");
  qb->add_option("--matrix-f", qb_opt.f_path, "input column file");
  qb->add_option("--matrix-c", qb_opt.c_path, "output column file");
  qb->add_option("--n", qb_opt.n, "generated model size")->capture_default_str();
  qb->add_option("--seed", qb_opt.seed, "generator seed")->capture_default_str();
  qb->add_option("--sigmas", qb_opt.sigmas, "interpolation points (default 1 2)");
  qb->add_option("--p-moments", qb_opt.p_moments, "extra trial-side moment depth")
      ->capture_default_str();
  qb->add_option("--q-moments", qb_opt.q_moments, "test-side moment depth")
      ->capture_default_str();
  add_solve_options(qb, qb_solve);
  qb->callback([&] {
    apply_config_file(qb, qb_config);
    morprec::QbSystem sys = [&] {
      const bool any_file = !qb_opt.d_path.empty() || !qb_opt.k_path.empty() ||
                            !qb_opt.n_path.empty() || !qb_opt.h_path.empty() ||
                            !qb_opt.f_path.empty() || !qb_opt.c_path.empty();
      if (!any_file) return morprec::generate_qb_toy(qb_opt.n, qb_opt.seed);
      if (qb_opt.d_path.empty() || qb_opt.k_path.empty() || qb_opt.n_path.empty() ||
          qb_opt.h_path.empty() || qb_opt.f_path.empty() || qb_opt.c_path.empty())
        throw morprec::ConfigError(
            "file-based runs need --matrix-d, --matrix-k, --matrix-n, --matrix-h, "
            "--matrix-f, and --matrix-c");
      return morprec::QbSystem::create(morprec::read_matrix_market_file(qb_opt.d_path),
                                       morprec::read_matrix_market_file(qb_opt.k_path),
                                       morprec::read_matrix_market_file(qb_opt.n_path),
                                       morprec::read_matrix_market_file(qb_opt.h_path),
                                       morprec::read_matrix_market_file(qb_opt.f_path),
                                       morprec::read_matrix_market_file(qb_opt.c_path));
    }();
    morprec::QbConfig cfg;
    cfg.sigmas = qb_opt.sigmas.empty() ? std::vector<double>{1.0, 2.0} : qb_opt.sigmas;
    cfg.p_moments = qb_opt.p_moments;
    cfg.q_moments = qb_opt.q_moments;
    cfg.gmres = make_gmres(qb_solve);
    cfg.spai = make_spai(qb_solve);
    cfg.max_chain_len = qb_solve.max_chain_len;
    morprec::run_qbihomm_bench(sys, cfg, make_mode(qb_solve), qb_solve.out_dir, std::cout);
  });

  // spai-bench -------------------------------------------------------------
  auto* sb = app.add_subcommand(
      "spai-bench", "Preconditioned solve-sequence benchmark over shifted operators");
  std::string sb_config;
  sb->add_option("--config", sb_config, "flat key = value file of this subcommand's options");
  SecondOrderSource sb_src;
  SolveOptions sb_solve;
  std::vector<double> sb_points;
  int sb_failed = 0;
  add_second_order_source(sb, sb_src);
  add_solve_options(sb, sb_solve);
  sb->add_option("--points", sb_points,
                 "sequence points in rad/s (default: 2*pi times 4 frequencies in [1,500])");
  sb->callback([&] {
    apply_config_file(sb, sb_config);
    const morprec::SecondOrderSystem sys = load_second_order(sb_src);
    const std::vector<double> pts = sb_points.empty() ? default_expansion_points() : sb_points;
    const morprec::SpaiBenchResult result =
        morprec::run_spai_bench(sys, pts, make_spai(sb_solve), make_gmres(sb_solve),
                                make_mode(sb_solve), sb_solve.max_chain_len, sb_solve.out_dir,
                                std::cout);
    sb_failed = result.failed_solves;
  });

  // gen --------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate a model and write its matrices");
  std::string gen_config;
  gen->add_option("--config", gen_config, "flat key = value file of this subcommand's options");
  struct {
    std::string model = "second-order";
    morprec::index_t n = 200;
    morprec::index_t m = 2;
    double omega = kTwoPi;
    double alpha = 5e-2;
    double beta = 5e-6;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
  } gen_opt;
  gen->add_option("--model", gen_opt.model, "second-order, bilinear, or qb")
      ->check(CLI::IsMember({"second-order", "bilinear", "qb"}))
      ->capture_default_str();
  gen->add_option("--n", gen_opt.n, "model size")->capture_default_str();
  gen->add_option("--m", gen_opt.m, "inputs (bilinear only)")->capture_default_str();
  gen->add_option("--omega", gen_opt.omega, "rotation speed (second-order only)")
      ->capture_default_str();
  gen->add_option("--alpha", gen_opt.alpha, "damping mass coefficient")->capture_default_str();
  gen->add_option("--beta", gen_opt.beta, "damping stiffness coefficient")
      ->capture_default_str();
  gen->add_option("--seed", gen_opt.seed, "generator seed")->capture_default_str();
  gen->add_option("--out", gen_opt.out_dir, "output directory")->capture_default_str();
  gen->callback([&] {
    apply_config_file(gen, gen_config);
    ensure_out_dir(gen_opt.out_dir);
    if (gen_opt.model == "second-order") {
      const morprec::SecondOrderSystem sys = morprec::generate_disc_brake_like(
          gen_opt.n, gen_opt.omega, gen_opt.alpha, gen_opt.beta, gen_opt.seed);
      morprec::write_matrix_market_file(join_path(gen_opt.out_dir, "m.mtx"), sys.m);
      morprec::write_matrix_market_file(join_path(gen_opt.out_dir, "d.mtx"), sys.d);
      morprec::write_matrix_market_file(join_path(gen_opt.out_dir, "k.mtx"), sys.k);
      morprec::write_matrix_market_file(join_path(gen_opt.out_dir, "f.mtx"), sys.f);
      morprec::write_matrix_market_file(join_path(gen_opt.out_dir, "c.mtx"), sys.c);
    } else if (gen_opt.model == "bilinear") {
      const morprec::BilinearSystem sys =
          morprec::generate_bilinear_toy(gen_opt.n, gen_opt.m, gen_opt.seed);
      morprec::write_matrix_market_file(join_path(gen_opt.out_dir, "k.mtx"), sys.k);
      for (std::size_t j = 0; j < sys.n_ops.size(); ++j)
        morprec::write_matrix_market_file(
            join_path(gen_opt.out_dir, "n" + std::to_string(j + 1) + ".mtx"), sys.n_ops[j]);
      morprec::write_matrix_market_file(join_path(gen_opt.out_dir, "f.mtx"), sys.f);
      morprec::write_matrix_market_file(join_path(gen_opt.out_dir, "c.mtx"), sys.c);
    } else {
      const morprec::QbSystem sys = morprec::generate_qb_toy(gen_opt.n, gen_opt.seed);
      morprec::write_matrix_market_file(join_path(gen_opt.out_dir, "d.mtx"), sys.d);
      morprec::write_matrix_market_file(join_path(gen_opt.out_dir, "k.mtx"), sys.k);
      morprec::write_matrix_market_file(join_path(gen_opt.out_dir, "n.mtx"), sys.n_op);
      morprec::write_matrix_market_file(join_path(gen_opt.out_dir, "h.mtx"), sys.h);
      morprec::write_matrix_market_file(join_path(gen_opt.out_dir, "f.mtx"), sys.f);
      morprec::write_matrix_market_file(join_path(gen_opt.out_dir, "c.mtx"), sys.c);
    }
    std::cout << "gen: wrote " << gen_opt.model << " model (n = " << gen_opt.n << ") under "
              << gen_opt.out_dir << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const morprec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const morprec::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const morprec::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (sb_failed > 0) {
    std::cerr << "solver failure: " << sb_failed << " solve(s) did not converge\n";
    return 3;
  }
  return 0;
}
