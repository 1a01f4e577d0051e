// gaplab command line: rate tables, h certification, benchmark solves, and
// the epsilon sweeps, with CSV/JSON artifacts per run.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gaplab/experiments.hpp"
#include "gaplab/textio.hpp"

namespace {

using namespace gaplab;
using experiments::ExperimentConfig;

void print_record(const experiments::RunRecord& rec) {
  for (const auto& f : rec.fits) {
    std::printf("  fit %-28s slope % .6f", f.name.c_str(), f.fit.slope);
    if (f.tol > 0.0) {
      std::printf("  target % .6f +- %.3f  [%s]", f.target, f.tol,
                  f.pass ? "ok" : "off");
    }
    if (f.dropped_first_point) std::printf("  (largest point excluded)");
    std::printf("\n");
  }
  for (const auto& c : rec.checks) {
    std::printf("  check %-27s value % .6g  [%s]\n", c.name.c_str(), c.value,
                c.pass ? "ok" : "FAIL");
  }
  std::printf("  => %s\n", rec.all_pass() ? "all checks passed" : "FAILURES present");
}

int run_rates(int n_min, int n_max, int k_max, const std::string& out_dir) {
  std::vector<std::vector<double>> rows;
  std::printf("%4s %12s %14s %12s", "n", "alpha", "(alpha-1)/2", "beta_star");
  for (int k = 0; k <= k_max; ++k) std::printf(" %10s%d", "alpha_k", k);
  std::printf("\n");
  for (int n = n_min; n <= n_max; ++n) {
    const auto rs = rates::rate_table(rates::Dimension(n), k_max);
    std::vector<double> row = {static_cast<double>(n), rs.alpha,
                               0.5 * (rs.alpha - 1.0), rs.beta_star};
    std::printf("%4d %12.8f %14.8f %12.8f", n, rs.alpha, 0.5 * (rs.alpha - 1.0),
                rs.beta_star);
    for (double ak : rs.alpha_k) {
      row.push_back(ak);
      std::printf(" %11.8f", ak);
    }
    std::printf("\n");
    rows.push_back(std::move(row));
  }
  std::vector<std::string> cols = {"n", "alpha", "grad_exponent", "beta_star"};
  for (int k = 0; k <= k_max; ++k) cols.push_back("alpha_k" + std::to_string(k));
  std::filesystem::create_directories(out_dir);
  io::write_csv(out_dir + "/rates.csv", cols, rows);
  std::printf("wrote %s/rates.csv\n", out_dir.c_str());
  return 0;
}

int run_h_certify_single(int n, double eps, const std::string& beta_arg,
                         int ppo, const std::string& out_dir) {
  const rates::Dimension dim(n);
  const double beta =
      (beta_arg == "auto") ? rates::beta_star(dim) : std::stod(beta_arg);
  ode::ModalOperatorParams params(n, eps, 1);
  ode::ModalSolveOptions opts;
  opts.points_per_octave = ppo;
  const ode::OdeSolution h = ode::solve_h(params, opts);
  const ode::HBoundCertificate cert = ode::verify_h_bounds(h, dim, eps, beta);

  std::filesystem::create_directories(out_dir);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < h.r.size(); ++i) {
    const double envelope = std::pow(h.r[i], beta) *
                            std::pow(eps + h.r[i] * h.r[i], 0.5 * (cert.alpha - beta));
    rows.push_back({h.r[i], h.v[i], std::pow(h.r[i], cert.alpha), envelope,
                    h.v[i] / envelope});
  }
  io::write_csv(out_dir + "/h_profile.csv",
                {"r", "h", "r_alpha", "lower_envelope", "ratio"}, rows);

  io::JsonNode root = io::JsonNode::object();
  root.set("n", io::JsonNode::integer(n));
  root.set("eps", io::JsonNode::number(eps));
  root.set("beta", io::JsonNode::number(beta));
  root.set("alpha", io::JsonNode::number(cert.alpha));
  root.set("min_h_over_r", io::JsonNode::number(cert.min_h_over_r));
  root.set("max_h_over_r_alpha", io::JsonNode::number(cert.max_h_over_r_alpha));
  root.set("inf_envelope_ratio", io::JsonNode::number(cert.inf_envelope_ratio));
  root.set("monotone", io::JsonNode::boolean(cert.monotone));
  root.set("extrapolation_spread",
           io::JsonNode::number(h.extrapolation.max_rel_spread));
  root.set("pass", io::JsonNode::boolean(cert.pass));
  io::write_text_file(out_dir + "/h_certificate.json", root.dump());

  std::printf("h certificate: n=%d eps=%g beta=%.8f\n", n, eps, beta);
  std::printf("  min h/r        = %.12f\n", cert.min_h_over_r);
  std::printf("  max h/r^alpha  = %.12f\n", cert.max_h_over_r_alpha);
  std::printf("  inf envelope   = %.8f\n", cert.inf_envelope_ratio);
  std::printf("  => %s\n", cert.pass ? "PASS" : "FAIL");
  return cert.pass ? 0 : 1;
}

int run_solve(int n, double eps, int nx, int ny, const std::string& out_dir,
              bool dump_grid, std::vector<double> radii) {
  const auto bench = pde::solve_reduced_sphere_problem(rates::Dimension(n), eps, nx,
                                                       ny, geom::GradingSpec());
  const geom::CurvilinearGrid& g = *bench.u_hat.grid;
  std::filesystem::create_directories(out_dir);

  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(g.cells()));
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t c = static_cast<std::size_t>(g.cell_index(i, j));
      rows.push_back({static_cast<double>(i), static_cast<double>(j), g.cell_r[c],
                      g.cell_xn[c], bench.u_hat.u[c], bench.u_hat.ur[c],
                      bench.u_hat.un[c], bench.u_hat.amplitude[c]});
    }
  }
  io::write_csv(out_dir + "/field.csv",
                {"i", "j", "r", "xn", "u", "ur", "un", "amplitude"}, rows);

  if (radii.empty()) radii = {std::sqrt(eps), 2.0 * std::sqrt(eps)};
  io::JsonNode root = io::JsonNode::object();
  root.set("n", io::JsonNode::integer(n));
  root.set("eps", io::JsonNode::number(eps));
  root.set("grid", io::JsonNode::string(std::to_string(nx) + "x" + std::to_string(ny)));
  io::JsonNode uj = io::JsonNode::array();
  for (double r : radii) {
    io::JsonNode e = io::JsonNode::object();
    e.set("r", io::JsonNode::number(r));
    e.set("u11", io::JsonNode::number(pde::gap_average(bench.u_hat, r)));
    uj.push(std::move(e));
  }
  root.set("u11", std::move(uj));
  root.set("sup_gradient_2sqrt_eps",
           io::JsonNode::number(pde::sup_amplitude_in_disc(bench.u_hat,
                                                           2.0 * std::sqrt(eps))));
  root.set("min_w_over_scale", io::JsonNode::number(bench.min_w_over_scale));
  io::JsonNode rep = io::JsonNode::object();
  rep.set("solver", io::JsonNode::string(bench.u_hat.report.solver));
  rep.set("preconditioner", io::JsonNode::string(bench.u_hat.report.preconditioner));
  rep.set("iterations", io::JsonNode::integer(bench.u_hat.report.iterations));
  rep.set("rel_residual", io::JsonNode::number(bench.u_hat.report.rel_residual));
  rep.set("converged", io::JsonNode::boolean(bench.u_hat.report.converged));
  root.set("solve_report", std::move(rep));
  io::write_text_file(out_dir + "/summary.json", root.dump());

  if (dump_grid) {
    std::ofstream os(out_dir + "/grid.csv", std::ios::binary);
    geom::dump_grid_csv(g, os);
  }
  std::printf("solve: n=%d eps=%g grid=%dx%d iters=%d converged=%d\n", n, eps, nx, ny,
              bench.u_hat.report.iterations, bench.u_hat.report.converged ? 1 : 0);
  std::printf("  U11(sqrt(eps)) = %.10f\n", pde::gap_average(bench.u_hat, std::sqrt(eps)));
  std::printf("  sup |grad|     = %.10f over r^2+xn^2 <= 4 eps\n",
              pde::sup_amplitude_in_disc(bench.u_hat, 2.0 * std::sqrt(eps)));
  std::printf("wrote %s/{field.csv, summary.json%s}\n", out_dir.c_str(),
              dump_grid ? ", grid.csv" : "");
  return bench.u_hat.report.converged ? 0 : 1;
}

bool parse_grid_pair(const std::string& s, int& nx, int& ny) {
  const auto x = s.find('x');
  if (x == std::string::npos) return false;
  nx = std::stoi(s.substr(0, x));
  ny = std::stoi(s.substr(x + 1));
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaplab: thin-gap degenerate elliptic laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  int threads = 1;
  app.add_option("--config", config_path, "experiment config file")->expected(1);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads for per-point tasks");

  auto* rates_cmd = app.add_subcommand("rates", "closed-form exponent table");
  int n_min = 3, n_max = 8, k_max = 6;
  rates_cmd->add_option("--n-min", n_min);
  rates_cmd->add_option("--n-max", n_max);
  rates_cmd->add_option("--k-max", k_max);

  auto* sweep_cmd = app.add_subcommand("sweep", "two-sphere lower-bound sweep");
  int sweep_n = 3;
  sweep_cmd->add_option("--n", sweep_n, "dimension");

  auto* lg_cmd = app.add_subcommand("local-gap", "transformed-gap upper-bound run");
  int lg_n = 3;
  double lg_eps = 1e-3;
  std::string lg_shape = "ball";
  lg_cmd->add_option("--n", lg_n);
  lg_cmd->add_option("--eps", lg_eps);
  lg_cmd->add_option("--shape", lg_shape)->check(CLI::IsMember({"ball", "perturbed"}));

  auto* hc_cmd = app.add_subcommand("h-certify", "h-function certification");
  int hc_n = 3;
  double hc_eps = 0.0;
  std::string hc_beta = "auto";
  int hc_ppo = 96;
  hc_cmd->add_option("--n", hc_n);
  hc_cmd->add_option("--eps", hc_eps, "single epsilon (omit to run the config schedule)");
  hc_cmd->add_option("--beta", hc_beta, "subsolution exponent or 'auto'");
  hc_cmd->add_option("--points-per-octave", hc_ppo);

  auto* md_cmd = app.add_subcommand("mode-decay", "modal decay bounds");
  int md_n = 3;
  int md_kmax = 5;
  md_cmd->add_option("--n", md_n);
  md_cmd->add_option("--k-max", md_kmax);

  auto* solve_cmd = app.add_subcommand("solve", "single benchmark solve");
  int sv_n = 3;
  double sv_eps = 1e-3;
  std::string sv_grid = "513x257";
  bool sv_dump = false;
  std::vector<double> sv_radii;
  solve_cmd->add_option("--n", sv_n);
  solve_cmd->add_option("--eps", sv_eps);
  solve_cmd->add_option("--grid", sv_grid, "WIDTHxHEIGHT cells");
  solve_cmd->add_flag("--dump-grid", sv_dump, "also write the grid node dump");
  solve_cmd->add_option("--radii", sv_radii, "gap-average radii for summary.json");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig config;
    if (!config_path.empty()) config = experiments::load_config(config_path);
    if (app.count("--out") || config_path.empty()) config.out_dir = out_dir;
    if (app.count("--threads") || config_path.empty()) config.threads = threads;

    if (rates_cmd->parsed()) {
      return run_rates(n_min, n_max, k_max, config.out_dir);
    }
    if (sweep_cmd->parsed()) {
      config.id = "sweep";
      if (sweep_cmd->count("--n")) config.n = sweep_n;
      if (config.n != 3) config.u11_slope_tol = std::max(config.u11_slope_tol, 0.05);
      const auto rec = experiments::run_lower_bound_sweep(config);
      experiments::emit_results(rec, config.out_dir);
      std::printf("sweep: n=%d, %zu points -> %s\n", config.n, rec.rows.size(),
                  config.out_dir.c_str());
      print_record(rec);
      return rec.all_pass() ? 0 : 1;
    }
    if (lg_cmd->parsed()) {
      config.id = "local_gap";
      if (lg_cmd->count("--n")) config.n = lg_n;
      if (lg_cmd->count("--eps")) {
        config.eps.start = config.eps.stop = lg_eps;
        config.eps.count = 1;
      }
      if (lg_cmd->count("--shape")) config.shape = lg_shape;
      if (config_path.empty()) config.grid = {513, 129, 1025, 257};
      const auto rec = experiments::run_local_gap(config);
      experiments::emit_results(rec, config.out_dir);
      std::printf("local-gap: n=%d shape=%s eps=%g -> %s\n", config.n,
                  config.shape.c_str(), config.eps.start, config.out_dir.c_str());
      print_record(rec);
      return rec.all_pass() ? 0 : 1;
    }
    if (hc_cmd->parsed()) {
      if (hc_cmd->count("--eps")) {
        return run_h_certify_single(hc_n, hc_eps, hc_beta, hc_ppo, config.out_dir);
      }
      config.id = "h_certify";
      if (hc_cmd->count("--n")) config.n = hc_n;
      if (config_path.empty()) {
        config.eps = {1e-2, 1e-4, 3};
      }
      const auto rec = experiments::run_h_certification(config);
      experiments::emit_results(rec, config.out_dir);
      print_record(rec);
      return rec.all_pass() ? 0 : 1;
    }
    if (md_cmd->parsed()) {
      config.id = "mode_decay";
      if (md_cmd->count("--n")) config.n = md_n;
      if (md_cmd->count("--k-max")) {
        config.k_list.clear();
        for (int k = 1; k <= md_kmax; ++k) config.k_list.push_back(k);
      }
      if (config_path.empty()) config.eps = {1e-2, 1e-3, 2};
      const auto rec = experiments::run_mode_decay(config);
      experiments::emit_results(rec, config.out_dir);
      print_record(rec);
      return rec.all_pass() ? 0 : 1;
    }
    if (solve_cmd->parsed()) {
      int nx = 513, ny = 257;
      if (!parse_grid_pair(sv_grid, nx, ny)) {
        std::fprintf(stderr, "bad --grid, expected WIDTHxHEIGHT\n");
        return 2;
      }
      return run_solve(sv_n, sv_eps, nx, ny, config.out_dir, sv_dump, sv_radii);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
