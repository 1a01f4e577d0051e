#include "gaplab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <memory>

#include "gaplab/textio.hpp"

namespace gaplab::experiments {

bool RunRecord::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  for (const auto& f : fits) {
    if (!f.pass) return false;
  }
  return true;
}

namespace {

Check make_check(const std::string& name, double value, double target, double tol) {
  Check c;
  c.name = name;
  c.value = value;
  c.target = target;
  c.tol = tol;
  c.pass = std::fabs(value - target) <= tol;
  return c;
}

Check make_bound_check(const std::string& name, double value, double bound,
                       bool upper) {
  Check c;
  c.name = name;
  c.value = value;
  c.target = bound;
  c.tol = 0.0;
  c.pass = upper ? (value <= bound) : (value >= bound);
  return c;
}

/// run fn(i) for i in [0, count) on up to `threads` workers, results merged
/// in index order
template <class Fn>
auto indexed_parallel(int count, int threads, Fn fn)
    -> std::vector<decltype(fn(0))> {
  using Result = decltype(fn(0));
  std::vector<Result> results(static_cast<std::size_t>(count));
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) results[static_cast<std::size_t>(i)] = fn(i);
    return results;
  }
  std::vector<std::future<Result>> futures;
  futures.reserve(static_cast<std::size_t>(count));
  // bounded fan-out: launch in waves of `threads`
  int next = 0;
  while (next < count) {
    const int wave = std::min(threads, count - next);
    for (int w = 0; w < wave; ++w) {
      futures.push_back(std::async(std::launch::async, fn, next + w));
    }
    for (int w = 0; w < wave; ++w) {
      results[static_cast<std::size_t>(next + w)] = futures[futures.size() - wave + w].get();
    }
    next += wave;
  }
  return results;
}

geom::InclusionShape shape_from_config(const ExperimentConfig& c) {
  if (c.shape == "ball") {
    return geom::InclusionShape::unit_ball(c.patch_radius);
  }
  return geom::InclusionShape::quadratic_perturbed(c.shape_a, c.shape_gamma,
                                                   c.shape_b, c.patch_radius);
}

}  // namespace

NamedFit make_named_fit(const std::string& name, std::vector<double> x,
                        std::vector<double> y, double target, double tol) {
  NamedFit nf;
  nf.name = name;
  nf.target = target;
  nf.tol = tol;
  nf.fit = fit_rate(x, y);
  if (x.size() >= 5) {
    // residual of the largest-x sample vs the median residual
    std::size_t imax = 0;
    for (std::size_t i = 1; i < x.size(); ++i) {
      if (x[i] > x[imax]) imax = i;
    }
    std::vector<double> resid(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      resid[i] = std::fabs(nf.fit.log_y[i] -
                           (nf.fit.intercept + nf.fit.slope * nf.fit.log_x[i]));
    }
    const double r_first = resid[imax];
    std::sort(resid.begin(), resid.end());
    const double median = resid[resid.size() / 2];
    if (r_first > 2.0 * median && median > 0.0) {
      std::vector<double> x2, y2;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (i == imax) continue;
        x2.push_back(x[i]);
        y2.push_back(y[i]);
      }
      nf.fit = fit_rate(x2, y2);
      nf.dropped_first_point = true;
    }
  }
  nf.pass = std::fabs(nf.fit.slope - target) <= tol;
  return nf;
}

// ---------------------------------------------------------------------------
// lower-bound sweep
// ---------------------------------------------------------------------------

namespace {

struct SweepPoint {
  double eps = 0.0;
  double u11 = 0.0;
  double sup_grad = 0.0;
  double c1 = 0.0;
  double h_sqrt_eps = 0.0;
  double triangle = 0.0;
  double delta_u11 = 0.0;
  double delta_grad = 0.0;
  double min_w_rel = 0.0;
  int iters_coarse = 0;
  int iters_fine = 0;
  bool converged = false;
};

SweepPoint sweep_point(const ExperimentConfig& config, double eps) {
  const rates::Dimension dim(config.n);
  const double alpha = rates::alpha(dim);
  const geom::GradingSpec grading;  // geometric 1.05 toward both sigma ends
  const double sqrt_eps = std::sqrt(eps);

  linalg::SolverOptions opts;
  opts.precond = linalg::Preconditioner::ssor;
  opts.max_iter = 60000;

  pde::SphereBenchmark coarse = pde::solve_reduced_sphere_problem(
      dim, eps, config.grid.coarse_nx, config.grid.coarse_ny, grading, opts);

  // nested fine solve seeded by the coarse correction field
  geom::BipolarMap map(eps);
  geom::CurvilinearGrid fine_grid = geom::build_bipolar_grid(
      map, config.grid.fine_nx, config.grid.fine_ny, grading);
  std::vector<double> guess =
      pde::transfer_cell_field(*coarse.u_hat.grid, coarse.w, fine_grid);
  pde::SphereBenchmark fine = pde::solve_reduced_sphere_problem(
      dim, eps, config.grid.fine_nx, config.grid.fine_ny, grading, opts, guess);

  SweepPoint p;
  p.eps = eps;
  const double u11_c = pde::gap_average(coarse.u_hat, sqrt_eps);
  p.u11 = pde::gap_average(fine.u_hat, sqrt_eps);
  const double grad_c = pde::sup_amplitude_in_disc(coarse.u_hat, 2.0 * sqrt_eps);
  p.sup_grad = pde::sup_amplitude_in_disc(fine.u_hat, 2.0 * sqrt_eps);
  p.delta_u11 = std::fabs(u11_c - p.u11) / std::fabs(p.u11);
  p.delta_grad = std::fabs(grad_c - p.sup_grad) / std::fabs(p.sup_grad);
  p.min_w_rel = std::min(coarse.min_w_over_scale, fine.min_w_over_scale);
  p.iters_coarse = coarse.u_hat.report.iterations;
  p.iters_fine = fine.u_hat.report.iterations;
  p.converged = coarse.u_hat.report.converged && fine.u_hat.report.converged;

  // ODE side: h and the C1 split of the measured gap average
  ode::ModalOperatorParams params(config.n, eps, 1);
  ode::ModalSolveOptions mopts;
  mopts.points_per_octave = config.points_per_octave;
  const ode::OdeSolution h = ode::solve_h(params, mopts);
  p.h_sqrt_eps = h.value_at(sqrt_eps);

  const double wlo = config.window_lo_factor * sqrt_eps;
  const double whi = std::min(config.window_hi_factor * sqrt_eps, 0.9);
  constexpr int kWindowSamples = 24;
  std::vector<double> radii(kWindowSamples), u_samples(kWindowSamples);
  for (int s = 0; s < kWindowSamples; ++s) {
    radii[static_cast<std::size_t>(s)] =
        wlo * std::pow(whi / wlo, static_cast<double>(s) / (kWindowSamples - 1));
    u_samples[static_cast<std::size_t>(s)] =
        pde::gap_average(fine.u_hat, radii[static_cast<std::size_t>(s)]);
  }
  const ode::U11Decomposition dec =
      ode::u11_decompose(radii, u_samples, h, alpha, wlo, whi);
  p.c1 = dec.c1;
  p.triangle = std::fabs(p.c1 * p.h_sqrt_eps - p.u11) / std::fabs(p.u11);
  return p;
}

}  // namespace

RunRecord run_lower_bound_sweep(const ExperimentConfig& config) {
  const rates::Dimension dim(config.n);
  const double alpha = rates::alpha(dim);
  RunRecord rec;
  rec.config = config;
  rec.columns = {"eps",        "u11_sqrt_eps", "sup_grad",  "c1",
                 "h_sqrt_eps", "triangle",     "delta_u11", "delta_grad",
                 "min_w_rel",  "iters_coarse", "iters_fine", "converged"};

  const std::vector<double> eps_list = config.eps.values();
  const auto points = indexed_parallel(
      static_cast<int>(eps_list.size()), config.threads,
      [&](int i) { return sweep_point(config, eps_list[static_cast<std::size_t>(i)]); });

  std::vector<double> fit_eps, fit_u11, fit_grad;
  double max_delta = 0.0, max_triangle = 0.0, min_w = 0.0, worst_monotone = 0.0;
  double min_c1 = 1e300;
  bool all_converged = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SweepPoint& p = points[i];
    rec.rows.push_back({p.eps, p.u11, p.sup_grad, p.c1, p.h_sqrt_eps, p.triangle,
                        p.delta_u11, p.delta_grad, p.min_w_rel,
                        static_cast<double>(p.iters_coarse),
                        static_cast<double>(p.iters_fine),
                        p.converged ? 1.0 : 0.0});
    all_converged = all_converged && p.converged;
    if (p.converged) {
      fit_eps.push_back(p.eps);
      fit_u11.push_back(p.u11);
      fit_grad.push_back(p.sup_grad);
      max_delta = std::max(max_delta, std::max(p.delta_u11, p.delta_grad));
      max_triangle = std::max(max_triangle, p.triangle);
      min_w = std::min(min_w, p.min_w_rel);
      min_c1 = std::min(min_c1, p.c1);
      if (i > 0 && points[i - 1].converged) {
        worst_monotone = std::max(worst_monotone, p.u11 / points[i - 1].u11);
      }
    }
  }

  rec.fits.push_back(make_named_fit("u11_vs_eps", fit_eps, fit_u11, 0.5 * alpha,
                                    config.u11_slope_tol));
  rec.fits.push_back(make_named_fit("grad_vs_eps", fit_eps, fit_grad,
                                    0.5 * (alpha - 1.0), config.grad_slope_tol));

  rec.checks.push_back(make_bound_check("all_points_converged",
                                        all_converged ? 1.0 : 0.0, 1.0, false));
  rec.checks.push_back(make_bound_check("grid_delta_max", max_delta, 0.01, true));
  rec.checks.push_back(make_bound_check("triangle_max", max_triangle, 0.05, true));
  rec.checks.push_back(make_bound_check("subsolution_min_w", min_w, -1e-8, false));
  rec.checks.push_back(make_bound_check("u11_monotone_ratio", worst_monotone, 1.01, true));
  // homogeneous amplitude stays bounded away from zero across the sweep
  rec.checks.push_back(make_bound_check("c1_min", min_c1, 0.0, false));
  return rec;
}

// ---------------------------------------------------------------------------
// h certification
// ---------------------------------------------------------------------------

RunRecord run_h_certification(const ExperimentConfig& config) {
  const rates::Dimension dim(config.n);
  const double beta = config.beta > 0.0 ? config.beta : rates::beta_star(dim);
  RunRecord rec;
  rec.config = config;
  rec.columns = {"eps",          "beta",        "min_h_over_r", "max_h_over_r_alpha",
                 "inf_envelope", "extrap_spread", "monotone",   "pass"};

  const std::vector<double> eps_list = config.eps.values();
  ode::ModalSolveOptions mopts;
  mopts.points_per_octave = config.points_per_octave;

  const auto certs = indexed_parallel(
      static_cast<int>(eps_list.size()), config.threads, [&](int i) {
        const double eps = eps_list[static_cast<std::size_t>(i)];
        ode::ModalOperatorParams params(config.n, eps, 1);
        ode::OdeSolution h = ode::solve_h(params, mopts);
        ode::HBoundCertificate cert = ode::verify_h_bounds(h, dim, eps, beta);
        return std::make_pair(cert, h.extrapolation.max_rel_spread);
      });

  bool all_pass = true;
  bool spread_ok = true;
  double env_min = 1e300, env_max = 0.0;
  for (std::size_t i = 0; i < certs.size(); ++i) {
    const ode::HBoundCertificate& cert = certs[i].first;
    const double spread = certs[i].second;
    rec.rows.push_back({eps_list[i], beta, cert.min_h_over_r, cert.max_h_over_r_alpha,
                        cert.inf_envelope_ratio, spread, cert.monotone ? 1.0 : 0.0,
                        cert.pass ? 1.0 : 0.0});
    all_pass = all_pass && cert.pass;
    spread_ok = spread_ok && spread < 1e-4;
    env_min = std::min(env_min, cert.inf_envelope_ratio);
    env_max = std::max(env_max, cert.inf_envelope_ratio);
  }
  rec.checks.push_back(make_bound_check("h_bounds_all", all_pass ? 1.0 : 0.0, 1.0, false));
  rec.checks.push_back(
      make_bound_check("envelope_stability", env_max / env_min - 1.0, 0.20, true));
  rec.checks.push_back(make_bound_check("extrapolation_spread_ok",
                                        spread_ok ? 1.0 : 0.0, 1.0, false));
  return rec;
}

// ---------------------------------------------------------------------------
// modal decay
// ---------------------------------------------------------------------------

RunRecord run_mode_decay(const ExperimentConfig& config) {
  const rates::Dimension dim(config.n);
  RunRecord rec;
  rec.config = config;
  rec.columns = {"k", "eps", "alpha_k", "max_decay_ratio", "pass"};

  ode::ModalSolveOptions mopts;
  mopts.points_per_octave = config.points_per_octave;

  struct Task {
    int k;
    double eps;
  };
  std::vector<Task> tasks;
  for (int k : config.k_list) {
    for (double eps : config.eps.values()) tasks.push_back({k, eps});
  }
  const auto records = indexed_parallel(
      static_cast<int>(tasks.size()), config.threads, [&](int i) {
        const Task& t = tasks[static_cast<std::size_t>(i)];
        ode::ModalOperatorParams params(config.n, t.eps, t.k);
        return ode::modal_decay_check(params, 1.0, mopts);
      });

  bool all_pass = true;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ode::DecayRecord& d = records[i];
    rec.rows.push_back({static_cast<double>(tasks[i].k), tasks[i].eps, d.alpha_k,
                        d.max_ratio, d.pass ? 1.0 : 0.0});
    all_pass = all_pass && d.pass;
  }
  rec.checks.push_back(make_bound_check("decay_all_pass", all_pass ? 1.0 : 0.0, 1.0, false));

  // synthetic two-mode profile: slowest mode dominates omega(rho)
  {
    const double eps_syn = 1e-4;
    ode::ModalOperatorParams p1(config.n, eps_syn, 1);
    ode::ModalOperatorParams p2(config.n, eps_syn, 2);
    ode::OdeSolution v1 = ode::solve_bounded_mode(p1, 1.0, mopts);
    ode::OdeSolution v2 = ode::solve_bounded_mode(p2, 0.5, mopts);
    std::vector<const ode::OdeSolution*> modes = {&v1, &v2};
    std::vector<double> rho(20);
    for (std::size_t i = 0; i < rho.size(); ++i) {
      rho[i] = 0.05 * std::pow(10.0, static_cast<double>(i) / (rho.size() - 1));
    }
    const ode::DecayProfile prof = ode::decay_profile(modes, rho);
    const double slope = prof.fit ? prof.fit->slope : 0.0;
    rec.checks.push_back(make_check("omega_slope", slope, rates::alpha(dim), 0.05));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// local gap (upper-bound consistency)
// ---------------------------------------------------------------------------

namespace {

struct LocalGapSolve {
  pde::FieldSolution sol;
  bool converged = false;
};

LocalGapSolve solve_local_gap(const ExperimentConfig& config,
                              const geom::GapMap& map, int nx, int ny,
                              const pde::FieldSolution* seed = nullptr) {
  auto grid = std::make_shared<geom::CurvilinearGrid>(
      geom::build_gap_grid(map, nx, ny, geom::GradingSpec()));
  pde::DiscreteProblem problem;
  problem.grid = grid;
  problem.coeffs = geom::gap_coefficient_field(*grid, map, rates::Dimension(config.n), 1);
  problem.bcs.left = pde::BoundaryCondition::natural_degenerate();
  const bool parabolic = config.dirichlet == "parabolic";
  const double eps = map.eps;
  problem.bcs.right = pde::BoundaryCondition::dirichlet(
      [parabolic, eps](double, double eta, double, double) {
        if (!parabolic) return 1.0;
        const double t = eta / eps;
        return 1.0 - 0.5 * t * t;
      });
  problem.bcs.bottom = pde::BoundaryCondition::insulating();
  problem.bcs.top = pde::BoundaryCondition::insulating();

  linalg::SolverOptions opts = pde::default_elliptic_options();
  LocalGapSolve out;
  if (seed) {
    const pde::AssembledSystem sys = pde::assemble(problem);
    const std::vector<double> guess =
        pde::transfer_cell_field(*seed->grid, seed->u, *grid);
    linalg::SolveResult res = pde::equilibrated_solve(sys.matrix, sys.rhs, opts, guess);
    out.sol.grid = grid;
    out.sol.n = problem.coeffs.n;
    out.sol.k = problem.coeffs.k;
    out.sol.u = std::move(res.x);
    out.sol.report = std::move(res.report);
    pde::reconstruct_gradient(out.sol);
  } else {
    out.sol = pde::solve(problem, opts);
  }
  out.converged = out.sol.report.converged;
  return out;
}

double annulus_sup(const pde::FieldSolution& sol, double r_lo, double r_hi) {
  const geom::CurvilinearGrid& g = *sol.grid;
  double sup = 0.0;
  int count = 0;
  for (int c = 0; c < g.cells(); ++c) {
    const double rho = g.cell_r[static_cast<std::size_t>(c)];
    if (rho >= r_lo && rho <= r_hi) {
      sup = std::max(sup, sol.amplitude[static_cast<std::size_t>(c)]);
      ++count;
    }
  }
  if (count == 0) throw std::runtime_error("annulus_sup: empty annulus");
  return sup;
}

}  // namespace

RunRecord run_local_gap(const ExperimentConfig& config) {
  const rates::Dimension dim(config.n);
  const double alpha = rates::alpha(dim);
  RunRecord rec;
  rec.config = config;
  rec.columns = {"R", "eps_plus_R2", "sup_coarse", "sup_fine", "delta", "converged"};

  const double eps = config.eps.start;
  const geom::InclusionShape shape = shape_from_config(config);
  const geom::GapMap map(shape, eps);
  const double r0 = shape.patch_radius;

  const LocalGapSolve coarse =
      solve_local_gap(config, map, config.grid.coarse_nx, config.grid.coarse_ny);
  const LocalGapSolve fine = solve_local_gap(config, map, config.grid.fine_nx,
                                             config.grid.fine_ny, &coarse.sol);

  std::vector<double> radii;
  for (double r = std::sqrt(eps); 2.0 * r <= r0 * (1.0 + 1e-12); r *= 2.0) {
    radii.push_back(r);
  }
  if (radii.empty() || radii.back() < 0.5 * r0 * (1.0 - 1e-12)) {
    radii.push_back(0.5 * r0);
  }

  std::vector<double> xs, sups;
  double max_delta = 0.0;
  for (double r : radii) {
    const double s_c = annulus_sup(coarse.sol, r, 2.0 * r);
    const double s_f = annulus_sup(fine.sol, r, 2.0 * r);
    const double delta = std::fabs(s_c - s_f) / s_f;
    max_delta = std::max(max_delta, delta);
    rec.rows.push_back({r, eps + r * r, s_c, s_f, delta,
                        (coarse.converged && fine.converged) ? 1.0 : 0.0});
    xs.push_back(eps + r * r);
    sups.push_back(s_f);
  }

  NamedFit nf;
  nf.name = "annulus_sup_vs_eps_plus_R2";
  nf.fit = fit_rate(xs, sups);
  nf.target = 0.5 * (alpha - 1.0);
  nf.tol = 0.0;  // bracketed by the two checks below
  nf.pass = true;
  rec.fits.push_back(nf);

  rec.checks.push_back(
      make_bound_check("annulus_slope_upper", rec.fits[0].fit.slope, -0.24, true));
  rec.checks.push_back(make_bound_check("annulus_slope_lower", rec.fits[0].fit.slope,
                                        0.5 * (alpha - 1.0) - 0.05, false));
  rec.checks.push_back(make_bound_check("grid_delta_max", max_delta, 0.01, true));
  rec.checks.push_back(make_bound_check(
      "converged", (coarse.converged && fine.converged) ? 1.0 : 0.0, 1.0, false));
  return rec;
}

// ---------------------------------------------------------------------------
// emission
// ---------------------------------------------------------------------------

void emit_results(const RunRecord& record, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  io::write_csv(dir + "/results.csv", record.columns, record.rows);
  io::write_text_file(dir + "/config.snapshot", emit_config(record.config));

  io::JsonNode root = io::JsonNode::object();
  root.set("experiment", io::JsonNode::string(record.config.id));
  root.set("n", io::JsonNode::integer(record.config.n));
  io::JsonNode cols = io::JsonNode::array();
  for (const auto& c : record.columns) cols.push(io::JsonNode::string(c));
  root.set("columns", std::move(cols));
  root.set("row_count", io::JsonNode::integer(static_cast<long long>(record.rows.size())));

  io::JsonNode fits = io::JsonNode::array();
  for (const auto& f : record.fits) {
    io::JsonNode fj = io::JsonNode::object();
    fj.set("name", io::JsonNode::string(f.name));
    fj.set("slope", io::JsonNode::number(f.fit.slope));
    fj.set("intercept", io::JsonNode::number(f.fit.intercept));
    fj.set("max_residual", io::JsonNode::number(f.fit.max_residual));
    fj.set("window_lo", io::JsonNode::number(f.fit.window_lo));
    fj.set("window_hi", io::JsonNode::number(f.fit.window_hi));
    fj.set("target", io::JsonNode::number(f.target));
    fj.set("tol", io::JsonNode::number(f.tol));
    fj.set("dropped_first_point", io::JsonNode::boolean(f.dropped_first_point));
    fj.set("pass", io::JsonNode::boolean(f.pass));
    fits.push(std::move(fj));
  }
  root.set("fits", std::move(fits));

  io::JsonNode checks = io::JsonNode::array();
  for (const auto& c : record.checks) {
    io::JsonNode cj = io::JsonNode::object();
    cj.set("name", io::JsonNode::string(c.name));
    cj.set("value", io::JsonNode::number(c.value));
    cj.set("target", io::JsonNode::number(c.target));
    cj.set("tol", io::JsonNode::number(c.tol));
    cj.set("pass", io::JsonNode::boolean(c.pass));
    checks.push(std::move(cj));
  }
  root.set("checks", std::move(checks));
  root.set("all_pass", io::JsonNode::boolean(record.all_pass()));
  io::write_text_file(dir + "/summary.json", root.dump());

  for (const auto& f : record.fits) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < f.fit.log_x.size(); ++i) {
      const double x = std::exp(f.fit.log_x[i]);
      const double y = std::exp(f.fit.log_y[i]);
      const double fit_y = std::exp(f.fit.intercept + f.fit.slope * f.fit.log_x[i]);
      rows.push_back({x, y, fit_y});
    }
    io::write_csv(dir + "/fit_" + f.name + ".csv", {"x", "y", "fit"}, rows);
  }
}

}  // namespace gaplab::experiments
