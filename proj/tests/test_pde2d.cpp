#include <cmath>
#include <memory>
#include <numbers>

#include "doctest.h"
#include "gaplab/solve.hpp"
#include "oracles.hpp"

using namespace gaplab;
using cplx = std::complex<double>;

namespace {

std::shared_ptr<geom::CurvilinearGrid> square_grid(int n) {
  return std::make_shared<geom::CurvilinearGrid>(
      geom::make_cartesian_grid(0.0, 1.0, 0.0, 1.0, n, n));
}

}  // namespace

TEST_CASE("affine data is reproduced exactly on the unit square") {
  auto grid = square_grid(24);
  pde::DiscreteProblem problem;
  problem.grid = grid;
  problem.coeffs = geom::unit_coefficients(*grid);
  auto data = [](double xi, double, double, double) { return xi; };
  problem.bcs.left = pde::BoundaryCondition::dirichlet(data);
  problem.bcs.right = pde::BoundaryCondition::dirichlet(data);
  problem.bcs.bottom = pde::BoundaryCondition::dirichlet(data);
  problem.bcs.top = pde::BoundaryCondition::dirichlet(data);
  const auto sol = pde::solve(problem);
  CHECK(sol.report.converged);
  CHECK(sol.report.solver == "pcg");
  for (int j = 0; j < grid->ny; ++j) {
    for (int i = 0; i < grid->nx; ++i) {
      const double expect = grid->xc[static_cast<std::size_t>(i)];
      CHECK(std::fabs(sol.u[static_cast<std::size_t>(grid->cell_index(i, j))] - expect) < 1e-10);
    }
  }
}

TEST_CASE("pure Neumann rows sum to zero and conservation holds") {
  auto grid = square_grid(16);
  pde::DiscreteProblem problem;
  problem.grid = grid;
  problem.coeffs = geom::unit_coefficients(*grid);
  problem.bcs.left = pde::BoundaryCondition::insulating();
  problem.bcs.right = pde::BoundaryCondition::insulating();
  problem.bcs.bottom = pde::BoundaryCondition::insulating();
  problem.bcs.top = pde::BoundaryCondition::insulating();
  const auto sys0 = pde::assemble(problem);
  for (int r = 0; r < sys0.matrix.rows; ++r) {
    double sum = 0.0;
    for (auto p = sys0.matrix.row_ptr[static_cast<std::size_t>(r)];
         p < sys0.matrix.row_ptr[static_cast<std::size_t>(r) + 1]; ++p) {
      sum += sys0.matrix.vals[static_cast<std::size_t>(p)];
    }
    CHECK(std::fabs(sum) < 1e-12);
  }

  // with q = 1 and f = 1 the balance sum(q u vol) = sum(f vol) must hold
  problem.coeffs.cell_q.assign(problem.coeffs.cell_q.size(), 1.0);
  problem.rhs_g = [](double, double) { return -1.0; };  // div(A grad u) - u = -1
  auto opts = pde::default_elliptic_options();
  opts.tol = 1e-12;
  const auto sol = pde::solve(problem, opts);
  CHECK(sol.report.converged);
  double mass = 0.0, forcing = 0.0;
  for (int j = 0; j < grid->ny; ++j) {
    for (int i = 0; i < grid->nx; ++i) {
      const double area = grid->logical_area(i, j);
      mass += sol.u[static_cast<std::size_t>(grid->cell_index(i, j))] * area;
      forcing += 1.0 * area;
    }
  }
  CHECK(std::fabs(mass - forcing) / forcing < 1e-9);

  // nonzero influx through one edge balances the absorbed mass:
  // sum(q u vol) = boundary flux = 1 (unit conormal data on unit edge)
  problem.rhs_g = nullptr;
  problem.bcs.right = pde::BoundaryCondition::neumann(
      [](double, double, double, double) { return 1.0; });
  const auto sol2 = pde::solve(problem, opts);
  CHECK(sol2.report.converged);
  double mass2 = 0.0;
  for (int j = 0; j < grid->ny; ++j) {
    for (int i = 0; i < grid->nx; ++i) {
      mass2 += sol2.u[static_cast<std::size_t>(grid->cell_index(i, j))] *
               grid->logical_area(i, j);
    }
  }
  CHECK(std::fabs(mass2 - 1.0) < 1e-9);
}

TEST_CASE("divergence forcing matches the equivalent scalar forcing") {
  // div(grad u) = div F with F = grad(x^2 + y^2) reproduces u = x^2 + y^2;
  // the same field via G = 4 must agree
  auto grid = square_grid(32);
  auto exact = [](double x, double y) { return x * x + y * y; };
  auto data = [exact](double xi, double eta, double, double) { return exact(xi, eta); };

  pde::DiscreteProblem pf;
  pf.grid = grid;
  pf.coeffs = geom::unit_coefficients(*grid);
  pf.bcs.left = pde::BoundaryCondition::dirichlet(data);
  pf.bcs.right = pde::BoundaryCondition::dirichlet(data);
  pf.bcs.bottom = pde::BoundaryCondition::dirichlet(data);
  pf.bcs.top = pde::BoundaryCondition::dirichlet(data);
  pde::DiscreteProblem pg = pf;
  pf.rhs_fx = [](double x, double) { return 2.0 * x; };
  pf.rhs_fy = [](double, double y) { return 2.0 * y; };
  pg.rhs_g = [](double, double) { return 4.0; };

  linalg::SolverOptions opts;
  opts.tol = 1e-12;
  const auto sf = pde::solve(pf, opts);
  const auto sg = pde::solve(pg, opts);
  CHECK(sf.report.converged);
  CHECK(sg.report.converged);
  double worst_pair = 0.0, worst_exact = 0.0;
  for (int j = 0; j < grid->ny; ++j) {
    for (int i = 0; i < grid->nx; ++i) {
      const std::size_t c = static_cast<std::size_t>(grid->cell_index(i, j));
      worst_pair = std::max(worst_pair, std::fabs(sf.u[c] - sg.u[c]));
      worst_exact = std::max(
          worst_exact,
          std::fabs(sf.u[c] - exact(grid->xc[static_cast<std::size_t>(i)],
                                    grid->yc[static_cast<std::size_t>(j)])));
    }
  }
  CHECK(worst_pair < 1e-9);
  CHECK(worst_exact < 1e-3);  // quadratic exact: second-order discretization error
}

TEST_CASE("discrete maximum principle") {
  auto grid = square_grid(20);
  pde::DiscreteProblem problem;
  problem.grid = grid;
  problem.coeffs = geom::unit_coefficients(*grid);
  auto data = [](double xi, double eta, double, double) {
    return std::sin(3.0 * xi) * std::cos(2.0 * eta) - 0.3;
  };
  problem.bcs.left = pde::BoundaryCondition::dirichlet(data);
  problem.bcs.right = pde::BoundaryCondition::dirichlet(data);
  problem.bcs.bottom = pde::BoundaryCondition::dirichlet(data);
  problem.bcs.top = pde::BoundaryCondition::dirichlet(data);

  double bmin = 1e300, bmax = -1e300;
  for (int i = 0; i <= 200; ++i) {
    for (double edge : {0.0, 1.0}) {
      const double t = i / 200.0;
      bmin = std::min({bmin, data(t, edge, 0, 0), data(edge, t, 0, 0)});
      bmax = std::max({bmax, data(t, edge, 0, 0), data(edge, t, 0, 0)});
    }
  }
  for (bool with_mass : {false, true}) {
    if (with_mass) problem.coeffs.cell_q.assign(problem.coeffs.cell_q.size(), 2.0);
    const auto sol = pde::solve(problem);
    CHECK(sol.report.converged);
    for (double v : sol.u) {
      CHECK(v >= bmin - 1e-10);
      CHECK(v <= bmax + 1e-10);
    }
  }
}

TEST_CASE("bipolar assembly is symmetric") {
  geom::BipolarMap map(1e-2);
  auto grid = std::make_shared<geom::CurvilinearGrid>(
      geom::build_bipolar_grid(map, 48, 24, geom::GradingSpec()));
  pde::DiscreteProblem problem;
  problem.grid = grid;
  problem.coeffs = geom::bipolar_coefficients(*grid, rates::Dimension(3), 1);
  problem.bcs.left = pde::BoundaryCondition::dirichlet_zero();
  problem.bcs.right = pde::BoundaryCondition::dirichlet_zero();
  problem.bcs.bottom = pde::BoundaryCondition::neumann(
      [](double, double, double r, double) { return r; });
  problem.bcs.top = pde::BoundaryCondition::neumann(
      [](double, double, double r, double) { return r; });
  const auto sys = pde::assemble(problem);
  CHECK(linalg::is_symmetric(sys.matrix, 1e-12));
}

TEST_CASE("reduced sphere benchmark: subsolution and axis behavior") {
  const auto bench = pde::solve_reduced_sphere_problem(
      rates::Dimension(3), 1e-2, 96, 48, geom::GradingSpec());
  CHECK(bench.u_hat.report.converged);
  // u_hat >= r everywhere (w >= -1e-8 relative)
  CHECK(bench.min_w_over_scale >= -1e-8);

  const geom::CurvilinearGrid& g = *bench.u_hat.grid;
  // toward the infinity corner (sigma, tau) = (0, 0) the correction decays:
  // cells far out in physical space carry a vanishing share of w
  double wmax = 0.0;
  for (double v : bench.w) wmax = std::max(wmax, std::fabs(v));
  double far_field = 0.0;
  int far_cells = 0;
  for (int c = 0; c < g.cells(); ++c) {
    const std::size_t u = static_cast<std::size_t>(c);
    const double dist2 = g.cell_r[u] * g.cell_r[u] + g.cell_xn[u] * g.cell_xn[u];
    if (dist2 > 400.0) {
      far_field = std::max(far_field, std::fabs(bench.w[u]));
      ++far_cells;
    }
  }
  CHECK(far_cells > 0);
  CHECK(far_field < 0.02 * wmax);

  // gap average of the identity field: u = r gives back r_query
  pde::FieldSolution ident;
  ident.grid = bench.u_hat.grid;
  ident.n = 3;
  ident.k = 1;
  ident.u.assign(g.cell_r.begin(), g.cell_r.end());
  const double rq = 0.2;
  CHECK(pde::gap_average(ident, rq) == doctest::Approx(rq).epsilon(5e-3));

  // constant field averages to the constant
  pde::FieldSolution constant = ident;
  constant.u.assign(constant.u.size(), 3.25);
  CHECK(pde::gap_average(constant, 0.1) == doctest::Approx(3.25).epsilon(1e-12));

  // benchmark gap average dominates r (u_hat >= r pointwise)
  for (double r : {0.05, 0.1, 0.2}) {
    CHECK(pde::gap_average(bench.u_hat, r) >= r * (1.0 - 1e-6));
  }
}

TEST_CASE("gradient amplitude of the identity mode is sqrt(2) at n = 3") {
  geom::BipolarMap map(1e-2);
  auto grid = std::make_shared<geom::CurvilinearGrid>(
      geom::build_bipolar_grid(map, 128, 64, geom::GradingSpec()));
  pde::FieldSolution sol;
  sol.grid = grid;
  sol.n = 3;
  sol.k = 1;
  sol.u.assign(grid->cell_r.begin(), grid->cell_r.end());
  pde::reconstruct_gradient(sol);
  for (int j = 0; j < grid->ny; ++j) {
    for (int i = 0; i < grid->nx; ++i) {
      const double sigma = grid->xc[static_cast<std::size_t>(i)];
      if (sigma < 1.0 || sigma > 2.5) continue;  // away from the corner/axis
      const std::size_t c = static_cast<std::size_t>(grid->cell_index(i, j));
      CHECK(sol.amplitude[c] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
    }
  }

  // constant field in a k = 0 problem has zero amplitude
  pde::FieldSolution flat;
  flat.grid = grid;
  flat.n = 3;
  flat.k = 0;
  flat.u.assign(static_cast<std::size_t>(grid->cells()), 7.0);
  pde::reconstruct_gradient(flat);
  // zero up to roundoff amplified by the metric transform near the corner
  for (double a : flat.amplitude) CHECK(std::fabs(a) < 1e-7);
}

TEST_CASE("grid refinement moves U11 by less than half a percent") {
  const double eps = 1e-2;
  const auto coarse = pde::solve_reduced_sphere_problem(rates::Dimension(3), eps, 257,
                                                        129, geom::GradingSpec());
  const auto fine = pde::solve_reduced_sphere_problem(rates::Dimension(3), eps, 513,
                                                      257, geom::GradingSpec());
  REQUIRE(coarse.u_hat.report.converged);
  REQUIRE(fine.u_hat.report.converged);
  const double u_c = pde::gap_average(coarse.u_hat, std::sqrt(eps));
  const double u_f = pde::gap_average(fine.u_hat, std::sqrt(eps));
  CHECK(std::fabs(u_c - u_f) / u_f < 0.005);
}

TEST_CASE("manufactured convergence: unit square") {
  pde::ManufacturedCase mcase;
  mcase.build_grid = [](int n) {
    return geom::make_cartesian_grid(0.0, 1.0, 0.0, 1.0, n, n);
  };
  mcase.build_coeffs = [](const geom::CurvilinearGrid& g) {
    return geom::unit_coefficients(g);
  };
  const double pi = std::numbers::pi;
  mcase.exact = [pi](cplx x, cplx y) { return sin(pi * x) * cos(pi * y); };
  mcase.exact_dxi = [pi](cplx x, cplx y) { return pi * cos(pi * x) * cos(pi * y); };
  mcase.exact_deta = [pi](cplx x, cplx y) { return -pi * sin(pi * x) * sin(pi * y); };
  mcase.a11 = [](cplx, cplx) { return cplx(1.0); };
  mcase.a22 = [](cplx, cplx) { return cplx(1.0); };
  mcase.q = [](cplx, cplx) { return cplx(0.0); };

  const std::vector<int> sizes = {16, 32, 64};
  const auto rep = pde::manufactured_convergence(mcase, sizes);
  CHECK(rep.observed_order == doctest::Approx(2.0).epsilon(0.05));

  // affine exact is reproduced to machine precision at any resolution
  pde::ManufacturedCase affine = mcase;
  affine.exact = [](cplx x, cplx y) { return 2.0 * x - 3.0 * y + 0.5; };
  affine.exact_dxi = [](cplx, cplx) { return cplx(2.0); };
  affine.exact_deta = [](cplx, cplx) { return cplx(-3.0); };
  const std::vector<int> small = {12, 24};
  const auto rep2 = pde::manufactured_convergence(affine, small);
  CHECK(rep2.l2_errors[0] < 1e-11);
  CHECK(rep2.l2_errors[1] < 1e-11);
}

TEST_CASE("manufactured convergence: gap map with cross terms") {
  const double eps = 1e-2;
  const geom::InclusionShape shape = geom::InclusionShape::unit_ball();
  const geom::GapMap map(shape, eps);
  const rates::Dimension dim(3);

  pde::ManufacturedCase mcase;
  mcase.build_grid = [map](int n) {
    return geom::build_gap_grid(map, n, std::max(8, n / 4), geom::GradingSpec());
  };
  mcase.build_coeffs = [map, dim](const geom::CurvilinearGrid& g) {
    return geom::gap_coefficient_field(g, map, dim, 1);
  };
  // physical exact u = rho^2 + xn^2 expressed in logical coordinates
  mcase.exact = [map](cplx rho, cplx yn) {
    const cplx xn = map.xn_of(rho, yn);
    return rho * rho + xn * xn;
  };
  mcase.exact_dxi = [map, eps](cplx rho, cplx yn) {
    const cplx xn = map.xn_of(rho, yn);
    const cplx dxn_drho = (yn / (2.0 * eps) + 0.5) * map.shape.dseparation(rho) +
                          map.shape.dg(rho);
    return 2.0 * rho + 2.0 * xn * dxn_drho;
  };
  mcase.exact_deta = [map, eps](cplx rho, cplx yn) {
    const cplx xn = map.xn_of(rho, yn);
    return 2.0 * xn * map.thickness(rho) / (2.0 * eps);
  };
  auto fold = [](cplx rho) { return rho; };  // rho^{n-2} at n = 3
  mcase.a11 = [map, fold](cplx rho, cplx) { return fold(rho) * map.thickness(rho); };
  mcase.a12 = [map, fold](cplx rho, cplx yn) {
    const auto s = geom::gap_coefficients_t<cplx>(map, rho, yn);
    return fold(rho) * s.a12;
  };
  mcase.a22 = [map, fold](cplx rho, cplx yn) {
    const auto s = geom::gap_coefficients_t<cplx>(map, rho, yn);
    return fold(rho) * s.a22;
  };
  mcase.q = [map](cplx rho, cplx) {
    return map.thickness(rho) / rho;  // mu_1 rho^{n-4} D at n = 3, k = 1
  };

  const std::vector<int> sizes = {32, 64, 128};
  const auto rep = pde::manufactured_convergence(mcase, sizes);
  CHECK(rep.observed_order > 1.9);
}

TEST_CASE("manufactured convergence: bipolar map") {
  const double eps = 0.1;
  const geom::BipolarMap map(eps);
  const rates::Dimension dim(3);

  pde::ManufacturedCase mcase;
  // production grading: the sigma clustering resolves the corner at infinity
  mcase.build_grid = [map](int n) {
    return geom::build_bipolar_grid(map, n, std::max(8, n / 2), geom::GradingSpec());
  };
  mcase.build_coeffs = [dim](const geom::CurvilinearGrid& g) {
    return geom::bipolar_coefficients(g, dim, 1);
  };
  const double t0 = map.tau0;
  mcase.exact = [t0](cplx s, cplx t) {
    return sin(s) * cos(std::numbers::pi * t / (3.0 * t0));
  };
  mcase.exact_dxi = [t0](cplx s, cplx t) {
    return cos(s) * cos(std::numbers::pi * t / (3.0 * t0));
  };
  mcase.exact_deta = [t0](cplx s, cplx t) {
    return -sin(s) * (std::numbers::pi / (3.0 * t0)) *
           sin(std::numbers::pi * t / (3.0 * t0));
  };
  auto r_of = [map](cplx s, cplx t) { return map.r_of(s, t); };
  mcase.a11 = r_of;
  mcase.a22 = r_of;
  mcase.q = [map](cplx s, cplx t) {
    const cplx den = cosh(t) - cos(s);
    const cplx h2 = map.c * map.c / (den * den);
    return h2 / map.r_of(s, t);  // (n-2) r^{n-4} h^2 at n = 3
  };

  const std::vector<int> sizes = {32, 64, 128};
  const auto rep = pde::manufactured_convergence(mcase, sizes);
  CHECK(rep.observed_order > 1.9);
}

TEST_CASE("field transfer between grids") {
  auto coarse = square_grid(16);
  auto fine = square_grid(32);
  std::vector<double> vals(static_cast<std::size_t>(coarse->cells()));
  for (int j = 0; j < coarse->ny; ++j) {
    for (int i = 0; i < coarse->nx; ++i) {
      vals[static_cast<std::size_t>(coarse->cell_index(i, j))] =
          2.0 * coarse->xc[static_cast<std::size_t>(i)] -
          coarse->yc[static_cast<std::size_t>(j)];
    }
  }
  const auto out = pde::transfer_cell_field(*coarse, vals, *fine);
  for (int j = 1; j < fine->ny - 1; ++j) {
    for (int i = 1; i < fine->nx - 1; ++i) {
      const double expect = 2.0 * fine->xc[static_cast<std::size_t>(i)] -
                            fine->yc[static_cast<std::size_t>(j)];
      CHECK(out[static_cast<std::size_t>(fine->cell_index(i, j))] ==
            doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("gap average on gap-map grids is the logical fiber mean") {
  const double eps = 1e-3;
  const geom::GapMap map(geom::InclusionShape::unit_ball(), eps);
  auto grid = std::make_shared<geom::CurvilinearGrid>(
      geom::build_gap_grid(map, 64, 16, geom::GradingSpec()));
  pde::FieldSolution sol;
  sol.grid = grid;
  sol.n = 3;
  sol.k = 1;

  sol.u.assign(static_cast<std::size_t>(grid->cells()), 2.5);
  CHECK(pde::gap_average(sol, 0.2) == doctest::Approx(2.5).epsilon(1e-12));

  // odd-in-eta field averages to ~0, radial field returns the query radius
  for (int j = 0; j < grid->ny; ++j) {
    for (int i = 0; i < grid->nx; ++i) {
      sol.u[static_cast<std::size_t>(grid->cell_index(i, j))] =
          grid->yc[static_cast<std::size_t>(j)] / eps;
    }
  }
  CHECK(std::fabs(pde::gap_average(sol, 0.2)) < 1e-10);
  for (int j = 0; j < grid->ny; ++j) {
    for (int i = 0; i < grid->nx; ++i) {
      sol.u[static_cast<std::size_t>(grid->cell_index(i, j))] =
          grid->xc[static_cast<std::size_t>(i)];
    }
  }
  CHECK(pde::gap_average(sol, 0.2) == doctest::Approx(0.2).epsilon(1e-6));
  CHECK_THROWS_AS(pde::gap_average(sol, 0.9), std::domain_error);
}

TEST_CASE("sup amplitude region guard") {
  geom::BipolarMap map(1e-2);
  auto grid = std::make_shared<geom::CurvilinearGrid>(
      geom::build_bipolar_grid(map, 32, 16, geom::GradingSpec()));
  pde::FieldSolution sol;
  sol.grid = grid;
  sol.n = 3;
  sol.k = 1;
  sol.u.assign(static_cast<std::size_t>(grid->cells()), 0.0);
  pde::reconstruct_gradient(sol);
  CHECK_THROWS_AS(pde::sup_amplitude_in_disc(sol, 1e-12), std::runtime_error);
  CHECK(pde::sup_amplitude_in_disc(sol, 0.5) == 0.0);
}
