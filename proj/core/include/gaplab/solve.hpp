#pragma once

#include <complex>
#include <span>

#include "gaplab/problem.hpp"

namespace gaplab::pde {

/// Solver defaults for the degenerate elliptic systems assembled here.
inline linalg::SolverOptions default_elliptic_options() {
  linalg::SolverOptions opts;
  opts.tol = 1e-10;
  opts.max_iter = 60000;
  opts.precond = linalg::Preconditioner::ssor;
  return opts;
}

/// Symmetrically equilibrated Krylov solve (D^-1/2 A D^-1/2): the weights
/// r^(n-2) spread row scales over many orders of magnitude, and the scaled
/// residual test distributes accuracy evenly across them. Picks pcg when
/// the matrix is symmetric within 1e-12, bicgstab otherwise.
linalg::SolveResult equilibrated_solve(const linalg::CsrMatrix& matrix,
                                       std::span<const double> rhs,
                                       linalg::SolverOptions opts,
                                       std::span<const double> initial_guess = {});

/// Assemble and solve. Non-convergence is recorded in the report, not
/// thrown.
FieldSolution solve(const DiscreteProblem& problem,
                    linalg::SolverOptions opts = default_elliptic_options());

/// Logical-space gradients mapped through the grid metric to physical
/// (u_r, u_n), plus the modal gradient amplitude
/// sqrt(u_r^2 + u_n^2 + mu_k u^2 / r^2).
void reconstruct_gradient(FieldSolution& sol);

/// max amplitude over cells inside the meridian disc r^2 + xn^2 <= radius^2
double sup_amplitude_in_disc(const FieldSolution& sol, double radius);

/// Bilinear interpolation of a cell-centered field at a logical point,
/// clamped to the center range near the edges.
double interpolate_cell_field(const geom::CurvilinearGrid& grid,
                              std::span<const double> values, double xi,
                              double eta);

/// Transfer a cell field between grids over the same logical rectangle
/// (nested-solve initial guesses).
std::vector<double> transfer_cell_field(const geom::CurvilinearGrid& from,
                                        std::span<const double> values,
                                        const geom::CurvilinearGrid& to);

/// First-harmonic benchmark: exterior of two unit spheres with gap eps,
/// solved for w = u_hat - r on the bipolar rectangle. w carries homogeneous
/// Dirichlet data on the axis edges (which contain the point at infinity)
/// and Neumann data -d_nu r = r on the spheres; u_hat = w + r is returned
/// with its gradient assembled from the exact identity part.
struct SphereBenchmark {
  FieldSolution u_hat;            // values w + r, gradients of the full field
  std::vector<double> w;          // raw correction field
  double min_w_over_scale = 0.0;  // min w / max|w|, subsolution check
};

SphereBenchmark solve_reduced_sphere_problem(
    rates::Dimension n, double eps, int n_sigma, int n_tau,
    const geom::GradingSpec& grading,
    linalg::SolverOptions opts = default_elliptic_options(),
    std::span<const double> initial_guess = {});

/// Average of u_hat across the physical gap fiber at radius r_query via
/// 64-point composite midpoint sampling (the first-harmonic gap average up
/// to the fixed mode normalization). For gap-map grids the fiber average
/// reduces to the plain logical average in y_n.
double gap_average(const FieldSolution& sol, double r_query);

/// Manufactured-solution harness. The exact solution and coefficient
/// fields are supplied as complex-analytic functions of the logical
/// coordinates; forcing is generated by complex-step differentiation of
/// the flux components, so the only discretization error measured is the
/// scheme's own.
using CField = std::function<std::complex<double>(std::complex<double>, std::complex<double>)>;

struct ManufacturedCase {
  std::function<geom::CurvilinearGrid(int)> build_grid;  // N -> grid
  std::function<geom::CoefficientField(const geom::CurvilinearGrid&)> build_coeffs;
  CField exact, exact_dxi, exact_deta;
  CField a11, a12, a22, q;  // logical-form fields; a12 may be null
};

struct ConvergenceReport {
  std::vector<int> sizes;
  std::vector<double> l2_errors;
  std::vector<double> orders;  // between successive sizes
  double observed_order = 0.0;  // from the finest pair
};

ConvergenceReport manufactured_convergence(const ManufacturedCase& mcase,
                                           std::span<const int> sizes);

}  // namespace gaplab::pde
