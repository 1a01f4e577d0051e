#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gaplab/radial_grid.hpp"
#include "gaplab/ratefit.hpp"
#include "gaplab/rates.hpp"
#include "gaplab/sparse.hpp"

namespace gaplab::ode {

/// Singular radial operator acting on the k-th spherical-harmonic
/// coefficient of solutions of div((eps + |y'|^2) grad v) = 0:
///   L_k V = V'' + ((n-2)/r + 2r/(eps + r^2)) V' - k(k+n-3)/r^2 V.
struct ModalOperatorParams {
  int n = 3;
  double eps = 1e-3;
  int k = 1;

  ModalOperatorParams(int n_, double eps_, int k_);
  double mu() const { return static_cast<double>(k) * static_cast<double>(k + n - 3); }
};

/// Dirichlet two-point problem for L_k on a graded mesh, assembled as -L_k
/// so the matrix has positive diagonal. `diagonally_dominant` is false when
/// the mesh is too coarse for the convection term (flagged, not fatal).
struct ModalBvp {
  linalg::Tridiagonal matrix;  // interior unknowns
  std::vector<double> rhs;
  bool diagonally_dominant = true;
};

ModalBvp assemble_modal_bvp(const ModalOperatorParams& params,
                            std::span<const double> r, double left_value,
                            double right_value,
                            std::span<const double> forcing = {});

/// L_k applied to nodal values by the same stencils; interior nodes only.
std::vector<double> apply_modal_operator(const ModalOperatorParams& params,
                                         std::span<const double> r,
                                         std::span<const double> v);

struct ExtrapolationRecord {
  std::array<double, 3> a_levels{};      // cutoffs a, a/2, a/4
  double probe_r = 0.0;                  // node nearest sqrt(eps)
  std::array<double, 3> probe_values{};  // solution at the probe per level
  double probe_extrapolated = 0.0;
  double max_rel_spread = 0.0;  // Richardson correction, relative
};

struct OdeSolution {
  std::vector<double> r;
  std::vector<double> v;
  std::vector<double> dv;
  double left_value = 0.0;
  double right_value = 1.0;
  ExtrapolationRecord extrapolation;

  double value_at(double rq) const;  // linear interpolation on the mesh
};

struct ModalSolveOptions {
  double a_cut = 0.0;  // <= 0 selects max(1e-8, 1e-4 * eps)
  int points_per_octave = 96;
};

/// Bounded-branch solve of L_k V = 0 with V(1) = right_value, selected by a
/// V(a_cut) -> 0 anchor over cutoffs a, a/2, a/4 and Richardson
/// extrapolation toward a_cut -> 0.
OdeSolution solve_bounded_mode(const ModalOperatorParams& params,
                               double right_value,
                               const ModalSolveOptions& opts = {});

/// The h-function: unique bounded solution of L_1 h = 0, h(1) = 1, computed
/// with the first-order-accurate anchor h(a) = a. Throws if the discrete
/// solution is not strictly increasing.
OdeSolution solve_h(const ModalOperatorParams& params,
                    const ModalSolveOptions& opts = {});

/// Two-sided certificate r <= h <= r^alpha plus the power-envelope lower
/// bound h >= inf_ratio * r^beta (eps + r^2)^((alpha-beta)/2).
struct HBoundCertificate {
  double beta = 0.0;
  double alpha = 0.0;
  double min_h_over_r = 0.0;        // >= 1 - 1e-8 expected
  double max_h_over_r_alpha = 0.0;  // <= 1 + 1e-8 expected
  double inf_envelope_ratio = 0.0;  // fitted 1/C(beta)
  bool monotone = false;
  bool lower_pass = false;
  bool upper_pass = false;
  bool pass = false;
};

HBoundCertificate verify_h_bounds(const OdeSolution& sol, rates::Dimension dim,
                                  double eps, double beta);

/// Maximum-principle decay bound |V_k(r)| <= r^alpha_k |V_k(1)|.
struct DecayRecord {
  int k = 1;
  double alpha_k = 0.0;
  double max_ratio = 0.0;  // sup |V| / (r^alpha_k |V(1)|)
  bool pass = false;
  OdeSolution solution;
};

DecayRecord modal_decay_check(const ModalOperatorParams& params, double right_value,
                              const ModalSolveOptions& opts = {});

/// Forcing H = A' + B with |A| <= C r and |B| <= C; the fitted constants
/// are measured on the solver mesh.
struct ForcingDecomposition {
  std::function<double(double)> A;
  std::function<double(double)> B;
  double sup_A_over_r = 0.0;
  double sup_B = 0.0;

  void measure_bounds(std::span<const double> r);
};

/// Reduction-of-order particular solution v = h w of L_1 v = H, with
///   w(r) = int_0^r G(s)^-1 int_0^s h t^(n-2)(eps + t^2) H(t) dt ds,
///   G = h^2 r^(n-2)(eps + r^2).
/// The A' part is integrated by summation-by-parts so A is never
/// differentiated numerically.
struct ParticularSolution {
  OdeSolution v;
  double sup_ratio = 0.0;  // fitted sup |v| / r^(1+alpha)
};

ParticularSolution particular_solution(const ModalOperatorParams& params,
                                       const OdeSolution& h,
                                       const ForcingDecomposition& forcing);

/// Least-squares split U = C1 h + c r^(1+alpha) over a radius window,
/// separating the homogeneous amplitude from the forced remainder.
struct U11Decomposition {
  double c1 = 0.0;
  double remainder_coeff = 0.0;
  double remainder_sup = 0.0;  // sup |U - C1 h| over the window
  bool remainder_negligible = false;
  std::optional<fitting::RateFit> remainder_fit;
};

U11Decomposition u11_decompose(std::span<const double> r_samples,
                               std::span<const double> u_samples,
                               const OdeSolution& h, double alpha,
                               double window_lo, double window_hi);

/// sup |F(r)| / ( r^gamma (eps + r^2)^(1-s) )
double weighted_norm(std::span<const double> r, std::span<const double> f,
                     double eps, double gamma, double s);

/// Root-sum-square modal profile omega(rho) = sqrt(sum_k V_k(rho)^2) and
/// its log-log slope over the given radii.
struct DecayProfile {
  std::vector<double> rho;
  std::vector<double> omega;
  std::optional<fitting::RateFit> fit;
};

DecayProfile decay_profile(std::span<const OdeSolution* const> modes,
                           std::span<const double> rho);

}  // namespace gaplab::ode
