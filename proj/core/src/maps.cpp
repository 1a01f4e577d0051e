#include "gaplab/maps.hpp"

#include <numbers>
#include <string>

namespace gaplab::geom {

MeridianPoint GapMap::forward(double rho, double xn) const {
  const double lo = shape.g(rho) - 0.5 * eps;
  const double hi = shape.f(rho) + 0.5 * eps;
  const double slack = 1e-12 * (hi - lo);
  if (xn < lo - slack || xn > hi + slack) {
    throw std::domain_error("GapMap::forward: point outside the gap fiber");
  }
  const double yn = 2.0 * eps * ((xn - shape.g(rho) + 0.5 * eps) / thickness(rho) - 0.5);
  return {rho, yn};
}

MeridianPoint GapMap::inverse(double rho, double yn) const {
  const double slack = 1e-12 * eps;
  if (yn < -eps - slack || yn > eps + slack) {
    throw std::domain_error("GapMap::inverse: |y_n| exceeds eps");
  }
  return {rho, xn_of(rho, yn)};
}

GapCoeffSample gap_coefficients(const GapMap& map, double rho, double yn) {
  if (rho < 0.0 || rho > map.shape.patch_radius * (1.0 + 1e-12)) {
    throw std::domain_error("gap_coefficients: rho outside [0, R0]");
  }
  if (std::fabs(yn) > map.eps * (1.0 + 1e-12)) {
    throw std::domain_error("gap_coefficients: |y_n| exceeds eps");
  }
  return gap_coefficients_t<double>(map, rho, yn);
}

BipolarMap::BipolarMap(double eps_) : eps(eps_) {
  if (eps_ <= 0.0) throw std::domain_error("BipolarMap: eps must be > 0");
  tau0 = std::acosh(1.0 + 0.5 * eps_);
  c = std::sinh(tau0);
}

BipolarPoint BipolarMap::forward(double sigma, double tau) const {
  const double den = std::cosh(tau) - std::cos(sigma);
  BipolarPoint p;
  if (den == 0.0) {
    p.finite = false;
    p.r = std::numeric_limits<double>::infinity();
    p.xn = std::numeric_limits<double>::infinity();
    p.scale = std::numeric_limits<double>::infinity();
    return p;
  }
  p.r = c * std::sin(sigma) / den;
  p.xn = c * std::sinh(tau) / den;
  p.scale = c / den;
  return p;
}

LogicalPoint BipolarMap::inverse(double r, double xn) const {
  if (r < 0.0) throw std::domain_error("BipolarMap::inverse: r must be >= 0");
  const std::complex<double> z(xn, r);
  const std::complex<double> w = std::log((z + c) / (z - c));
  LogicalPoint p;
  p.tau = w.real();
  // the meridian half-plane r >= 0 maps to Im(w) in [-pi, 0]
  p.sigma = -w.imag();
  if (p.sigma < 0.0) {
    // branch cut: the axis segment between the foci carries sigma = pi
    p.sigma = std::numbers::pi;
  }
  return p;
}

BipolarMap::Derivs BipolarMap::derivatives(double sigma, double tau) const {
  const double ch = std::cosh(tau);
  const double sh = std::sinh(tau);
  const double cs = std::cos(sigma);
  const double sn = std::sin(sigma);
  const double den = ch - cs;
  if (den == 0.0) {
    throw std::domain_error("BipolarMap::derivatives: degenerate point (0,0)");
  }
  Derivs d;
  const double den2 = den * den;
  d.r_s = c * (cs * ch - 1.0) / den2;
  d.r_t = -c * sn * sh / den2;
  d.xn_s = -c * sn * sh / den2 * 1.0;
  d.xn_t = c * (1.0 - ch * cs) / den2;
  d.scale = c / den;
  return d;
}

double BipolarMap::dnu_r_on_sphere(double sigma, double tau_edge) const {
  const double den = std::cosh(tau_edge) - std::cos(sigma);
  // (1/h) dr/dtau with the sign of the outward (into-sphere) direction
  const double inward = -std::sin(sigma) * std::sinh(tau_edge) / den;
  return (tau_edge >= 0.0) ? inward : -inward;
}

}  // namespace gaplab::geom
