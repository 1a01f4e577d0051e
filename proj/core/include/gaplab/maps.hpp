#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "gaplab/shapes.hpp"

namespace gaplab::geom {

struct MeridianPoint {
  double r = 0.0;
  double xn = 0.0;
};

/// Change of variables flattening the physical gap onto the cylinder
/// |y_n| < eps at fixed y' = x'. On the meridian plane this is
///   y_n = 2 eps ( (x_n - g + eps/2) / (eps + f - g) - 1/2 ).
struct GapMap {
  InclusionShape shape;
  double eps = 1e-2;

  GapMap(InclusionShape s, double eps_) : shape(s), eps(eps_) {
    if (eps_ <= 0.0) throw std::domain_error("GapMap: eps must be > 0");
  }

  /// fiber thickness D(rho) = eps + f - g, the Jacobian scale of the map
  template <class T>
  T thickness(T rho) const {
    return T(eps) + shape.separation(rho);
  }

  /// physical height as a function of logical coordinates
  template <class T>
  T xn_of(T rho, T yn) const {
    return (yn / (2.0 * eps) + T(0.5)) * thickness(rho) + shape.g(rho) - T(0.5) * eps;
  }

  /// d y_n / d rho at fixed x_n, expressed in logical coordinates
  template <class T>
  T jac_rho(T rho, T yn) const {
    return (-2.0 * eps * shape.dg(rho) - (yn + T(eps)) * shape.dseparation(rho)) /
           thickness(rho);
  }

  /// d y_n / d x_n = 2 eps / D
  template <class T>
  T jac_n(T rho) const {
    return T(2.0 * eps) / thickness(rho);
  }

  MeridianPoint forward(double rho, double xn) const;   // physical -> logical (rho, yn)
  MeridianPoint inverse(double rho, double yn) const;   // logical -> physical (rho, xn)
};

/// Meridian 2x2 restriction of the transformed coefficient matrix
/// 2 eps (d_x y)(d_x y)^t / det(d_x y), evaluated exactly from the map
/// Jacobian. e_rho and e_n are the deviations from the model entries
/// eps + rho^2 and (4 eps^2 + a12^2) / (eps + rho^2).
template <class T>
struct GapCoeffSampleT {
  T a11, a12, a22, e_rho, e_n;
};
using GapCoeffSample = GapCoeffSampleT<double>;

template <class T>
GapCoeffSampleT<T> gap_coefficients_t(const GapMap& map, T rho, T yn) {
  GapCoeffSampleT<T> s;
  const T d = map.thickness(rho);
  s.a11 = d;
  s.a12 = -2.0 * map.eps * map.shape.dg(rho) - (yn + T(map.eps)) * map.shape.dseparation(rho);
  s.a22 = (T(4.0 * map.eps * map.eps) + s.a12 * s.a12) / d;
  const T model = T(map.eps) + rho * rho;
  s.e_rho = d - model;
  s.e_n = s.a22 - (T(4.0 * map.eps * map.eps) + s.a12 * s.a12) / model;
  return s;
}

GapCoeffSample gap_coefficients(const GapMap& map, double rho, double yn);

struct BipolarPoint {
  double r = 0.0;
  double xn = 0.0;
  double scale = 0.0;  // conformal factor h = c / (cosh tau - cos sigma)
  bool finite = true;
};

struct LogicalPoint {
  double sigma = 0.0;
  double tau = 0.0;
};

/// Bipolar chart for the exterior of two unit spheres with gap eps,
/// centers (0, +-(1 + eps/2)). The spheres are the lines tau = +-tau0,
/// the axis is sigma in {0, pi}, and the point at infinity is the
/// ordinary boundary point (sigma, tau) = (0, 0).
struct BipolarMap {
  double eps = 1e-2;
  double tau0 = 0.0;
  double c = 0.0;  // focus height, sinh(tau0)

  explicit BipolarMap(double eps_);

  template <class T>
  T r_of(T sigma, T tau) const {
    using std::cos;
    using std::cosh;
    using std::sin;
    return c * sin(sigma) / (cosh(tau) - cos(sigma));
  }

  template <class T>
  T xn_of(T sigma, T tau) const {
    using std::cos;
    using std::cosh;
    using std::sinh;
    return c * sinh(tau) / (cosh(tau) - cos(sigma));
  }

  BipolarPoint forward(double sigma, double tau) const;
  LogicalPoint inverse(double r, double xn) const;

  /// map derivatives (d r/d sigma, d r/d tau, d xn/d sigma, d xn/d tau)
  struct Derivs {
    double r_s, r_t, xn_s, xn_t, scale;
  };
  Derivs derivatives(double sigma, double tau) const;

  /// outward normal derivative of the radial coordinate on tau = +-tau0;
  /// equals -r on the spheres (normal pointing out of the fluid domain)
  double dnu_r_on_sphere(double sigma, double tau_edge) const;
};

}  // namespace gaplab::geom
