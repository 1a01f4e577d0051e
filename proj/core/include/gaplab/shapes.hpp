#pragma once

#include <cmath>
#include <stdexcept>

namespace gaplab::geom {

/// Axisymmetric inclusion boundary profiles near the gap. The upper and
/// lower surfaces are x_n = eps/2 + f(rho) and x_n = -eps/2 + g(rho) with
/// f(0) = g(0) = 0 and flat tangent planes at the axis.
///
/// unit_ball:            f(rho) = 1 - sqrt(1 - rho^2), g = -f
/// quadratic_perturbed:  f - g = a rho^2 + b rho^(2+gamma), split evenly
///
/// Profile evaluators are templated so that complex-step differentiation
/// can run through them.
struct InclusionShape {
  enum class Kind { unit_ball, quadratic_perturbed };

  Kind kind = Kind::unit_ball;
  double a = 1.0;             // gap curvature (quadratic_perturbed)
  double gamma = 0.5;         // perturbation exponent, in (0,1)
  double b = 0.0;             // perturbation amplitude
  double patch_radius = 0.5;  // R0, radial extent of the graph patch

  static InclusionShape unit_ball(double patch_radius = 0.5) {
    InclusionShape s;
    s.kind = Kind::unit_ball;
    s.patch_radius = patch_radius;
    return s;
  }

  static InclusionShape quadratic_perturbed(double a, double gamma, double b,
                                            double patch_radius = 0.5) {
    if (a <= 0.0) throw std::domain_error("InclusionShape: curvature a must be > 0");
    if (gamma <= 0.0 || gamma >= 1.0) {
      throw std::domain_error("InclusionShape: gamma must lie in (0,1)");
    }
    InclusionShape s;
    s.kind = Kind::quadratic_perturbed;
    s.a = a;
    s.gamma = gamma;
    s.b = b;
    s.patch_radius = patch_radius;
    return s;
  }

  template <class T>
  T f(T rho) const {
    using std::pow;
    using std::sqrt;
    if (kind == Kind::unit_ball) {
      return T(1) - sqrt(T(1) - rho * rho);
    }
    return T(0.5) * (a * rho * rho + b * pow(rho, 2.0 + gamma));
  }

  template <class T>
  T g(T rho) const {
    return -f(rho);
  }

  template <class T>
  T df(T rho) const {
    using std::pow;
    using std::sqrt;
    if (kind == Kind::unit_ball) {
      return rho / sqrt(T(1) - rho * rho);
    }
    return T(0.5) * (2.0 * a * rho + (2.0 + gamma) * b * pow(rho, 1.0 + gamma));
  }

  template <class T>
  T dg(T rho) const {
    return -df(rho);
  }

  /// gap profile f - g and its radial derivative
  template <class T>
  T separation(T rho) const {
    return f(rho) - g(rho);
  }
  template <class T>
  T dseparation(T rho) const {
    return df(rho) - dg(rho);
  }
};

}  // namespace gaplab::geom
