#pragma once

#include <optional>
#include <vector>

namespace gaplab::rates {

/// Ambient dimension of the conduction problem. The decay theory below
/// requires n >= 3; smaller values are rejected at construction.
struct Dimension {
  explicit Dimension(int n_);
  int n;
};

/// Decay exponent of the first nonconstant mode,
///   alpha(n) = ( -(n-1) + sqrt((n-1)^2 + 4(n-2)) ) / 2,
/// the positive root of a^2 + (n-1)a - (n-2) = 0. Lies in (0,1).
double alpha(Dimension dim);

/// Mode-k decay exponent, the positive root of c^2 + (n-1)c - k(k+n-3) = 0.
/// alpha_k(n, 0) = 0 and alpha_k(n, 1) = alpha(n).
double alpha_k(Dimension dim, int k);

/// Smallest beta for which the power-envelope subsolution certificate holds,
/// i.e. the exact threshold of subsolution_condition():
///   beta_star = (2 alpha^2 + (n-1) alpha) / (n - 3 + 2 alpha).
double beta_star(Dimension dim);

/// The certificate polynomial p(x) = c2 x^2 + c1 x + c0 attached to the
/// candidate envelope r^beta (eps + r^2)^((alpha-beta)/2). p(1) = 0 by
/// construction (it encodes the defining quadratic of alpha).
struct SubsolutionPolynomial {
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;

  double operator()(double x) const { return (c2 * x + c1) * x + c0; }
  double derivative_at_one() const { return 2.0 * c2 + c1; }
};

SubsolutionPolynomial subsolution_polynomial(Dimension dim, double beta);

/// True iff p'(1) <= 0, which makes the envelope a subsolution on (0,1).
/// Equivalent to beta >= beta_star(dim).
bool subsolution_condition(Dimension dim, double beta);

/// min(alpha, 1 + gamma - 2s). The borderline case 1 + gamma - 2s == alpha
/// is legal input but reported through `degenerate`.
struct TildeAlpha {
  double value = 0.0;
  bool degenerate = false;
};

TildeAlpha tilde_alpha(Dimension dim, double gamma, double s);

/// All exponents for one dimension, alpha_k listed for k = 0..k_max.
struct RateSet {
  int n = 3;
  double alpha = 0.0;
  double beta_star = 0.0;
  std::vector<double> alpha_k;
  std::optional<double> tilde_alpha;
};

RateSet rate_table(Dimension dim, int k_max);

}  // namespace gaplab::rates
