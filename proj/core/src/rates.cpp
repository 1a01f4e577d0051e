#include "gaplab/rates.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gaplab::rates {

Dimension::Dimension(int n_) : n(n_) {
  if (n_ < 3) {
    throw std::domain_error("Dimension: n must be >= 3, got " + std::to_string(n_));
  }
}

double alpha(Dimension dim) {
  const double m = static_cast<double>(dim.n - 1);
  return 0.5 * (-m + std::sqrt(m * m + 4.0 * static_cast<double>(dim.n - 2)));
}

double alpha_k(Dimension dim, int k) {
  if (k < 0) {
    throw std::domain_error("alpha_k: mode index must be >= 0, got " + std::to_string(k));
  }
  const double m = static_cast<double>(dim.n - 1);
  const double mu = static_cast<double>(k) * static_cast<double>(k + dim.n - 3);
  return 0.5 * (-m + std::sqrt(m * m + 4.0 * mu));
}

double beta_star(Dimension dim) {
  const double a = alpha(dim);
  const double n = static_cast<double>(dim.n);
  return (2.0 * a * a + (n - 1.0) * a) / (n - 3.0 + 2.0 * a);
}

SubsolutionPolynomial subsolution_polynomial(Dimension dim, double beta) {
  const double a = alpha(dim);
  const double n = static_cast<double>(dim.n);
  SubsolutionPolynomial p;
  p.c2 = (beta - a) * (beta - a);
  p.c1 = (2.0 * beta + n - 1.0) * (a - beta) + 2.0 * beta;
  p.c0 = (n - 2.0 + beta) * (beta - 1.0);
  return p;
}

bool subsolution_condition(Dimension dim, double beta) {
  return subsolution_polynomial(dim, beta).derivative_at_one() <= 0.0;
}

TildeAlpha tilde_alpha(Dimension dim, double gamma, double s) {
  if (s < 0.0) {
    throw std::domain_error("tilde_alpha: s must be >= 0");
  }
  const double forcing_rate = 1.0 + gamma - 2.0 * s;
  if (forcing_rate <= 0.0) {
    throw std::domain_error("tilde_alpha: 1 + gamma - 2s must be positive");
  }
  const double a = alpha(dim);
  TildeAlpha result;
  result.value = std::min(a, forcing_rate);
  result.degenerate = (forcing_rate == a);
  return result;
}

RateSet rate_table(Dimension dim, int k_max) {
  if (k_max < 0) {
    throw std::domain_error("rate_table: k_max must be >= 0");
  }
  RateSet rs;
  rs.n = dim.n;
  rs.alpha = alpha(dim);
  rs.beta_star = beta_star(dim);
  rs.alpha_k.reserve(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    rs.alpha_k.push_back(alpha_k(dim, k));
  }
  return rs;
}

}  // namespace gaplab::rates
