#include "gaplab/ratefit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gaplab::fitting {

RateFit fit_rate(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_rate: size mismatch");
  if (x.size() < 4) throw std::invalid_argument("fit_rate: need at least 4 samples");
  RateFit fit;
  fit.log_x.reserve(x.size());
  fit.log_y.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("fit_rate: samples must be strictly positive");
    }
    fit.log_x.push_back(std::log(x[i]));
    fit.log_y.push_back(std::log(y[i]));
  }
  const double m = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += fit.log_x[i];
    sy += fit.log_y[i];
    sxx += fit.log_x[i] * fit.log_x[i];
    sxy += fit.log_x[i] * fit.log_y[i];
  }
  const double det = m * sxx - sx * sx;
  if (det == 0.0) throw std::invalid_argument("fit_rate: degenerate abscissae");
  fit.slope = (m * sxy - sx * sy) / det;
  fit.intercept = (sy * sxx - sx * sxy) / det;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double res = std::fabs(fit.log_y[i] - (fit.intercept + fit.slope * fit.log_x[i]));
    fit.max_residual = std::max(fit.max_residual, res);
  }
  fit.window_lo = *std::min_element(x.begin(), x.end());
  fit.window_hi = *std::max_element(x.begin(), x.end());
  return fit;
}

}  // namespace gaplab::fitting
