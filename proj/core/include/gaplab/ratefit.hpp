#pragma once

#include <span>
#include <vector>

namespace gaplab::fitting {

/// Ordinary least squares fit of log(y) = intercept + slope * log(x).
struct RateFit {
  std::vector<double> log_x;
  std::vector<double> log_y;
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  double window_lo = 0.0;  // x-range actually used
  double window_hi = 0.0;
};

/// Requires at least 4 strictly positive samples.
RateFit fit_rate(std::span<const double> x, std::span<const double> y);

}  // namespace gaplab::fitting
