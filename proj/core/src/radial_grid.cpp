#include "gaplab/radial_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace gaplab::ode {

RadialGrid RadialGrid::geometric(double a_cut_request, int points_per_octave) {
  if (!(a_cut_request > 0.0) || a_cut_request >= 1.0) {
    throw std::invalid_argument("RadialGrid: a_cut must lie in (0,1)");
  }
  if (points_per_octave < 8) {
    throw std::invalid_argument("RadialGrid: points_per_octave must be >= 8");
  }
  const int j_max = static_cast<int>(
      std::ceil(points_per_octave * std::log2(1.0 / a_cut_request) - 1e-9));
  RadialGrid grid;
  grid.points_per_octave = points_per_octave;
  grid.r.resize(static_cast<std::size_t>(j_max) + 1);
  for (int j = 0; j <= j_max; ++j) {
    grid.r[static_cast<std::size_t>(j)] =
        std::exp2(-static_cast<double>(j_max - j) / points_per_octave);
  }
  grid.r.back() = 1.0;
  return grid;
}

std::span<const double> RadialGrid::from(double new_a_cut) const {
  std::size_t lo = 0;
  while (lo + 1 < r.size() && r[lo] < new_a_cut * (1.0 - 1e-12)) ++lo;
  return std::span<const double>(r).subspan(lo);
}

}  // namespace gaplab::ode
