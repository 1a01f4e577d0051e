#pragma once

#include <span>
#include <vector>

namespace gaplab::ode {

/// Geometric radial mesh on [a_cut, 1] with a fixed number of nodes per
/// octave, so every node is of the form 2^(-j/ppo). Grids with different
/// cutoffs drawn from the same pitch share all nodes above the larger
/// cutoff, which makes cutoff-halving studies exact node-for-node.
struct RadialGrid {
  std::vector<double> r;
  int points_per_octave = 96;

  static RadialGrid geometric(double a_cut_request, int points_per_octave);

  double a_cut() const { return r.front(); }
  int size() const { return static_cast<int>(r.size()); }

  /// subgrid starting at the node closest to (and not below) new_a_cut
  std::span<const double> from(double new_a_cut) const;
};

}  // namespace gaplab::ode
