#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gaplab::experiments {

/// Geometric schedule from start down to stop (strictly decreasing).
struct EpsSchedule {
  double start = 1e-2;
  double stop = 1e-5;
  int count = 6;

  std::vector<double> values() const;
  bool operator==(const EpsSchedule&) const = default;
};

/// Default sweep grids resolve sigma at production density and keep the
/// tau direction near-isotropic in logical cells: the gap-fiber profile is
/// smooth in tau, so extra tau cells change the measured quantities by
/// under 0.02% while degrading the solver conditioning badly at small eps.
struct GridSpec {
  int coarse_nx = 513;
  int coarse_ny = 65;
  int fine_nx = 1025;
  int fine_ny = 129;
  bool operator==(const GridSpec&) const = default;
};

struct ExperimentConfig {
  std::string id = "sweep";  // sweep | h_certify | mode_decay | local_gap
  int n = 3;
  int threads = 1;
  std::string out_dir = "out";

  EpsSchedule eps;
  GridSpec grid;

  // inclusion shape (local_gap)
  std::string shape = "ball";  // ball | perturbed
  double shape_a = 1.0;
  double shape_gamma = 0.5;
  double shape_b = 0.3;
  double patch_radius = 0.5;
  std::string dirichlet = "one";  // one | parabolic

  // modes (mode_decay)
  std::vector<int> k_list{1, 2, 3, 4, 5};

  // radial ODE solves
  int points_per_octave = 96;
  double beta = 0.0;  // 0 -> beta_star(n)

  // fits
  double u11_slope_tol = 0.03;
  double grad_slope_tol = 0.05;
  double window_lo_factor = 0.25;  // C1 window, times sqrt(eps)
  double window_hi_factor = 4.0;

  bool operator==(const ExperimentConfig&) const = default;
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(int line, const std::string& message)
      : std::runtime_error("config line " + std::to_string(line) + ": " + message),
        line_number(line) {}
  int line_number;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string emit_config(const ExperimentConfig& config);

}  // namespace gaplab::experiments
