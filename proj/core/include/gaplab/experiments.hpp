#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaplab/config.hpp"
#include "gaplab/modal_ode.hpp"
#include "gaplab/ratefit.hpp"
#include "gaplab/solve.hpp"

namespace gaplab::experiments {

using fitting::RateFit;
using fitting::fit_rate;

struct Check {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct NamedFit {
  std::string name;
  RateFit fit;
  double target = 0.0;
  double tol = 0.0;
  bool pass = false;
  bool dropped_first_point = false;  // preasymptotic exclusion rule fired
};

/// One experiment's complete output: a results table, the rate fits, and the
/// pass/fail checks, all serialized verbatim by emit_results.
struct RunRecord {
  ExperimentConfig config;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<NamedFit> fits;
  std::vector<Check> checks;

  bool all_pass() const;
};

/// Two-sphere benchmark sweep: per epsilon, the gap average U11(sqrt(eps)),
/// the sup gradient amplitude over r^2 + xn^2 <= 4 eps, the homogeneous
/// amplitude C1, and the ODE/PDE consistency triangle; then the two rate
/// fits against eps.
RunRecord run_lower_bound_sweep(const ExperimentConfig& config);

/// h-function certification across the epsilon schedule at beta (auto ->
/// beta_star): two-sided bounds, monotonicity, envelope-constant stability.
RunRecord run_h_certification(const ExperimentConfig& config);

/// Modal decay bounds for every (k, eps) in the schedule plus the synthetic
/// multimode omega(rho) slope probe.
RunRecord run_mode_decay(const ExperimentConfig& config);

/// Local gap solve with the transformed coefficients on [0, R0] x [-eps, eps];
/// annulus sup-gradient rate against eps + R^2.
RunRecord run_local_gap(const ExperimentConfig& config);

/// Writes results.csv, summary.json, config.snapshot and one fit_<name>.csv
/// per recorded fit into dir. Byte-stable for identical records.
void emit_results(const RunRecord& record, const std::string& dir);

/// The fit window rule: refit without the largest-x sample when its
/// residual exceeds twice the median residual (preasymptotic
/// contamination, disclosed via dropped_first_point).
NamedFit make_named_fit(const std::string& name, std::vector<double> x,
                        std::vector<double> y, double target, double tol);

}  // namespace gaplab::experiments
