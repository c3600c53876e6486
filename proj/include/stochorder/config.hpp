#pragma once

#include <cstdint>
#include <string>

#include "stochorder/errors.hpp"

namespace stochorder {

enum class OutputFormat { Json, Csv };

// Shared knobs for grid construction, classifiers, criteria and oracles.
// Defaults reproduce every corpus scenario; the CLI exposes them via
// --grid-n / --tol KEY=VAL.
struct RunConfig {
  int grid_n = 2001;          // real-support grid size
  double tail_mass = 1e-12;   // neglected mass when truncating infinite supports

  double zero_tol = 1e-9;      // sign threshold on phi = l - 1
  double eq_tol = 1e-9;        // band below the level l = 1 that maps to "unknown"
  double deriv_tol = 1e-9;     // band above 0 for endpoint derivatives/differences
  double curvature_tol = 1e-8; // (log l)'' estimate threshold for log-concavity
  double st_tol = 1e-8;        // survival-difference slack (continuous/truncated)
  double hr_slack = 1e-8;      // absolute slack on survival-ratio monotonicity
  double lr_rel_slack = 1e-9;  // relative slack on l monotonicity
  double tail_tol = 1e-12;     // conditional tail-mean nonpositivity slack
  double hazard_floor = 1e-12; // survival floor below which ratios are dropped
  double touch_tol = 1e-5;     // level-1 touch detection threshold on phi
  double quad_abs_tol = 1e-10; // quadrature tolerance for survival/mass integrals

  std::uint64_t seed = 90210;  // randomized property runs
  OutputFormat format = OutputFormat::Json;

  void validate() const {
    if (grid_n < 16) throw InputError("grid_n must be >= 16");
    const double tols[] = {tail_mass, zero_tol,   eq_tol,      deriv_tol,
                           curvature_tol, st_tol, hr_slack,    lr_rel_slack,
                           tail_tol,  hazard_floor, touch_tol, quad_abs_tol};
    for (double t : tols)
      if (!(t > 0.0)) throw InputError("all tolerances must be > 0");
  }

  // Named override used by the CLI's --tol KEY=VAL.
  void set_tolerance(const std::string& key, double value);
};

}  // namespace stochorder
