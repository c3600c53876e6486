#pragma once

#include <string>
#include <vector>

#include "stochorder/distribution.hpp"

namespace stochorder {

// Per-point convention flag for the likelihood ratio l = f_P / f_Q with the
// conventions a/0 := +inf (a > 0) and 0/0 := 0.
enum class RatioFlag {
  Finite,        // f_Q > 0 (includes l = 0 when f_P = 0 < f_Q)
  PlusInfinity,  // f_P > 0, f_Q = 0
  ZeroOverZero,  // both densities 0; l recorded as 0, point lies outside S
};

struct LeftLimit {
  double value = 0.0;       // may be +inf
  bool resolved = false;
  std::string method;       // "closed-form", "grid-value", "richardson", "trend"
  double uncertainty = 0.0; // extrapolation resolution (0 for exact routes)
};

// The ratio l, log l and phi = l - 1 on a grid. phi at a PlusInfinity point
// is +inf; at a ZeroOverZero point l := 0 so phi = -1, but such points lie
// outside supp(P) u supp(Q) and classifiers skip them.
//
// Profiles evaluate the specific density representatives chosen by the
// distribution module; on real supports l is only defined up to null sets,
// so other representatives could classify differently on null sets.
struct RatioProfile {
  std::vector<double> grid;
  std::vector<double> ell;
  std::vector<double> log_ell;
  std::vector<double> phi;
  std::vector<RatioFlag> flags;
  LeftLimit left_limit;
  bool discrete = false;

  std::size_t size() const { return grid.size(); }
};

struct ForwardDifference {
  double d_ell = 0.0;
  double d_log_ell = 0.0;
  bool finite = false;  // both endpoints finite-flagged with l > 0
};

RatioProfile ratio_profile(const Distribution& p, const Distribution& q,
                           const std::vector<double>& grid);

// l(x_*+) at the left endpoint of the support union. Integer supports take
// the value at the smallest support point. Real supports use a closed form
// when the family pair admits one (gamma/exponential), otherwise Richardson
// extrapolation of l(x_* + h) over shrinking h with an explicit convergence
// verdict; a geometric trend toward 0 or +inf is reported as such. An
// unresolved limit must degrade downstream verdicts to "unknown".
LeftLimit left_limit_at(const Distribution& p, const Distribution& q,
                        double grid_spacing);

// Delta l(k) and Delta log l(k) on integer-support profiles.
ForwardDifference forward_difference(const RatioProfile& profile, std::size_t k);

// Delta^2 log l(k); NaN-free: .finite is false when any of the three points
// has non-finite log l.
struct SecondDifference {
  double value = 0.0;
  bool finite = false;
};
SecondDifference second_difference_log(const RatioProfile& profile, std::size_t k);

}  // namespace stochorder
