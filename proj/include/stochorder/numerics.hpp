#pragma once

#include <functional>

#include "stochorder/errors.hpp"

namespace stochorder::numerics {

// ln Gamma(z), z > 0. Asymptotic (Stirling) expansion with downward
// recurrence for small arguments; relative error <= 1e-12 on [1e-3, 1e3]
// (validated against the identity suite in the tests, not external tables).
double log_gamma(double z);

// Digamma psi(z) = Gamma'(z)/Gamma(z), z > 0. Same scheme; absolute error
// <= 1e-10 on [1e-3, 1e3] and satisfies psi(z+1) - psi(z) = 1/z.
double digamma(double z);

// Regularized incomplete gamma functions, a > 0, x >= 0.
// reg_lower_gamma = P(a,x), reg_upper_gamma = Q(a,x) = 1 - P(a,x).
// Series for x < a+1, continued fraction otherwise.
double reg_lower_gamma(double a, double x);
double reg_upper_gamma(double a, double x);

// Regularized incomplete beta I_x(a,b), a,b > 0, x in [0,1].
// Continued fraction (modified Lentz).
double reg_inc_beta(double a, double b, double x);

struct QuadratureSpec {
  enum class Rule { AdaptiveSimpson, GaussLegendreComposite };
  Rule rule = Rule::AdaptiveSimpson;
  double abs_tol = 1e-10;
  int max_subdivisions = 1 << 16;

  void validate() const {
    if (!(abs_tol > 0.0)) throw InputError("QuadratureSpec.abs_tol must be > 0");
    if (max_subdivisions < 1)
      throw InputError("QuadratureSpec.max_subdivisions must be >= 1");
  }
};

// Integrates f over the finite interval [a, b]. Infinite upper limits are
// the caller's problem: truncate via the distribution's quantile first, so
// the neglected mass is accounted for in one place.
// Throws ConvergenceError (carrying the best estimate) when the subdivision
// budget is exhausted before the tolerance is met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});

}  // namespace stochorder::numerics
