#include "stochorder/ratio.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace stochorder {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GammaLike {
  double shape;
  double scale;
};

// Gamma and exponential admit exact left limits; Exp(rate) = Gamma(1, 1/rate).
std::optional<GammaLike> as_gamma_like(const FamilySpec& spec) {
  if (const auto* g = std::get_if<GammaSpec>(&spec))
    return GammaLike{g->shape, g->scale};
  if (const auto* e = std::get_if<ExponentialSpec>(&spec))
    return GammaLike{1.0, 1.0 / e->rate};
  return std::nullopt;
}

std::optional<double> closed_form_left_limit(const Distribution& p,
                                             const Distribution& q) {
  const auto gp = as_gamma_like(p.spec());
  const auto gq = as_gamma_like(q.spec());
  if (!gp || !gq) return std::nullopt;
  if (gp->shape > gq->shape) return 0.0;
  if (gp->shape < gq->shape) return kInf;
  return std::pow(gq->scale / gp->scale, gp->shape);
}

double ratio_at(const Distribution& p, const Distribution& q, double x) {
  const double lp = p.log_density(x);
  const double lq = q.log_density(x);
  if (lp == -kInf && lq == -kInf) return 0.0;  // 0/0 := 0
  if (lq == -kInf) return kInf;                // a/0 := +inf
  if (lp == -kInf) return 0.0;
  return std::exp(lp - lq);
}

}  // namespace

RatioProfile ratio_profile(const Distribution& p, const Distribution& q,
                           const std::vector<double>& grid) {
  RatioProfile out;
  out.grid = grid;
  out.discrete = p.is_discrete();
  const std::size_t n = grid.size();
  out.ell.resize(n);
  out.log_ell.resize(n);
  out.phi.resize(n);
  out.flags.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid[i];
    double lp = p.log_density(x);
    double lq = q.log_density(x);
    if (lp == kInf && lq == kInf) {
      // Both densities diverge at a shared boundary point; represent the
      // point by a nudged evaluation inside the local cell. Not exercised
      // by any corpus pair (needs two shape-below-1 gammas at 0).
      const double local =
          i + 1 < n ? grid[i + 1] - x
                    : (i > 0 ? x - grid[i - 1] : 1e-9);
      const double x2 = x + std::max(1e-300, 0.5 * local);
      lp = p.log_density(x2);
      lq = q.log_density(x2);
    }
    if (lp == -kInf && lq == -kInf) {
      out.flags[i] = RatioFlag::ZeroOverZero;
      out.ell[i] = 0.0;
      out.log_ell[i] = -kInf;
      out.phi[i] = -1.0;
    } else if (lq == -kInf) {
      out.flags[i] = RatioFlag::PlusInfinity;
      out.ell[i] = kInf;
      out.log_ell[i] = kInf;
      out.phi[i] = kInf;
    } else if (lp == -kInf) {
      out.flags[i] = RatioFlag::Finite;
      out.ell[i] = 0.0;
      out.log_ell[i] = -kInf;
      out.phi[i] = -1.0;
    } else {
      out.flags[i] = RatioFlag::Finite;
      const double d = lp - lq;
      out.ell[i] = std::exp(d);
      out.log_ell[i] = d;
      out.phi[i] = out.ell[i] - 1.0;
    }
  }
  const double spacing =
      n >= 2 ? (grid[1] - grid[0]) : 1.0;
  out.left_limit = left_limit_at(p, q, spacing);
  return out;
}

LeftLimit left_limit_at(const Distribution& p, const Distribution& q,
                        double grid_spacing) {
  LeftLimit lim;
  const double x_star = std::min(p.support().left, q.support().left);

  if (p.is_discrete()) {
    // x* = min of the union support: skip points carrying no mass under
    // either law.
    double k = x_star;
    const double cap = x_star + 5e6;
    while (k < cap && p.density(k) == 0.0 && q.density(k) == 0.0) k += 1.0;
    lim.value = ratio_at(p, q, k);
    lim.resolved = true;
    lim.method = "grid-value";
    return lim;
  }

  if (auto cf = closed_form_left_limit(p, q)) {
    lim.value = *cf;
    lim.resolved = true;
    lim.method = "closed-form";
    return lim;
  }

  const double g = grid_spacing > 0.0 ? grid_spacing : 1e-3;
  double v[4];
  for (int k = 0; k < 4; ++k) v[k] = ratio_at(p, q, x_star + g / (1 << k));

  bool all_finite = true;
  for (double x : v) all_finite = all_finite && std::isfinite(x);
  if (all_finite) {
    // Two Richardson levels: l(x*+h) ~ L + c1 h + c2 h^2.
    double r[3];
    for (int k = 0; k < 3; ++k) r[k] = 2.0 * v[k + 1] - v[k];
    double r2[2];
    for (int k = 0; k < 2; ++k) r2[k] = (4.0 * r[k + 1] - r[k]) / 3.0;
    const double diff2 = std::fabs(r2[1] - r2[0]);
    if (diff2 <= 1e-6 * (1.0 + std::max(std::fabs(r2[0]), std::fabs(r2[1])))) {
      lim.value = r2[1];
      lim.resolved = true;
      lim.method = "richardson";
      lim.uncertainty = std::max(diff2, std::fabs(r2[1] - r[2]));
      return lim;
    }
    const double diff = std::fabs(r[2] - r[1]);
    if (diff <= 1e-6 * (1.0 + std::max(std::fabs(r[1]), std::fabs(r[2])))) {
      lim.value = r[2];
      lim.resolved = true;
      lim.method = "richardson";
      lim.uncertainty = diff;
      return lim;
    }
    // Geometric trend detection: ratios of successive values roughly constant
    // and bounded away from 1 indicate a power-law limit of 0 or +inf.
    if (v[0] > 0.0 && v[1] > 0.0 && v[2] > 0.0 && v[3] > 0.0) {
      const double q1 = v[1] / v[0], q2 = v[2] / v[1], q3 = v[3] / v[2];
      const bool steady = std::fabs(q2 - q3) <= 0.2 * std::max(q2, q3) &&
                          std::fabs(q1 - q2) <= 0.3 * std::max(q1, q2);
      if (steady && q3 < 0.75) {
        lim.value = 0.0;
        lim.resolved = true;
        lim.method = "trend";
        return lim;
      }
      if (steady && q3 > 1.0 / 0.75) {
        lim.value = kInf;
        lim.resolved = true;
        lim.method = "trend";
        return lim;
      }
    }
    lim.value = v[3];
    lim.resolved = false;
    lim.method = "unresolved-limit";
    return lim;
  }

  // Infinities in the sample: +inf throughout means f_Q vanishes near x*.
  bool all_inf = true;
  for (double x : v) all_inf = all_inf && x == kInf;
  if (all_inf) {
    lim.value = kInf;
    lim.resolved = true;
    lim.method = "grid-value";
    return lim;
  }
  lim.value = v[3];
  lim.resolved = false;
  lim.method = "unresolved-limit";
  return lim;
}

ForwardDifference forward_difference(const RatioProfile& profile, std::size_t k) {
  if (!profile.discrete)
    throw std::domain_error("forward_difference: integer-support profiles only");
  if (k + 1 >= profile.size())
    throw std::domain_error("forward_difference: k+1 outside grid");
  ForwardDifference fd;
  const bool ok = profile.flags[k] == RatioFlag::Finite &&
                  profile.flags[k + 1] == RatioFlag::Finite &&
                  std::isfinite(profile.ell[k]) && std::isfinite(profile.ell[k + 1]);
  fd.d_ell = profile.ell[k + 1] - profile.ell[k];
  fd.finite = ok && std::isfinite(profile.log_ell[k]) &&
              std::isfinite(profile.log_ell[k + 1]);
  fd.d_log_ell = fd.finite ? profile.log_ell[k + 1] - profile.log_ell[k]
                           : std::numeric_limits<double>::quiet_NaN();
  return fd;
}

SecondDifference second_difference_log(const RatioProfile& profile,
                                       std::size_t k) {
  if (k + 2 >= profile.size())
    throw std::domain_error("second_difference_log: k+2 outside grid");
  SecondDifference sd;
  const double a = profile.log_ell[k];
  const double b = profile.log_ell[k + 1];
  const double c = profile.log_ell[k + 2];
  if (std::isfinite(a) && std::isfinite(b) && std::isfinite(c)) {
    sd.value = c - 2.0 * b + a;
    sd.finite = true;
  }
  return sd;
}

}  // namespace stochorder
