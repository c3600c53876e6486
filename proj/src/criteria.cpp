#include "stochorder/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "stochorder/errors.hpp"
#include "stochorder/numerics.hpp"

namespace stochorder {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

struct GammaLike {
  double shape;
  double scale;
};

std::optional<GammaLike> as_gamma_like(const FamilySpec& spec) {
  if (const auto* g = std::get_if<GammaSpec>(&spec))
    return GammaLike{g->shape, g->scale};
  if (const auto* e = std::get_if<ExponentialSpec>(&spec))
    return GammaLike{1.0, 1.0 / e->rate};
  return std::nullopt;
}

bool contiguous(const std::vector<bool>& mask, int forgive_gap) {
  int first = -1, last = -1, count = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    if (first < 0) first = static_cast<int>(i);
    last = static_cast<int>(i);
    ++count;
  }
  if (count == 0) return false;
  return (last - first + 1) - count <= forgive_gap;
}

}  // namespace

std::string to_string(OrderVerdict v) {
  switch (v) {
    case OrderVerdict::Holds: return "holds";
    case OrderVerdict::Fails: return "fails";
    case OrderVerdict::Unknown: return "unknown";
  }
  return "?";
}

std::string to_string(LrVerdict v) {
  switch (v) {
    case LrVerdict::Holds: return "holds";
    case LrVerdict::Fails: return "fails";
    case LrVerdict::Unknown: return "unknown";
    case LrVerdict::NotAddressed: return "not-addressed";
  }
  return "?";
}

std::string to_string(SupportRelation r) {
  switch (r) {
    case SupportRelation::Equal: return "equal";
    case SupportRelation::PInQ: return "P-in-Q";
    case SupportRelation::QInP: return "Q-in-P";
    case SupportRelation::UnionInterval: return "union-interval";
    case SupportRelation::Other: return "other";
  }
  return "?";
}

std::string to_string(AssumptionStatus s) {
  switch (s) {
    case AssumptionStatus::Verified: return "verified";
    case AssumptionStatus::VerifiedAtGridResolution:
      return "verified-at-grid-resolution";
    case AssumptionStatus::Unverifiable: return "unverifiable";
    case AssumptionStatus::Failed: return "failed";
  }
  return "?";
}

std::string to_string(CriterionKind k) {
  switch (k) {
    case CriterionKind::LcEndpoint: return "lc-endpoint";
    case CriterionKind::LcLrEndpoint: return "lc-lr-endpoint";
    case CriterionKind::UnimodalEndpoint: return "unimodal-endpoint";
    case CriterionKind::SignPattern: return "sign-pattern";
    case CriterionKind::Superlevel: return "superlevel";
  }
  return "?";
}

PairContext analyze_pair(const Distribution& p, const Distribution& q,
                         const RunConfig& cfg) {
  PairContext ctx{p, q, {}, {}, {}, SupportRelation::Other, false, 0, false};
  ctx.grid = evaluation_grid(p, q, cfg.grid_n, cfg.tail_mass);
  ctx.profile = ratio_profile(p, q, ctx.grid);
  ctx.shape = shape_report(ctx.profile, cfg);

  const std::size_t n = ctx.grid.size();
  std::vector<bool> pos_p(n), pos_q(n), pos_u(n);
  for (std::size_t i = 0; i < n; ++i) {
    // log-density stays finite where the density representative is positive
    // even when exp() of it underflows in a deep tail.
    pos_p[i] = p.log_density(ctx.grid[i]) > -std::numeric_limits<double>::infinity();
    pos_q[i] = q.log_density(ctx.grid[i]) > -std::numeric_limits<double>::infinity();
    pos_u[i] = pos_p[i] || pos_q[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    if (pos_u[i]) {
      ctx.first_union_index = i;
      break;
    }
  ctx.left_endpoint_in_both = pos_p[0] && pos_q[0];

  const bool discrete = p.is_discrete();
  // On real supports the hull endpoints decide containment at the
  // boundaries and interior grid positivity refines it; boundary grid
  // points themselves are null sets and are excluded.
  bool p_in_q = true, q_in_p = true;
  if (discrete) {
    for (std::size_t i = 0; i < n; ++i) {
      if (pos_p[i] && !pos_q[i]) p_in_q = false;
      if (pos_q[i] && !pos_p[i]) q_in_p = false;
    }
  } else {
    const auto& sp = p.support();
    const auto& sq = q.support();
    const double tol = 1e-9 * (1.0 + ctx.grid.back() - ctx.grid.front());
    const auto right_le = [tol](double a, double b) {
      if (std::isinf(b)) return true;
      if (std::isinf(a)) return false;
      return a <= b + tol;
    };
    p_in_q = sp.left >= sq.left - tol && right_le(sp.right, sq.right);
    q_in_p = sq.left >= sp.left - tol && right_le(sq.right, sp.right);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (pos_p[i] && !pos_q[i]) p_in_q = false;
      if (pos_q[i] && !pos_p[i]) q_in_p = false;
    }
  }

  ctx.union_contiguous = contiguous(pos_u, discrete ? 0 : 1);

  if (p_in_q && q_in_p)
    ctx.relation = SupportRelation::Equal;
  else if (p_in_q)
    ctx.relation = SupportRelation::PInQ;
  else if (q_in_p)
    ctx.relation = SupportRelation::QInP;
  else if (ctx.union_contiguous)
    ctx.relation = SupportRelation::UnionInterval;
  else
    ctx.relation = SupportRelation::Other;

  // Containments additionally require contiguity of the inner support to
  // qualify as "interval" relations.
  if (ctx.relation == SupportRelation::Equal && !contiguous(pos_p, discrete ? 0 : 1))
    ctx.relation = SupportRelation::Other;
  return ctx;
}

namespace {

// Shared three-way decision against the level 1. Holds includes the exact
// boundary (the theorems state >= 1); the unknown band sits strictly below
// it so a true boundary case rounding down degrades to unknown, never to a
// wrong fails. The band widens to the endpoint estimate's own resolution
// when it came from extrapolation.
OrderVerdict level_verdict(double v, double eq_tol, double uncertainty = 0.0) {
  const double band = std::max(eq_tol, 10.0 * uncertainty);
  if (v >= 1.0) return OrderVerdict::Holds;
  if (v < 1.0 - band) return OrderVerdict::Fails;
  return OrderVerdict::Unknown;
}

// The survival-difference violation induced by the converse direction:
// while l < 1 on the maximal initial run, F_bar_P - F_bar_Q grows to
// F_Q - F_P at the run's end. A verdict of "fails" is only pronounced when
// this is resolvable at the system's tolerance.
double implied_initial_violation(const PairContext& ctx, const RunConfig& cfg) {
  double x_end = 0.0;
  bool any = false;
  for (std::size_t i = ctx.first_union_index; i < ctx.profile.size(); ++i) {
    if (ctx.profile.flags[i] == RatioFlag::ZeroOverZero) continue;
    if (ctx.profile.phi[i] < -cfg.zero_tol) {
      x_end = ctx.grid[i];
      any = true;
    } else {
      break;
    }
  }
  if (!any) return 0.0;
  return ctx.q.cdf(x_end) - ctx.p.cdf(x_end);
}

double fails_resolution(const PairContext& ctx, const RunConfig& cfg) {
  const bool exact = ctx.p.is_discrete() && ctx.q.is_discrete() &&
                     std::isfinite(ctx.p.support().right) &&
                     std::isfinite(ctx.q.support().right);
  return exact ? 0.0 : cfg.st_tol;
}

// Sign of the first resolvable step of l over the support union; 0 when the
// profile never leaves the tolerance band.
int initial_trend(const PairContext& ctx, double zero_tol) {
  double prev = 0.0;
  bool have_prev = false;
  for (std::size_t i = 0; i < ctx.profile.size(); ++i) {
    if (ctx.profile.flags[i] == RatioFlag::ZeroOverZero) continue;
    const double cur = ctx.profile.ell[i];
    if (have_prev) {
      if (cur == std::numeric_limits<double>::infinity()) {
        if (prev != cur) return +1;
        continue;
      }
      if (prev == std::numeric_limits<double>::infinity()) return -1;
      const double tol = zero_tol * (1.0 + std::max(std::fabs(prev), std::fabs(cur)));
      if (cur - prev > tol) return +1;
      if (prev - cur > tol) return -1;
    }
    prev = cur;
    have_prev = true;
  }
  return 0;
}

void set_st_hr(CriterionVerdict& out, OrderVerdict v) {
  out.st = v;
  out.hr = v;
}

}  // namespace

CriterionVerdict endpoint_unimodal(const PairContext& ctx, const RunConfig& cfg) {
  CriterionVerdict out;
  out.criterion = CriterionKind::UnimodalEndpoint;
  out.support_relation = ctx.relation;
  out.lr = LrVerdict::NotAddressed;

  if (!ctx.union_contiguous) {
    out.assumptions.push_back(
        {"support-union-interval", AssumptionStatus::Failed, ""});
    return out;
  }
  out.assumptions.push_back(
      {"support-union-interval", AssumptionStatus::Verified, ""});
  out.assumptions.push_back(
      {"finite-left-endpoint", AssumptionStatus::Verified,
       fmt(ctx.grid[ctx.first_union_index])});

  const Tri uni = ctx.shape.unimodal;
  out.assumptions.push_back(
      {"ratio-unimodal",
       uni == Tri::True
           ? (ctx.profile.discrete ? AssumptionStatus::Verified
                                   : AssumptionStatus::VerifiedAtGridResolution)
           : AssumptionStatus::Failed,
       uni == Tri::False && ctx.shape.has_unimodal_witness
           ? "valley near x=" + fmt(ctx.shape.unimodal_witness[1])
           : to_string(uni)});

  const LeftLimit& lim = ctx.profile.left_limit;
  out.endpoint_value = lim.value;
  out.endpoint_resolved = lim.resolved;
  out.assumptions.push_back({"left-limit-resolved",
                             lim.resolved ? AssumptionStatus::Verified
                                          : AssumptionStatus::Failed,
                             lim.method});
  if (!lim.resolved) {
    out.applicable = uni == Tri::True;
    return out;  // verdicts stay unknown
  }
  // A closed-form or trend limit can disagree with the first sampled value
  // of l when the boundary layer sits inside the first grid cell (nearby
  // gamma shapes produce l(0+) = 0 or +inf with the crossing at x ~ 1e-3).
  // The grid then certifies nothing about the neighbourhood the endpoint
  // claim lives in, so the criterion abstains.
  const double first_val = ctx.profile.ell[ctx.first_union_index];
  const bool layer_unresolved =
      (lim.value == kInf &&
       (initial_trend(ctx, cfg.zero_tol) > 0 || first_val < 1.0 - cfg.eq_tol)) ||
      (lim.value < 1.0 - cfg.eq_tol && first_val >= 1.0);
  if (layer_unresolved) {
    out.assumptions.push_back(
        {"left-boundary-layer-resolved", AssumptionStatus::Failed,
         "endpoint limit " + fmt(lim.value) + " vs first sample " +
             fmt(first_val)});
    return out;
  }

  if (lim.value == kInf) {
    // +inf >= 1 treated as satisfied; the infinite endpoint is recorded.
    if (uni == Tri::True) {
      out.applicable = true;
      set_st_hr(out, OrderVerdict::Holds);
    }
    return out;
  }

  const OrderVerdict v = level_verdict(lim.value, cfg.eq_tol, lim.uncertainty);
  if (v == OrderVerdict::Fails) {
    // Converse direction: l < 1 on an initial segment suffices, no
    // unimodality needed; but the induced violation must be resolvable.
    const double imp = implied_initial_violation(ctx, cfg);
    if (imp > fails_resolution(ctx, cfg)) {
      out.applicable = true;
      set_st_hr(out, OrderVerdict::Fails);
    } else {
      out.assumptions.push_back(
          {"resolvable-initial-violation", AssumptionStatus::Failed,
           "implied violation " + fmt(imp) + " below tolerance"});
      out.applicable = uni == Tri::True;
    }
    return out;
  }
  if (uni != Tri::True) return out;  // forward direction needs unimodality
  out.applicable = true;
  set_st_hr(out, v);
  return out;
}

CriterionVerdict endpoint_logconcave(const PairContext& ctx, const RunConfig& cfg) {
  CriterionVerdict out;
  out.criterion = CriterionKind::LcEndpoint;
  out.support_relation = ctx.relation;
  out.lr = LrVerdict::NotAddressed;

  if (ctx.relation != SupportRelation::Equal) {
    out.assumptions.push_back(
        {"common-support-interval", AssumptionStatus::Failed,
         to_string(ctx.relation)});
    return out;
  }
  out.assumptions.push_back(
      {"common-support-interval", AssumptionStatus::Verified, ""});

  const Tri lc = ctx.shape.log_concave;
  out.assumptions.push_back(
      {"relative-log-concavity",
       lc == Tri::True
           ? (ctx.profile.discrete ? AssumptionStatus::Verified
                                   : AssumptionStatus::VerifiedAtGridResolution)
           : (lc == Tri::False ? AssumptionStatus::Failed
                               : AssumptionStatus::Unverifiable),
       lc == Tri::False ? "worst curvature " + fmt(ctx.shape.worst_curvature) +
                              " at x=" + fmt(ctx.shape.worst_curvature_at)
                        : to_string(lc)});
  if (lc != Tri::True) return out;

  const LeftLimit& lim = ctx.profile.left_limit;
  out.endpoint_value = lim.value;
  out.endpoint_resolved = lim.resolved;
  out.assumptions.push_back({"left-limit-resolved",
                             lim.resolved ? AssumptionStatus::Verified
                                          : AssumptionStatus::Failed,
                             lim.method});
  if (!lim.resolved) {
    out.applicable = true;
    return out;
  }
  const double first_val = ctx.profile.ell[ctx.first_union_index];
  const bool layer_unresolved =
      (lim.value == kInf &&
       (initial_trend(ctx, cfg.zero_tol) > 0 || first_val < 1.0 - cfg.eq_tol)) ||
      (lim.value < 1.0 - cfg.eq_tol && first_val >= 1.0);
  if (layer_unresolved) {
    out.assumptions.push_back(
        {"left-boundary-layer-resolved", AssumptionStatus::Failed,
         "endpoint limit " + fmt(lim.value) + " vs first sample " +
             fmt(first_val)});
    return out;
  }
  out.applicable = true;
  if (lim.value == kInf) {
    set_st_hr(out, OrderVerdict::Holds);
    return out;
  }
  const OrderVerdict v = level_verdict(lim.value, cfg.eq_tol, lim.uncertainty);
  if (v == OrderVerdict::Fails) {
    const double imp = implied_initial_violation(ctx, cfg);
    if (imp > fails_resolution(ctx, cfg)) {
      set_st_hr(out, OrderVerdict::Fails);
    } else {
      out.assumptions.push_back(
          {"resolvable-initial-violation", AssumptionStatus::Failed,
           "implied violation " + fmt(imp) + " below tolerance"});
    }
    return out;
  }
  set_st_hr(out, v);
  return out;
}

namespace {

// Closed-form right derivative of l at 0 for gamma-like pairs under the
// hypotheses of the lc-lr test (equal shapes, or shape gap in (0,1]).
std::optional<double> closed_form_lr_derivative(const Distribution& p,
                                                const Distribution& q) {
  const auto gp = as_gamma_like(p.spec());
  const auto gq = as_gamma_like(q.spec());
  if (!gp || !gq) return std::nullopt;
  const double delta = gp->shape - gq->shape;
  if (delta == 0.0) {
    const double l0 = std::pow(gq->scale / gp->scale, gp->shape);
    return -(1.0 / gp->scale - 1.0 / gq->scale) * l0;
  }
  if (delta > 0.0 && delta < 1.0) return kInf;
  return std::nullopt;
}

}  // namespace

CriterionVerdict lr_endpoint_test(const PairContext& ctx, const RunConfig& cfg) {
  CriterionVerdict out;
  out.criterion = CriterionKind::LcLrEndpoint;
  out.support_relation = ctx.relation;
  out.lr = LrVerdict::Unknown;

  if (ctx.relation != SupportRelation::Equal) {
    out.assumptions.push_back({"common-support-interval",
                               AssumptionStatus::Failed, to_string(ctx.relation)});
    out.lr = LrVerdict::NotAddressed;
    return out;
  }
  out.assumptions.push_back(
      {"common-support-interval", AssumptionStatus::Verified, ""});
  const Tri lc = ctx.shape.log_concave;
  out.assumptions.push_back(
      {"relative-log-concavity",
       lc == Tri::True
           ? (ctx.profile.discrete ? AssumptionStatus::Verified
                                   : AssumptionStatus::VerifiedAtGridResolution)
           : AssumptionStatus::Failed,
       to_string(lc)});
  if (lc != Tri::True) {
    out.lr = LrVerdict::NotAddressed;
    return out;
  }

  const double x0 = ctx.grid[ctx.first_union_index];
  const double fp0 = ctx.p.density(x0);
  const double fq0 = ctx.q.density(x0);
  const bool x0_in_supp =
      ctx.profile.discrete
          ? fp0 > 0.0
          : (ctx.first_union_index == 0 && ctx.left_endpoint_in_both &&
             std::isfinite(fp0) && std::isfinite(fq0));
  out.assumptions.push_back({"left-endpoint-in-supp-P",
                             x0_in_supp ? AssumptionStatus::Verified
                                        : AssumptionStatus::Failed,
                             "f_P(x0)=" + fmt(fp0)});
  if (!x0_in_supp) {
    out.lr = LrVerdict::NotAddressed;
    return out;
  }

  double d = 0.0;
  double d_uncertainty = 0.0;
  bool resolved = false;
  if (ctx.profile.discrete) {
    if (ctx.first_union_index + 1 >= ctx.profile.size()) {
      // Singleton support: monotonicity of l is vacuous.
      out.applicable = true;
      out.endpoint_resolved = true;
      out.lr = LrVerdict::Holds;
      out.assumptions.push_back({"endpoint-difference", AssumptionStatus::Verified,
                                 "vacuous (singleton support)"});
      return out;
    }
    const auto fd = forward_difference(ctx.profile, ctx.first_union_index);
    d = fd.d_ell;
    resolved = std::isfinite(d);
    out.assumptions.push_back({"endpoint-difference", AssumptionStatus::Verified,
                               "Delta l(x0)=" + fmt(d)});
  } else if (auto cf = closed_form_lr_derivative(ctx.p, ctx.q)) {
    d = *cf;
    resolved = true;
    out.assumptions.push_back(
        {"endpoint-derivative", AssumptionStatus::Verified, "closed-form"});
  } else {
    // Forward differences at shrinking h with first-order Richardson.
    const double g = ctx.grid.size() >= 2 ? ctx.grid[1] - ctx.grid[0] : 1e-3;
    const double l0 = std::exp(ctx.p.log_density(x0) - ctx.q.log_density(x0));
    double est[4];
    bool ok = true;
    for (int k = 0; k < 4 && ok; ++k) {
      const double h = g / (1 << k);
      const double lp = ctx.p.log_density(x0 + h);
      const double lq = ctx.q.log_density(x0 + h);
      ok = std::isfinite(lp) && std::isfinite(lq);
      if (ok) est[k] = (std::exp(lp - lq) - l0) / h;
    }
    if (ok) {
      double r[3];
      for (int k = 0; k < 3; ++k) r[k] = 2.0 * est[k + 1] - est[k];
      double r2[2];
      for (int k = 0; k < 2; ++k) r2[k] = (4.0 * r[k + 1] - r[k]) / 3.0;
      if (std::fabs(r2[1] - r2[0]) <=
          1e-6 * (1.0 + std::max(std::fabs(r2[0]), std::fabs(r2[1])))) {
        d = r2[1];
        d_uncertainty = std::max(std::fabs(r2[1] - r2[0]),
                                 std::fabs(r2[1] - r[2]));
        resolved = true;
      } else if (std::fabs(r[2] - r[1]) <=
                 1e-6 * (1.0 + std::max(std::fabs(r[1]), std::fabs(r[2])))) {
        d = r[2];
        d_uncertainty = std::fabs(r[2] - r[1]);
        resolved = true;
      }
    }
    out.assumptions.push_back({"endpoint-derivative",
                               resolved ? AssumptionStatus::Verified
                                        : AssumptionStatus::Failed,
                               resolved ? "richardson" : "unresolved"});
  }

  out.applicable = true;
  out.endpoint_value = d;
  out.endpoint_resolved = resolved;
  if (!resolved) return out;  // lr stays unknown
  // A positive estimate only counts as a violation when it exceeds both the
  // tolerance band and the extrapolation's own resolution.
  const double band = std::max(cfg.deriv_tol, 10.0 * d_uncertainty);
  if (d <= 0.0)
    out.lr = LrVerdict::Holds;
  else if (d > band)
    out.lr = LrVerdict::Fails;
  else
    out.lr = LrVerdict::Unknown;
  return out;
}

CriterionVerdict sign_pattern_criterion(const PairContext& ctx,
                                        const RunConfig& cfg) {
  CriterionVerdict out;
  out.criterion = CriterionKind::SignPattern;
  out.support_relation = ctx.relation;
  out.lr = LrVerdict::NotAddressed;

  if (ctx.relation != SupportRelation::Equal) {
    out.assumptions.push_back({"common-support-interval",
                               AssumptionStatus::Failed, to_string(ctx.relation)});
    return out;
  }
  out.assumptions.push_back(
      {"common-support-interval", AssumptionStatus::Verified, ""});

  if (!ctx.profile.discrete) {
    if (!(ctx.first_union_index == 0 && ctx.left_endpoint_in_both)) {
      out.assumptions.push_back({"left-endpoint-in-support",
                                 AssumptionStatus::Failed,
                                 "density vanishes at the hull left point"});
      return out;
    }
    out.assumptions.push_back(
        {"ratio-continuity", AssumptionStatus::Unverifiable,
         "grid classifier cannot verify continuity"});
  }

  const SignWord& sw = ctx.shape.phi_sign;
  const bool pattern_ok = sw.change_count <= 2 &&
                          sw.rightmost != SignWord::Rightmost::Plus;
  out.assumptions.push_back(
      {"phi-sign-pattern",
       pattern_ok ? (ctx.profile.discrete
                         ? AssumptionStatus::Verified
                         : AssumptionStatus::VerifiedAtGridResolution)
                  : AssumptionStatus::Failed,
       "collapsed=" + (sw.collapsed.empty() ? std::string("(all-zero)")
                                            : sw.collapsed) +
           " changes=" + std::to_string(sw.change_count)});
  if (!pattern_ok) return out;

  const std::size_t i0 = ctx.first_union_index;
  const double v = ctx.profile.ell[i0];
  out.endpoint_value = v;
  out.endpoint_resolved = true;
  out.applicable = true;

  // Boundary case l(x0) = 1 (within eq_tol): the proposition's extra
  // hypothesis, l >= 1 on a right-neighbourhood, certified down to the
  // first grid step.
  bool boundary = std::fabs(v - 1.0) <= cfg.eq_tol;
  bool neighbourhood_ok = true;
  if (boundary) {
    neighbourhood_ok = true;
    for (std::size_t i = i0 + 1; i < ctx.profile.size(); ++i) {
      if (ctx.profile.flags[i] == RatioFlag::ZeroOverZero) continue;
      const double ph = ctx.profile.phi[i];
      if (ph > cfg.zero_tol) break;  // rises above 1 first
      if (ph < -cfg.zero_tol) {
        neighbourhood_ok = false;
        break;
      }
    }
    out.assumptions.push_back(
        {"right-neighbourhood-ge-1",
         neighbourhood_ok ? AssumptionStatus::VerifiedAtGridResolution
                          : AssumptionStatus::Failed,
         ""});
  }

  if (boundary) {
    out.st = neighbourhood_ok ? OrderVerdict::Holds : OrderVerdict::Unknown;
  } else if (v > 1.0) {
    out.st = OrderVerdict::Holds;
  } else if (v < 1.0 - cfg.eq_tol) {
    // Converse direction of the tail-mean lemma, pronounced only when the
    // induced violation is resolvable at the system's tolerance.
    const double imp = implied_initial_violation(ctx, cfg);
    if (imp > fails_resolution(ctx, cfg)) {
      out.st = OrderVerdict::Fails;
    } else {
      out.assumptions.push_back(
          {"resolvable-initial-violation", AssumptionStatus::Failed,
           "implied violation " + fmt(imp) + " below tolerance"});
      out.st = OrderVerdict::Unknown;
    }
  } else {
    out.st = OrderVerdict::Unknown;
  }

  out.assumptions.push_back(
      {"rightmost-piece-nonincreasing",
       ctx.shape.rightmost_piece_nonincreasing
           ? (ctx.profile.discrete ? AssumptionStatus::Verified
                                   : AssumptionStatus::VerifiedAtGridResolution)
           : AssumptionStatus::Failed,
       ctx.shape.rightmost_piece_nonincreasing
           ? ""
           : "increase at x=" + fmt(ctx.shape.rightmost_violation_at)});

  if (out.st == OrderVerdict::Fails)
    out.hr = OrderVerdict::Fails;  // hr => st
  else if (out.st == OrderVerdict::Holds)
    out.hr = ctx.shape.rightmost_piece_nonincreasing ? OrderVerdict::Holds
                                                     : OrderVerdict::Unknown;
  else
    out.hr = OrderVerdict::Unknown;
  return out;
}

CriterionVerdict superlevel_criterion(const PairContext& ctx,
                                      const RunConfig& cfg) {
  (void)cfg;  // tolerances enter via the shape report
  CriterionVerdict out;
  out.criterion = CriterionKind::Superlevel;
  out.support_relation = ctx.relation;
  out.lr = LrVerdict::NotAddressed;

  if (ctx.relation != SupportRelation::Equal) {
    out.assumptions.push_back({"common-support-interval",
                               AssumptionStatus::Failed, to_string(ctx.relation)});
    return out;
  }
  out.assumptions.push_back(
      {"common-support-interval", AssumptionStatus::Verified, ""});
  if (!ctx.profile.discrete && !(ctx.first_union_index == 0 && ctx.left_endpoint_in_both)) {
    out.assumptions.push_back({"left-endpoint-in-support",
                               AssumptionStatus::Failed,
                               "density vanishes at the hull left point"});
    return out;
  }

  const std::size_t i0 = ctx.first_union_index;
  const double v = ctx.profile.ell[i0];
  out.endpoint_value = v;
  out.endpoint_resolved = true;
  out.applicable = true;

  out.assumptions.push_back(
      {"superlevel-set-interval",
       ctx.shape.superlevel_is_interval
           ? (ctx.profile.discrete ? AssumptionStatus::Verified
                                   : AssumptionStatus::VerifiedAtGridResolution)
           : AssumptionStatus::Failed,
       ctx.shape.superlevel_empty
           ? "empty"
           : "A=[" + fmt(ctx.shape.superlevel_left) + "," +
                 fmt(ctx.shape.superlevel_right) + "]"});

  // One-directional: when the hypotheses fail the orders stay unknown.
  if (v >= 1.0 && ctx.shape.superlevel_is_interval && !ctx.shape.superlevel_empty) {
    out.st = OrderVerdict::Holds;
    const bool tail_ok = ctx.shape.rightmost_piece_nonincreasing;
    out.assumptions.push_back(
        {"complement-nonincreasing",
         tail_ok ? (ctx.profile.discrete
                        ? AssumptionStatus::Verified
                        : AssumptionStatus::VerifiedAtGridResolution)
                 : AssumptionStatus::Failed,
         ""});
    out.hr = tail_ok ? OrderVerdict::Holds : OrderVerdict::Unknown;
  }
  return out;
}

namespace {

CriterionVerdict build_and_run(
    const Distribution& p, const Distribution& q, const RunConfig& cfg,
    CriterionVerdict (*op)(const PairContext&, const RunConfig&)) {
  const PairContext ctx = analyze_pair(p, q, cfg);
  return op(ctx, cfg);
}

}  // namespace

CriterionVerdict endpoint_unimodal(const Distribution& p, const Distribution& q,
                                   const RunConfig& cfg) {
  return build_and_run(p, q, cfg, &endpoint_unimodal);
}
CriterionVerdict endpoint_logconcave(const Distribution& p, const Distribution& q,
                                     const RunConfig& cfg) {
  return build_and_run(p, q, cfg, &endpoint_logconcave);
}
CriterionVerdict lr_endpoint_test(const Distribution& p, const Distribution& q,
                                  const RunConfig& cfg) {
  return build_and_run(p, q, cfg, &lr_endpoint_test);
}
CriterionVerdict sign_pattern_criterion(const Distribution& p,
                                        const Distribution& q,
                                        const RunConfig& cfg) {
  return build_and_run(p, q, cfg, &sign_pattern_criterion);
}
CriterionVerdict superlevel_criterion(const Distribution& p,
                                      const Distribution& q,
                                      const RunConfig& cfg) {
  return build_and_run(p, q, cfg, &superlevel_criterion);
}

TailMeanReport tail_mean_sign(const Distribution& mu,
                              const std::function<double(double)>& phi,
                              const RunConfig& cfg) {
  TailMeanReport rep;

  // Enumerate the support: exact atoms for discrete laws, per-cell masses
  // and per-cell integrals of phi d(mu) on a grid otherwise.
  std::vector<double> xs;
  std::vector<double> ws;        // mass at/after the point up to the next one
  std::vector<double> phi_mass;  // contribution of the cell to E[phi]
  std::vector<double> phis;      // pointwise phi values for the sign word
  if (mu.is_discrete()) {
    double k = mu.support().left;
    const double cap = k + 5e6;
    while (k <= mu.support().right && k < cap) {
      const double w = mu.density(k);
      if (w > 0.0) {
        xs.push_back(k);
        ws.push_back(w);
        phis.push_back(phi(k));
        phi_mass.push_back(w * phis.back());
      }
      if (mu.survival(k + 1.0) < cfg.tail_mass) break;
      k += 1.0;
    }
  } else {
    const auto grid = evaluation_grid(mu, mu, cfg.grid_n, cfg.tail_mass);
    numerics::QuadratureSpec spec;
    spec.abs_tol = 1e-12;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double w = numerics::integrate(
          [&](double x) { return mu.density(x); }, grid[i], grid[i + 1], spec);
      const double pm = numerics::integrate(
          [&](double x) { return mu.density(x) * phi(x); }, grid[i],
          grid[i + 1], spec);
      xs.push_back(grid[i]);
      ws.push_back(w);
      phi_mass.push_back(pm);
      phis.push_back(phi(grid[i]));
    }
  }
  if (xs.empty()) throw std::domain_error("tail_mean_sign: empty support");

  double mean = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean += phi_mass[i];
    scale += std::fabs(phi_mass[i]);
  }
  if (std::fabs(mean) > 1e-8 * (1.0 + scale))
    throw std::domain_error("tail_mean_sign: E[phi(X)] must be 0, got " +
                            fmt(mean));

  const SignWord sw = sign_word(phis, cfg.zero_tol);
  rep.left_value = phis.front();
  bool converse_only = false;
  if (sw.change_count > 2 || sw.rightmost == SignWord::Rightmost::Plus) {
    // The converse direction (phi(x0) < 0 forces a positive tail mean just
    // right of x0) uses no sign-pattern hypothesis at all; everything else
    // does.
    if (rep.left_value < -cfg.zero_tol) {
      converse_only = true;
      rep.reason =
          "sign-pattern hypothesis failed (collapsed=" + sw.collapsed +
          "); converse direction only";
    } else {
      rep.reason = "sign-pattern hypothesis failed: collapsed=" + sw.collapsed;
      return rep;
    }
  }
  if (!converse_only && std::fabs(rep.left_value) <= cfg.zero_tol) {
    // phi(x0) = 0: the forward direction needs phi >= 0 on a
    // right-neighbourhood.
    for (std::size_t i = 1; i < phis.size(); ++i) {
      if (phis[i] > cfg.zero_tol) break;
      if (phis[i] < -cfg.zero_tol) {
        rep.reason = "phi(x0)=0 without nonnegative right-neighbourhood";
        return rep;
      }
    }
  }
  rep.applicable = true;

  // Conditional tail means by backward accumulation: exact sums for
  // discrete laws, cumulative quadrature otherwise.
  std::vector<double> tail_mass(xs.size() + 1, 0.0);
  std::vector<double> tail_phi(xs.size() + 1, 0.0);
  for (std::size_t i = xs.size(); i-- > 0;) {
    tail_mass[i] = tail_mass[i + 1] + ws[i];
    tail_phi[i] = tail_phi[i + 1] + phi_mass[i];
  }
  rep.worst = -kInf;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (tail_mass[i] <= 0.0) break;
    const double dmean = tail_phi[i] / tail_mass[i];
    rep.table.emplace_back(xs[i], dmean);
    if (dmean > rep.worst) {
      rep.worst = dmean;
      rep.worst_at = xs[i];
    }
    if (!rep.converse_witness_found && dmean > cfg.tail_tol) {
      rep.converse_witness_found = true;
      rep.witness_x = xs[i];
      rep.witness_value = dmean;
    }
  }
  rep.all_tail_means_nonpositive = rep.worst <= cfg.tail_tol;
  rep.equivalence_holds = rep.left_value >= -cfg.zero_tol
                              ? rep.all_tail_means_nonpositive
                              : rep.converse_witness_found;
  return rep;
}

ClassifyResult classify_and_decide(const Distribution& p, const Distribution& q,
                                   const RunConfig& cfg) {
  ClassifyResult res;
  res.ctx = analyze_pair(p, q, cfg);
  res.verdicts.push_back(endpoint_logconcave(res.ctx, cfg));
  res.verdicts.push_back(lr_endpoint_test(res.ctx, cfg));
  res.verdicts.push_back(endpoint_unimodal(res.ctx, cfg));
  res.verdicts.push_back(sign_pattern_criterion(res.ctx, cfg));
  res.verdicts.push_back(superlevel_criterion(res.ctx, cfg));

  auto merge = [](OrderVerdict acc, OrderVerdict v, const char* order) {
    if (v == OrderVerdict::Unknown) return acc;
    if (acc == OrderVerdict::Unknown) return v;
    if (acc != v)
      throw DiagnosticError(std::string("criteria conflict on ") + order);
    return acc;
  };
  for (const auto& cv : res.verdicts) {
    if (!cv.applicable) continue;
    if (cv.hr == OrderVerdict::Holds && cv.st != OrderVerdict::Holds)
      throw DiagnosticError("criterion reports hr holds without st");
    res.st = merge(res.st, cv.st, "st");
    res.hr = merge(res.hr, cv.hr, "hr");
    if (cv.lr == LrVerdict::Holds || cv.lr == LrVerdict::Fails) {
      if (res.lr == LrVerdict::NotAddressed || res.lr == LrVerdict::Unknown)
        res.lr = cv.lr;
      else if (res.lr != cv.lr)
        throw DiagnosticError("criteria conflict on lr");
    } else if (cv.lr == LrVerdict::Unknown && res.lr == LrVerdict::NotAddressed) {
      res.lr = LrVerdict::Unknown;
    }
  }
  if (res.hr == OrderVerdict::Holds && res.st != OrderVerdict::Holds)
    throw DiagnosticError("merged hr holds without st");
  return res;
}

}  // namespace stochorder
