#include "stochorder/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stochorder/errors.hpp"
#include "stochorder/numerics.hpp"

namespace stochorder {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool exact_pair(const Distribution& p, const Distribution& q) {
  return p.is_discrete() && q.is_discrete() &&
         std::isfinite(p.support().right) && std::isfinite(q.support().right);
}

double safe_density(const Distribution& d, double x, double nudge) {
  const double v = d.density(x);
  if (std::isfinite(v)) return v;
  return d.density(x + nudge);
}

}  // namespace

std::string to_string(OrderKind k) {
  switch (k) {
    case OrderKind::St: return "st";
    case OrderKind::Hr: return "hr";
    case OrderKind::Lr: return "lr";
  }
  return "?";
}

SurvivalTable build_survival_table(const Distribution& p, const Distribution& q,
                                   const std::vector<double>& grid,
                                   const RunConfig& cfg) {
  SurvivalTable t;
  t.grid = grid;
  t.discrete = p.is_discrete();
  const std::size_t n = grid.size();
  t.fbar_p.resize(n);
  t.fbar_q.resize(n);
  t.t_ratio.assign(n, kNaN);
  t.h_p.assign(n, kNaN);
  t.h_q.assign(n, kNaN);
  t.d.resize(n);
  t.dint.assign(n, 0.0);

  const double span = grid.back() - grid.front();
  const double nudge = t.discrete ? 0.0 : 1e-12 * (1.0 + span);

  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid[i];
    t.fbar_p[i] = p.survival(x);
    t.fbar_q[i] = q.survival(x);
    const double fp = safe_density(p, x, nudge);
    const double fq = safe_density(q, x, nudge);
    t.d[i] = fp - fq;
    if (t.fbar_q[i] > cfg.hazard_floor) {
      t.t_ratio[i] = t.fbar_p[i] / t.fbar_q[i];
      t.h_q[i] = fq / t.fbar_q[i];
    }
    if (t.fbar_p[i] > cfg.hazard_floor) t.h_p[i] = fp / t.fbar_p[i];
  }

  // Independent cumulative route for D(x) = P([x0,x)) - Q([x0,x)).
  if (t.discrete) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      t.dint[i] = acc;  // mass strictly left of grid[i]
      acc += t.d[i];
    }
  } else {
    numerics::QuadratureSpec spec;
    spec.abs_tol = std::min(1e-12, cfg.quad_abs_tol);
    spec.max_subdivisions = 1 << 12;
    double acc = 0.0;
    std::size_t failures = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      t.dint[i] = acc;
      const double a = grid[i], b = grid[i + 1];
      double inc;
      try {
        inc = numerics::integrate(
            [&](double x) {
              const double fp = safe_density(p, x, nudge);
              const double fq = safe_density(q, x, nudge);
              return fp - fq;
            },
            a, b, spec);
      } catch (const ConvergenceError& e) {
        inc = e.best_estimate();
        ++failures;
      }
      acc += inc;
    }
    t.dint[n - 1] = acc;
    // An isolated rough cell is tolerable; systematic failure means the
    // requested tolerance is unattainable.
    if (failures > std::max<std::size_t>(2, n / 100))
      throw ConvergenceError(
          "survival table: cumulative-difference quadrature cannot meet the "
          "requested tolerance",
          acc);
  }

  for (std::size_t i = 0; i < n; ++i)
    t.identity_worst = std::max(
        t.identity_worst, std::fabs(t.fbar_p[i] - t.fbar_q[i] + t.dint[i]));
  t.neglected_tail = std::max(t.fbar_p[n - 1], t.fbar_q[n - 1]);
  return t;
}

namespace {

std::vector<double> refine_grid(const Distribution& p, const Distribution& q,
                                const RunConfig& cfg) {
  return evaluation_grid(p, q, 4 * cfg.grid_n, cfg.tail_mass);
}

bool near_boundary(double worst, double tol) {
  if (tol <= 0.0) return false;
  return worst >= tol / 10.0 && worst <= tol * 10.0;
}

OracleReport verify_st_once(const Distribution& p, const Distribution& q,
                            const std::vector<double>& grid,
                            const RunConfig& cfg) {
  OracleReport r;
  r.order = OrderKind::St;
  r.resolution = exact_pair(p, q) ? OracleReport::Resolution::Exact
                                  : OracleReport::Resolution::Grid;
  const double tol = r.resolution == OracleReport::Resolution::Exact
                         ? 0.0
                         : cfg.st_tol;
  r.worst_violation = -kInf;
  double tail = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = p.survival(grid[i]) - q.survival(grid[i]);
    if (v > r.worst_violation) {
      r.worst_violation = v;
      r.witness = grid[i];
    }
  }
  tail = std::max(p.survival(grid.back()), q.survival(grid.back()));
  r.neglected_tail = tail;
  r.holds = r.worst_violation <= tol;
  return r;
}

OracleReport verify_hr_once(const Distribution& p, const Distribution& q,
                            const std::vector<double>& grid,
                            const RunConfig& cfg) {
  OracleReport r;
  r.order = OrderKind::Hr;
  r.resolution = exact_pair(p, q) ? OracleReport::Resolution::Exact
                                  : OracleReport::Resolution::Grid;
  const SurvivalTable t = build_survival_table(p, q, grid, cfg);
  r.neglected_tail = t.neglected_tail;

  // Primary: survival ratio nonincreasing (robust at density kinks). A
  // transition to F_bar_Q = 0 while P still carries clear mass is T rising
  // to +inf, a violation, not an undefined point; the 100x floor margin
  // keeps truncated continuous tails (both survivals ~ tail_mass) out.
  r.worst_violation = -kInf;
  bool have_prev = false;
  double prev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::isnan(t.t_ratio[i])) {
      if (have_prev && t.fbar_p[i] > 100.0 * cfg.hazard_floor) {
        r.worst_violation = kInf;
        r.witness = grid[i];
        break;
      }
      continue;
    }
    if (have_prev) {
      const double inc = t.t_ratio[i] - prev;
      if (inc > r.worst_violation) {
        r.worst_violation = inc;
        r.witness = grid[i];
      }
    }
    prev = t.t_ratio[i];
    have_prev = true;
  }
  if (r.worst_violation == -kInf) r.worst_violation = 0.0;
  r.holds = r.worst_violation <= cfg.hr_slack;

  // Cross-check: pointwise hazard comparison, h_P >= h_Q where both are
  // defined. The two forms are equivalent characterizations but sample the
  // same mathematics differently (point values vs grid differences), so a
  // decisive hazard violation the ratio route cannot resolve folds into the
  // verdict; a contradiction on shared ground is a diagnostic failure.
  double worst_h = -kInf, worst_h_at = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::isnan(t.h_p[i]) || std::isnan(t.h_q[i])) continue;
    const double v = (t.h_q[i] - t.h_p[i]) / (1.0 + std::fabs(t.h_q[i]));
    if (v > worst_h) {
      worst_h = v;
      worst_h_at = grid[i];
    }
  }
  if (worst_h > -kInf) {
    if (r.holds && worst_h > 1e-4) {
      r.holds = false;
      r.worst_violation = worst_h;
      r.witness = worst_h_at;
      return r;
    }
    if (!r.holds && r.worst_violation > 10.0 * cfg.hr_slack && worst_h < 1e-12) {
      // Only a contradiction when the hazard route could actually see the
      // violating step.
      bool hazards_defined_at_witness = false;
      for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] == r.witness)
          hazards_defined_at_witness =
              !std::isnan(t.h_p[i]) && !std::isnan(t.h_q[i]);
      if (hazards_defined_at_witness)
        throw DiagnosticError(
            "hr oracle: survival-ratio route fails decisively but hazard "
            "route sees no violation");
    }
  }
  return r;
}

OracleReport verify_lr_once(const Distribution& p, const Distribution& q,
                            const std::vector<double>& grid,
                            const RunConfig& cfg) {
  OracleReport r;
  r.order = OrderKind::Lr;
  r.resolution = exact_pair(p, q) ? OracleReport::Resolution::Exact
                                  : OracleReport::Resolution::Grid;
  const RatioProfile prof = ratio_profile(p, q, grid);
  r.neglected_tail = std::max(p.survival(grid.back()), q.survival(grid.back()));
  r.worst_violation = -kInf;
  bool have_prev = false;
  double prev = 0.0;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    if (prof.flags[i] == RatioFlag::ZeroOverZero) continue;  // outside S
    const double cur = prof.ell[i];
    if (have_prev) {
      double viol;
      if (prev == kInf)
        viol = 0.0;  // +inf > finite: nonincreasing by convention
      else if (cur == kInf)
        viol = kInf;
      else
        viol = (cur - prev) / std::max({1.0, std::fabs(prev), std::fabs(cur)});
      if (viol > r.worst_violation) {
        r.worst_violation = viol;
        r.witness = grid[i];
      }
    }
    prev = cur;
    have_prev = true;
  }
  if (r.worst_violation == -kInf) r.worst_violation = 0.0;
  r.holds = r.worst_violation <= cfg.lr_rel_slack;
  return r;
}

using VerifyFn = OracleReport (*)(const Distribution&, const Distribution&,
                                  const std::vector<double>&, const RunConfig&);

// Near-boundary verdicts are re-run once at 4x grid density and the refined
// verdict kept: guards against spurious grid-resolution calls.
OracleReport with_refinement(VerifyFn fn, double tol, const Distribution& p,
                             const Distribution& q,
                             const std::vector<double>& grid,
                             const RunConfig& cfg) {
  OracleReport r = fn(p, q, grid, cfg);
  if (r.resolution == OracleReport::Resolution::Grid &&
      near_boundary(std::fabs(r.worst_violation), tol)) {
    OracleReport refined = fn(p, q, refine_grid(p, q, cfg), cfg);
    refined.refined = true;
    return refined;
  }
  return r;
}

}  // namespace

OracleReport verify_st(const Distribution& p, const Distribution& q,
                       const std::vector<double>& grid, const RunConfig& cfg) {
  return with_refinement(&verify_st_once, cfg.st_tol, p, q, grid, cfg);
}

OracleReport verify_hr(const Distribution& p, const Distribution& q,
                       const std::vector<double>& grid, const RunConfig& cfg) {
  return with_refinement(&verify_hr_once, cfg.hr_slack, p, q, grid, cfg);
}

OracleReport verify_lr(const Distribution& p, const Distribution& q,
                       const std::vector<double>& grid, const RunConfig& cfg) {
  return with_refinement(&verify_lr_once, cfg.lr_rel_slack, p, q, grid, cfg);
}

ImplicationAudit implication_audit(const Distribution& p, const Distribution& q,
                                   const std::vector<double>& grid,
                                   const RunConfig& cfg) {
  ImplicationAudit a{verify_st(p, q, grid, cfg), verify_hr(p, q, grid, cfg),
                     verify_lr(p, q, grid, cfg)};
  const auto dump = [&](const char* what) {
    std::ostringstream os;
    os << "implication audit violated (" << what << ") for " << p.label()
       << " vs " << q.label() << ": st worst=" << a.st.worst_violation
       << " @" << a.st.witness << ", hr worst=" << a.hr.worst_violation << " @"
       << a.hr.witness << ", lr worst=" << a.lr.worst_violation << " @"
       << a.lr.witness;
    return os.str();
  };
  if (a.lr.holds && !a.hr.holds) throw DiagnosticError(dump("lr => hr"));
  if (a.hr.holds && !a.st.holds) throw DiagnosticError(dump("hr => st"));
  return a;
}

double max_t_minus_ell(const SurvivalTable& table, const RatioProfile& profile,
                       const RunConfig& cfg) {
  (void)cfg;
  double worst = -kInf;
  const std::size_t n = std::min(table.grid.size(), profile.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(table.t_ratio[i])) continue;
    if (profile.flags[i] != RatioFlag::Finite) continue;  // T <= +inf trivially
    worst = std::max(worst, table.t_ratio[i] - profile.ell[i]);
  }
  return worst == -kInf ? 0.0 : worst;
}

}  // namespace stochorder
