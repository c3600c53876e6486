#include "stochorder/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stochorder/errors.hpp"
#include "stochorder/numerics.hpp"

namespace stochorder {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfLog2Pi = 0.91893853320467274178;

std::string fmt_param(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::domain_error(msg);
}

// ---- piecewise machinery ---------------------------------------------------

struct CompiledPiece {
  double from = 0.0;
  double to = 0.0;          // +inf allowed on the last piece
  double eval_to = 0.0;     // finite truncation of `to` used for integrals
  expr::Expression fn;
  double mass = 0.0;        // normalized mass of the piece
  double mass_after = 0.0;  // normalized mass strictly right of the piece
};

struct PiecewiseData {
  std::vector<CompiledPiece> pieces;
  double factor = 1.0;  // global renormalization
  double c = 0.0;       // solved free constant

  // Right-hand piece at breakpoints; the last piece owns its right endpoint.
  const CompiledPiece* locate(double x) const {
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
      if (x >= pieces[i].from && x < pieces[i].to) return &pieces[i];
    const CompiledPiece& last = pieces.back();
    if (x >= last.from && x <= last.to) return &last;
    return nullptr;
  }

  double raw(double x) const {
    const CompiledPiece* p = locate(x);
    return p ? p->fn.eval(x, c) : 0.0;
  }

  double density(double x) const { return factor * std::max(0.0, raw(x)); }
};

double piece_integral(const PiecewiseData& pw, const CompiledPiece& piece,
                      double lo, double hi) {
  if (hi <= lo) return 0.0;
  const auto f = [&](double x) { return piece.fn.eval(x, pw.c); };
  // One-shot Simpson estimate fixes the magnitude so small tail integrals
  // get a *relative* tolerance; survival ratios in deep tails must stay
  // meaningful, so there is no absolute floor above the representable range.
  const double mid = 0.5 * (lo + hi);
  const double head = std::fabs(f(lo)) * std::min(hi - lo, 1.0);
  const double quick =
      std::fabs((hi - lo) / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi)));
  numerics::QuadratureSpec spec;
  spec.abs_tol =
      std::min(1e-13, std::max({quick, head, 1e-250} ) * 1e-12);
  return numerics::integrate(f, lo, hi, spec);
}

// Truncates an infinite last piece where the remaining tail is < 1e-16.
double truncate_tail(const PiecewiseData& pw, const CompiledPiece& piece) {
  double t = piece.from + 1.0;
  double total = piece_integral(pw, piece, piece.from, t);
  for (int i = 0; i < 80; ++i) {
    const double t2 = piece.from + (t - piece.from) * 2.0;
    const double inc = piece_integral(pw, piece, t, t2);
    t = t2;
    total += inc;
    if (std::fabs(inc) < 1e-16 * (1.0 + std::fabs(total)) &&
        std::fabs(piece.fn.eval(t, pw.c)) < 1e-18)
      return t;
  }
  throw std::domain_error("piecewise density: unbounded tail does not decay");
}

double total_raw_mass(PiecewiseData& pw) {
  double sum = 0.0;
  for (auto& p : pw.pieces) sum += piece_integral(pw, p, p.from, p.eval_to);
  return sum;
}

void solve_free_constant(PiecewiseData& pw) {
  auto mass_at = [&](double c) {
    pw.c = c;
    if (std::isinf(pw.pieces.back().to))
      pw.pieces.back().eval_to = truncate_tail(pw, pw.pieces.back());
    return total_raw_mass(pw);
  };
  const double m0 = mass_at(0.0);
  if (std::fabs(m0 - 1.0) <= 1e-13) return;
  // Bracket the root of mass(c) - 1 around 0, trying both signs.
  double lo = 0.0, hi = 0.0, m_lo = m0;
  bool found = false;
  for (double step = 1.0; step <= 1e12 && !found; step *= 4.0) {
    for (double cand : {step, -step}) {
      const double m = mass_at(cand);
      if ((m0 - 1.0) * (m - 1.0) <= 0.0) {
        lo = std::min(0.0, cand);
        hi = std::max(0.0, cand);
        m_lo = (lo == 0.0) ? m0 : m;
        found = true;
        break;
      }
    }
  }
  require(found, "piecewise density: cannot normalize via the free constant c");
  for (int i = 0; i < 200 && hi - lo > 1e-15 * (1.0 + std::fabs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double m = mass_at(mid);
    if (std::fabs(m - 1.0) <= 1e-13) { pw.c = mid; return; }
    if ((m_lo - 1.0) * (m - 1.0) <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      m_lo = m;
    }
  }
  const double m_final = mass_at(0.5 * (lo + hi));
  require(std::fabs(m_final - 1.0) < 1e-9,
          "piecewise density: free-constant solve did not converge");
}

// ---- quantile by bisection -------------------------------------------------

double quantile_bisect_real(const std::function<double(double)>& cdf,
                            double left, double right, double p) {
  double lo = left;
  double hi;
  if (std::isfinite(right)) {
    hi = right;
  } else {
    hi = left + 1.0;
    int guard = 0;
    while (cdf(hi) < p) {
      hi = left + (hi - left) * 2.0;
      if (++guard > 2000) throw ConvergenceError("quantile: no finite bracket", hi);
    }
  }
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (cdf(mid) >= p)
      hi = mid;
    else
      lo = mid;
    if (hi - lo <= 1e-12 * (1.0 + std::fabs(hi))) break;
  }
  return hi;
}

double quantile_search_integer(const std::function<double(double)>& cdf,
                               double lo_support, double hi_support, double p) {
  // Smallest integer k with cdf(k) >= p.
  double lo = lo_support - 1.0;  // cdf(lo) < p by construction (cdf = 0 there)
  double hi = lo_support;
  int guard = 0;
  while (cdf(hi) < p && hi < hi_support) {
    const double width = std::max(1.0, hi - lo);
    lo = hi;
    hi = std::min(hi_support, hi + 2.0 * width);
    if (++guard > 500) break;
  }
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    if (cdf(mid) >= p)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace

std::string family_name(const FamilySpec& spec) {
  struct Visitor {
    std::string operator()(const GammaSpec&) const { return "gamma"; }
    std::string operator()(const ExponentialSpec&) const { return "exponential"; }
    std::string operator()(const HalfNormalSpec&) const { return "halfnormal"; }
    std::string operator()(const HalfStudentSpec&) const { return "halfstudent"; }
    std::string operator()(const FoldedNormalSpec&) const { return "foldednormal"; }
    std::string operator()(const PoissonSpec&) const { return "poisson"; }
    std::string operator()(const ZeroInflatedPoissonSpec&) const { return "zip"; }
    std::string operator()(const UniformSpec&) const { return "uniform"; }
    std::string operator()(const PiecewiseSpec&) const { return "piecewise"; }
    std::string operator()(const TabulatedSpec&) const { return "tabulated"; }
  };
  return std::visit(Visitor{}, spec);
}

double Distribution::log_density(double x) const { return log_density_(x); }

double Distribution::density(double x) const {
  const double ld = log_density_(x);
  if (ld == -kInf) return 0.0;
  return std::exp(ld);
}

double Distribution::cdf(double x) const { return cdf_(x); }

double Distribution::survival(double x) const {
  if (x <= support_.left) return 1.0;
  if (x > support_.right) return 0.0;
  const double arg = is_discrete() ? std::ceil(x - 1e-9) : x;
  const double s =
      survival_ ? survival_(arg)
                : (is_discrete() ? 1.0 - cdf_(arg - 1.0) : 1.0 - cdf_(arg));
  return std::min(1.0, std::max(0.0, s));
}

double Distribution::quantile(double p) const {
  require(p > 0.0 && p < 1.0, "quantile: p must be in (0,1)");
  if (is_discrete())
    return quantile_search_integer(cdf_, support_.left, support_.right, p);
  return quantile_bisect_real(cdf_, support_.left, support_.right, p);
}

namespace {

// Mass/consistency audit: integrate the density in quantile chunks and
// compare with the cdf mass of the covered range. The lower cut moves
// strictly inside the support when the density diverges at the boundary
// (gamma with shape < 1), where the singularity is integrable but not
// evaluable.
void check_continuous_mass(const Distribution& d) {
  const double p_end = 1.0 - 1e-6;
  const double x_end = std::isfinite(d.support().right) ? d.support().right
                                                        : d.quantile(p_end);
  double x_lo = d.support().left;
  if (!std::isfinite(d.density(x_lo))) x_lo = d.quantile(1e-7);
  const double target =
      (std::isfinite(d.support().right) ? 1.0 : d.cdf(x_end)) - d.cdf(x_lo);
  std::vector<double> cuts;
  cuts.push_back(x_lo);
  for (int i = 1; i <= 19; ++i) {
    const double q = d.quantile(0.05 * i);
    if (q > cuts.back() && q < x_end) cuts.push_back(q);
  }
  // Geometric refinement toward the tail keeps each chunk's dynamic range
  // bounded for heavy-tailed (power-law) laws.
  for (double pt : {0.99, 0.999, 0.9999, 0.99999, 0.999999}) {
    const double q = d.quantile(pt);
    if (q > cuts.back() && q < x_end) cuts.push_back(q);
  }
  for (double b : d.breakpoints())
    if (b > cuts.front() && b < x_end) cuts.push_back(b);
  cuts.push_back(x_end);
  std::sort(cuts.begin(), cuts.end());
  numerics::QuadratureSpec spec;
  spec.abs_tol = 1e-10;
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    mass += numerics::integrate([&](double x) { return d.density(x); }, cuts[i],
                                cuts[i + 1], spec);
  require(std::fabs(mass - target) <= 1e-8,
          "distribution mass check failed for " + d.label());
}

void check_discrete_mass(const Distribution& d) {
  double sum = 0.0;
  double k = d.support().left;
  const double hard_cap = d.support().left + 2e6;
  while (k <= d.support().right && k < hard_cap) {
    sum += d.density(k);
    if (d.survival(k + 1.0) < 1e-13) break;
    k += 1.0;
  }
  require(std::fabs(sum - 1.0) <= 1e-8,
          "distribution mass check failed for " + d.label());
}

}  // namespace

Distribution build(const FamilySpec& spec, std::string label) {
  Distribution d;
  d.spec_ = spec;

  if (const auto* g = std::get_if<GammaSpec>(&spec)) {
    require(g->shape > 0.0 && g->scale > 0.0, "gamma: shape and scale must be > 0");
    const double r = g->shape, beta = g->scale;
    d.support_ = {Support::Kind::Real, 0.0, kInf};
    const double log_norm = numerics::log_gamma(r) + r * std::log(beta);
    d.log_density_ = [r, beta, log_norm](double x) {
      if (x < 0.0) return -kInf;
      if (x == 0.0) {
        if (r > 1.0) return -kInf;
        if (r == 1.0) return -std::log(beta);
        return kInf;
      }
      return (r - 1.0) * std::log(x) - x / beta - log_norm;
    };
    d.cdf_ = [r, beta](double x) {
      return x <= 0.0 ? 0.0 : numerics::reg_lower_gamma(r, x / beta);
    };
    d.survival_ = [r, beta](double x) {
      return x <= 0.0 ? 1.0 : numerics::reg_upper_gamma(r, x / beta);
    };
    if (label.empty())
      label = "gamma(r=" + fmt_param(r) + ",beta=" + fmt_param(beta) + ")";
  } else if (const auto* e = std::get_if<ExponentialSpec>(&spec)) {
    require(e->rate > 0.0, "exponential: rate must be > 0");
    const double rate = e->rate;
    d.support_ = {Support::Kind::Real, 0.0, kInf};
    d.log_density_ = [rate](double x) {
      return x < 0.0 ? -kInf : std::log(rate) - rate * x;
    };
    d.cdf_ = [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
    d.survival_ = [rate](double x) { return x <= 0.0 ? 1.0 : std::exp(-rate * x); };
    if (label.empty()) label = "exp(rate=" + fmt_param(rate) + ")";
  } else if (const auto* h = std::get_if<HalfNormalSpec>(&spec)) {
    require(h->sigma > 0.0, "halfnormal: sigma must be > 0");
    const double s = h->sigma;
    const double log_norm = std::log(s) + kHalfLog2Pi - std::log(2.0);
    d.support_ = {Support::Kind::Real, 0.0, kInf};
    d.log_density_ = [s, log_norm](double x) {
      return x < 0.0 ? -kInf : -0.5 * (x / s) * (x / s) - log_norm;
    };
    d.cdf_ = [s](double x) {
      return x <= 0.0 ? 0.0 : std::erf(x / (s * std::sqrt(2.0)));
    };
    d.survival_ = [s](double x) {
      return x <= 0.0 ? 1.0 : std::erfc(x / (s * std::sqrt(2.0)));
    };
    if (label.empty()) label = "halfnormal(sigma=" + fmt_param(s) + ")";
  } else if (const auto* t = std::get_if<HalfStudentSpec>(&spec)) {
    require(t->nu > 0.0, "halfstudent: nu must be > 0");
    const double nu = t->nu;
    const double log_norm = std::log(2.0) + numerics::log_gamma(0.5 * (nu + 1.0)) -
                            0.5 * std::log(nu * M_PI) - numerics::log_gamma(0.5 * nu);
    d.support_ = {Support::Kind::Real, 0.0, kInf};
    d.log_density_ = [nu, log_norm](double x) {
      if (x < 0.0) return -kInf;
      return log_norm - 0.5 * (nu + 1.0) * std::log1p(x * x / nu);
    };
    d.cdf_ = [nu](double x) {
      if (x <= 0.0) return 0.0;
      return 1.0 - numerics::reg_inc_beta(0.5 * nu, 0.5, nu / (nu + x * x));
    };
    d.survival_ = [nu](double x) {
      return x <= 0.0 ? 1.0
                      : numerics::reg_inc_beta(0.5 * nu, 0.5, nu / (nu + x * x));
    };
    if (label.empty()) label = "halfstudent(nu=" + fmt_param(nu) + ")";
  } else if (const auto* f = std::get_if<FoldedNormalSpec>(&spec)) {
    require(f->sigma > 0.0, "foldednormal: sigma must be > 0");
    const double mu = f->mu, s = f->sigma;
    const double log_norm = std::log(s) + kHalfLog2Pi;
    d.support_ = {Support::Kind::Real, 0.0, kInf};
    d.log_density_ = [mu, s, log_norm](double x) {
      if (x < 0.0) return -kInf;
      const double a = -0.5 * ((x - mu) / s) * ((x - mu) / s);
      const double b = -0.5 * ((x + mu) / s) * ((x + mu) / s);
      const double m = std::max(a, b);
      return m + std::log1p(std::exp(std::min(a, b) - m)) - log_norm;
    };
    d.cdf_ = [mu, s](double x) {
      if (x <= 0.0) return 0.0;
      const double rt2 = std::sqrt(2.0);
      return 0.5 * (std::erf((x + mu) / (s * rt2)) + std::erf((x - mu) / (s * rt2)));
    };
    d.survival_ = [mu, s](double x) {
      if (x <= 0.0) return 1.0;
      const double rt2 = std::sqrt(2.0);
      return 0.5 *
             (std::erfc((x + mu) / (s * rt2)) + std::erfc((x - mu) / (s * rt2)));
    };
    if (label.empty())
      label = "foldednormal(mu=" + fmt_param(mu) + ",sigma=" + fmt_param(s) + ")";
  } else if (const auto* p = std::get_if<PoissonSpec>(&spec)) {
    require(p->lambda > 0.0, "poisson: lambda must be > 0");
    const double lam = p->lambda;
    d.support_ = {Support::Kind::Integer, 0.0, kInf};
    d.log_density_ = [lam](double x) {
      const double k = std::round(x);
      if (k < 0.0 || std::fabs(x - k) > 1e-9) return -kInf;
      return k * std::log(lam) - lam - numerics::log_gamma(k + 1.0);
    };
    d.cdf_ = [lam](double x) {
      const double k = std::floor(x + 1e-9);
      if (k < 0.0) return 0.0;
      return numerics::reg_upper_gamma(k + 1.0, lam);
    };
    d.survival_ = [lam](double k) {
      return k <= 0.0 ? 1.0 : numerics::reg_lower_gamma(k, lam);
    };
    if (label.empty()) label = "poisson(lambda=" + fmt_param(lam) + ")";
  } else if (const auto* z = std::get_if<ZeroInflatedPoissonSpec>(&spec)) {
    require(z->pi > 0.0 && z->pi < 1.0, "zip: pi must be in (0,1)");
    require(z->lambda > 0.0, "zip: lambda must be > 0");
    const double pi = z->pi, lam = z->lambda;
    d.support_ = {Support::Kind::Integer, 0.0, kInf};
    d.log_density_ = [pi, lam](double x) {
      const double k = std::round(x);
      if (k < 0.0 || std::fabs(x - k) > 1e-9) return -kInf;
      if (k == 0.0) return std::log(pi + (1.0 - pi) * std::exp(-lam));
      return std::log1p(-pi) + k * std::log(lam) - lam -
             numerics::log_gamma(k + 1.0);
    };
    d.cdf_ = [pi, lam](double x) {
      const double k = std::floor(x + 1e-9);
      if (k < 0.0) return 0.0;
      return pi + (1.0 - pi) * numerics::reg_upper_gamma(k + 1.0, lam);
    };
    d.survival_ = [pi, lam](double k) {
      return k <= 0.0 ? 1.0 : (1.0 - pi) * numerics::reg_lower_gamma(k, lam);
    };
    if (label.empty())
      label = "zip(pi=" + fmt_param(pi) + ",lambda=" + fmt_param(lam) + ")";
  } else if (const auto* u = std::get_if<UniformSpec>(&spec)) {
    require(u->a < u->b, "uniform: a must be < b");
    const double a = u->a, b = u->b;
    d.support_ = {Support::Kind::Real, a, b};
    d.log_density_ = [a, b](double x) {
      return (x < a || x > b) ? -kInf : -std::log(b - a);
    };
    d.cdf_ = [a, b](double x) {
      if (x <= a) return 0.0;
      if (x >= b) return 1.0;
      return (x - a) / (b - a);
    };
    d.survival_ = [a, b](double x) {
      if (x <= a) return 1.0;
      if (x >= b) return 0.0;
      return (b - x) / (b - a);
    };
    if (label.empty())
      label = "uniform(" + fmt_param(a) + "," + fmt_param(b) + ")";
  } else if (const auto* pw_spec = std::get_if<PiecewiseSpec>(&spec)) {
    require(!pw_spec->pieces.empty(), "piecewise: needs at least one piece");
    auto pw = std::make_shared<PiecewiseData>();
    bool uses_c = false;
    for (std::size_t i = 0; i < pw_spec->pieces.size(); ++i) {
      const auto& ps = pw_spec->pieces[i];
      require(ps.from < ps.to, "piecewise: piece endpoints must satisfy from < to");
      require(std::isfinite(ps.from), "piecewise: left endpoints must be finite");
      require(std::isfinite(ps.to) || i + 1 == pw_spec->pieces.size(),
              "piecewise: only the last piece may extend to +inf");
      if (i > 0)
        require(std::fabs(ps.from - pw_spec->pieces[i - 1].to) < 1e-12,
                "piecewise: pieces must be contiguous");
      CompiledPiece cp;
      cp.from = ps.from;
      cp.to = ps.to;
      cp.eval_to = ps.to;  // infinite case truncated below
      cp.fn = expr::parse(ps.expr);
      uses_c = uses_c || cp.fn.uses_constant();
      pw->pieces.push_back(std::move(cp));
    }
    if (std::isinf(pw->pieces.back().to))
      pw->pieces.back().eval_to = truncate_tail(*pw, pw->pieces.back());

    if (uses_c) solve_free_constant(*pw);
    const double mass = total_raw_mass(*pw);
    require(mass > 0.0, "piecewise: nonpositive total mass");
    pw->factor = 1.0 / mass;
    d.norm_factor_ = pw->factor;
    d.solved_c_ = pw->c;

    // Nonnegativity after solving the constant.
    for (const auto& piece : pw->pieces) {
      const int samples = 512;
      for (int i = 0; i <= samples; ++i) {
        const double x = piece.from +
                         (piece.eval_to - piece.from) * i / static_cast<double>(samples);
        require(piece.fn.eval(x, pw->c) >= -1e-12,
                "piecewise: density negative at x=" + fmt_param(x));
      }
    }

    // Per-piece masses (normalized) and cumulative-tail table.
    double after = 0.0;
    for (auto it = pw->pieces.rbegin(); it != pw->pieces.rend(); ++it) {
      it->mass_after = after;
      it->mass = pw->factor * piece_integral(*pw, *it, it->from, it->eval_to);
      after += it->mass;
    }

    d.support_ = {Support::Kind::Real, pw->pieces.front().from,
                  pw->pieces.back().to};
    for (std::size_t i = 1; i < pw->pieces.size(); ++i)
      d.breakpoints_.push_back(pw->pieces[i].from);

    d.log_density_ = [pw](double x) {
      const CompiledPiece* p = pw->locate(x);
      if (!p) return -kInf;
      const double v = pw->factor * p->fn.eval(x, pw->c);
      return v > 0.0 ? std::log(v) : -kInf;
    };
    d.cdf_ = [pw](double x) {
      if (x <= pw->pieces.front().from) return 0.0;
      const CompiledPiece* p = pw->locate(x);
      if (!p) return x > pw->pieces.front().from ? 1.0 : 0.0;
      const double tail_in_piece =
          x >= p->eval_to ? 0.0
                          : pw->factor * piece_integral(*pw, *p, x, p->eval_to);
      return std::max(0.0, std::min(1.0, 1.0 - (p->mass_after + tail_in_piece)));
    };
    d.survival_ = [pw](double x) {
      if (x <= pw->pieces.front().from) return 1.0;
      const CompiledPiece* p = pw->locate(x);
      if (!p) return 0.0;
      const double tail_in_piece =
          x >= p->eval_to ? 0.0
                          : pw->factor * piece_integral(*pw, *p, x, p->eval_to);
      return p->mass_after + tail_in_piece;
    };
    if (label.empty())
      label = "piecewise(" + std::to_string(pw->pieces.size()) + " pieces)";
  } else if (const auto* tab = std::get_if<TabulatedSpec>(&spec)) {
    require(tab->hi >= tab->lo, "tabulated: hi must be >= lo");
    const auto n = static_cast<std::size_t>(tab->hi - tab->lo + 1);
    require(tab->weights.size() == n,
            "tabulated: weights size must match support size");
    double total = 0.0;
    for (double w : tab->weights) {
      require(w >= 0.0, "tabulated: weights must be >= 0");
      total += w;
    }
    require(total > 0.0, "tabulated: total weight must be > 0");
    auto pmf = std::make_shared<std::vector<double>>(tab->weights);
    for (double& w : *pmf) w /= total;
    auto prefix = std::make_shared<std::vector<double>>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += (*pmf)[i];
      (*prefix)[i] = acc;
    }
    (*prefix)[n - 1] = 1.0;  // cdf at the top of the support is 1 by definition
    // Suffix sums pinned to exactly 1 at and left of the first positive
    // atom: survivals there equal 1 by definition (the full mass lies to the
    // right), so the exact-zero st tolerance cannot see normalization
    // roundoff on mathematically forced ties.
    auto suffix = std::make_shared<std::vector<double>>(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) (*suffix)[i] = (*suffix)[i + 1] + (*pmf)[i];
    for (std::size_t i = 0; i < n && (*suffix)[i] > 0.0; ++i) {
      (*suffix)[i] = 1.0;
      if ((*pmf)[i] > 0.0) break;  // later suffixes are genuine partial sums
    }
    const double lo = static_cast<double>(tab->lo);
    const double hi = static_cast<double>(tab->hi);
    d.support_ = {Support::Kind::Integer, lo, hi};
    d.log_density_ = [pmf, lo, hi](double x) {
      const double k = std::round(x);
      if (k < lo || k > hi || std::fabs(x - k) > 1e-9) return -kInf;
      const double v = (*pmf)[static_cast<std::size_t>(k - lo)];
      return v > 0.0 ? std::log(v) : -kInf;
    };
    d.cdf_ = [prefix, lo, hi](double x) {
      const double k = std::floor(x + 1e-9);
      if (k < lo) return 0.0;
      if (k >= hi) return 1.0;
      return (*prefix)[static_cast<std::size_t>(k - lo)];
    };
    d.survival_ = [suffix, lo, hi](double k) {
      if (k <= lo) return 1.0;
      if (k > hi) return 0.0;
      return (*suffix)[static_cast<std::size_t>(k - lo)];
    };
    if (label.empty())
      label = "tabulated[" + std::to_string(tab->lo) + "," +
              std::to_string(tab->hi) + "]";
  }

  d.label_ = std::move(label);

  if (d.is_discrete())
    check_discrete_mass(d);
  else
    check_continuous_mass(d);
  return d;
}

namespace {

double truncation_point(const Distribution& d, double tail_mass) {
  if (std::isfinite(d.support().right)) return d.support().right;
  return d.quantile(1.0 - tail_mass);
}

}  // namespace

std::vector<double> evaluation_grid(const Distribution& p, const Distribution& q,
                                    int n, double tail_mass) {
  require(n >= 2, "evaluation_grid: n must be >= 2");
  require(tail_mass > 0.0 && tail_mass < 0.5, "evaluation_grid: bad tail_mass");
  require(p.support().kind == q.support().kind,
          "evaluation_grid: mixed integer/real supports");

  const double left = std::min(p.support().left, q.support().left);
  const double overlap_lo = std::max(p.support().left, q.support().left);
  const double overlap_hi = std::min(p.support().right, q.support().right);

  if (p.is_discrete()) {
    require(overlap_lo <= overlap_hi, "evaluation_grid: disjoint supports");
    const double right = std::max(p.support().right, q.support().right);
    std::vector<double> grid;
    double k = left;
    const double hard_cap = left + 5e6;
    for (;;) {
      grid.push_back(k);
      const bool negligible =
          p.survival(k) < tail_mass && q.survival(k) < tail_mass;
      if (negligible || k >= right || k >= hard_cap) break;
      k += 1.0;
    }
    return grid;
  }

  require(overlap_lo < overlap_hi, "evaluation_grid: disjoint supports");
  const double right =
      std::max(truncation_point(p, tail_mass), truncation_point(q, tail_mass));

  // Heavy tails: keep half the budget in the body, go geometric in the tail.
  const double med = std::max(p.quantile(0.5), q.quantile(0.5));
  double body_span = med - left;
  if (!(body_span > 0.0)) body_span = (right - left) / n;
  std::vector<double> base;
  base.reserve(static_cast<std::size_t>(n));
  if (right - left <= 100.0 * body_span) {
    for (int i = 0; i < n; ++i)
      base.push_back(left + (right - left) * i / static_cast<double>(n - 1));
  } else {
    const int n_body = n / 2;
    const int n_tail = n - n_body;
    const double body_hi = left + 20.0 * body_span;
    for (int i = 0; i < n_body; ++i)
      base.push_back(left + (body_hi - left) * i / static_cast<double>(n_body - 1));
    // Geometric spacing measured from `left` so ratios are scale-free.
    const double a = body_hi - left;
    const double b = right - left;
    for (int i = 1; i <= n_tail; ++i)
      base.push_back(left + a * std::pow(b / a, i / static_cast<double>(n_tail)));
  }
  base.front() = left;
  base.back() = right;

  // Breakpoints are mandatory grid points and win ties against base points.
  std::vector<double> bps;
  for (const auto* d : {&p, &q})
    for (double b : d->breakpoints())
      if (b > left && b < right) bps.push_back(b);
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  std::vector<double> grid;
  grid.reserve(base.size() + bps.size());
  std::size_t bi = 0;
  const double tie_tol = (right - left) * 1e-12;
  for (double x : base) {
    while (bi < bps.size() && bps[bi] < x - tie_tol) grid.push_back(bps[bi++]);
    if (bi < bps.size() && std::fabs(bps[bi] - x) <= tie_tol) {
      grid.push_back(bps[bi++]);
      continue;
    }
    grid.push_back(x);
  }
  while (bi < bps.size()) grid.push_back(bps[bi++]);
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  // When a density vanishes or diverges at the left endpoint, the ratio has
  // a boundary layer there (the endpoint criteria's territory), so the first
  // cell gets geometric sub-steps down to ~1e-10 of its width.
  const bool p_singular = !std::isfinite(p.log_density(left));
  const bool q_singular = !std::isfinite(q.log_density(left));
  if ((p_singular || q_singular) && grid.size() >= 2) {
    const double h0 = grid[1] - grid[0];
    std::vector<double> fine;
    for (int k = 32; k >= 1; --k) {
      const double x = left + h0 / std::pow(2.0, k);
      if (x > left && x < grid[1]) fine.push_back(x);
    }
    grid.insert(grid.begin() + 1, fine.begin(), fine.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }
  return grid;
}

}  // namespace stochorder
