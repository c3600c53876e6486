#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stochorder/expression.hpp"

namespace stochorder {

// Ordered support E: an integer interval with counting measure or a real
// interval with Lebesgue measure. The left endpoint is always finite; every
// criterion downstream assumes it.
struct Support {
  enum class Kind { Integer, Real };
  Kind kind = Kind::Real;
  double left = 0.0;
  double right = 0.0;  // may be +infinity

  bool is_discrete() const { return kind == Kind::Integer; }
};

struct GammaSpec { double shape = 1.0; double scale = 1.0; };
struct ExponentialSpec { double rate = 1.0; };
struct HalfNormalSpec { double sigma = 1.0; };
struct HalfStudentSpec { double nu = 1.0; };
struct FoldedNormalSpec { double mu = 0.0; double sigma = 1.0; };
struct PoissonSpec { double lambda = 1.0; };
struct ZeroInflatedPoissonSpec { double pi = 0.5; double lambda = 1.0; };
struct UniformSpec { double a = 0.0; double b = 1.0; };

struct PiecewiseSpec {
  struct Piece {
    double from = 0.0;
    double to = 0.0;  // +infinity allowed on the last piece
    std::string expr;
  };
  std::vector<Piece> pieces;
};

struct TabulatedSpec {
  long long lo = 0;
  long long hi = 0;
  std::vector<double> weights;  // size hi - lo + 1, renormalized at build
};

using FamilySpec =
    std::variant<GammaSpec, ExponentialSpec, HalfNormalSpec, HalfStudentSpec,
                 FoldedNormalSpec, PoissonSpec, ZeroInflatedPoissonSpec,
                 UniformSpec, PiecewiseSpec, TabulatedSpec>;

std::string family_name(const FamilySpec& spec);

// Immutable law with density/pmf, cdf, survival and quantile access.
// Survival uses closed forms where the family admits them and quadrature
// otherwise; evaluation is pure, so concurrent reads are safe.
class Distribution {
 public:
  const Support& support() const { return support_; }
  const std::string& label() const { return label_; }
  const FamilySpec& spec() const { return spec_; }
  bool is_discrete() const { return support_.is_discrete(); }

  // Density w.r.t. the reference measure; 0 outside the support. At a real
  // boundary point this is the one-sided limit (which may be +infinity).
  double density(double x) const;
  double log_density(double x) const;  // -inf where density is 0

  // F(x) = P((-inf, x]); survival(x) = P([x, inf)), with the conventions
  // survival = 1 left of the support and 0 right of it.
  double cdf(double x) const;
  double survival(double x) const;

  // Smallest x with cdf(x) >= p, p in (0,1). Bisection on the cdf.
  double quantile(double p) const;

  // Interior kinks of piecewise densities; mandatory grid points.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  // Normalization factor applied to a piecewise density whose raw pieces
  // did not integrate to 1 (1.0 when no rescaling happened), and the value
  // solved for the free constant `c` (0 when the family has none).
  double normalization_factor() const { return norm_factor_; }
  double solved_constant() const { return solved_c_; }

  // An empty shell until assigned from build(); evaluating one throws.
  Distribution() = default;

 private:
  friend Distribution build(const FamilySpec&, std::string);

  Support support_;
  std::string label_;
  FamilySpec spec_;
  std::vector<double> breakpoints_;
  double norm_factor_ = 1.0;
  double solved_c_ = 0.0;

  std::function<double(double)> log_density_;
  std::function<double(double)> cdf_;       // closed/semi-closed form
  std::function<double(double)> survival_;  // direct form, no 1-cdf cancellation
};

// Builds a Distribution, validating parameter domains and checking total
// mass to 1e-8. Throws std::domain_error on out-of-domain parameters or a
// piecewise density that is negative somewhere.
Distribution build(const FamilySpec& spec, std::string label = "");

// Shared evaluation grid for a pair of laws.
//   integer case: all support points out to the first k where both
//     survivals drop below tail_mass;
//   real case: n points spanning [min left endpoint, max truncation point],
//     with every piecewise breakpoint of either density inserted exactly.
//     For heavy-tailed spans the tail part of the grid is geometric so the
//     mode region keeps resolution.
// Throws std::domain_error when the supports are disjoint.
std::vector<double> evaluation_grid(const Distribution& p, const Distribution& q,
                                    int n = 2001, double tail_mass = 1e-12);

}  // namespace stochorder
