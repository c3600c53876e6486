#include <doctest.h>

#include <cmath>

#include "stochorder/distribution.hpp"
#include "stochorder/errors.hpp"
#include "stochorder/numerics.hpp"

using namespace stochorder;
using doctest::Approx;

namespace {

Distribution exp_rate(double r) { return build(FamilySpec{ExponentialSpec{r}}); }

PiecewiseSpec panel_c_spec() {
  PiecewiseSpec pw;
  pw.pieces.push_back({0.0, 1.0, "exp(-x)"});
  pw.pieces.push_back({1.0, 2.0, "(1 + c*(x-1)*(2-x))*exp(-x)"});
  pw.pieces.push_back({2.0, 3.0, "exp(-x)"});
  pw.pieces.push_back(
      {3.0, std::numeric_limits<double>::infinity(), "exp(3 - 2*x)"});
  return pw;
}

}  // namespace

TEST_SUITE("distributions") {

TEST_CASE("exponential with rate 1/2 has density e^{-x/2}/2") {
  const Distribution d = exp_rate(0.5);
  CHECK(d.density(0.0) == Approx(0.5));
  CHECK(d.density(2.0) == Approx(0.5 * std::exp(-1.0)));
  CHECK(d.density(-1.0) == 0.0);
  CHECK(d.support().left == 0.0);
}

TEST_CASE("half-Student density at zero") {
  // nu = 1 gives the half-Cauchy value 2/pi.
  const Distribution d = build(FamilySpec{HalfStudentSpec{1.0}});
  CHECK(d.density(0.0) == Approx(2.0 / M_PI).epsilon(1e-12));
}

TEST_CASE("half-Student mode value increases with nu") {
  double prev = 0.0;
  for (double nu : {0.5, 1.0, 2.0, 5.0, 10.0, 50.0}) {
    const double f0 = build(FamilySpec{HalfStudentSpec{nu}}).density(0.0);
    CHECK(f0 > prev);
    prev = f0;
  }
}

TEST_CASE("zero-inflated Poisson mass at zero") {
  const double pi = 0.3, lambda = 1.7;
  const Distribution d = build(FamilySpec{ZeroInflatedPoissonSpec{pi, lambda}});
  CHECK(d.density(0.0) ==
        Approx(pi + (1.0 - pi) * std::exp(-lambda)).epsilon(1e-13));
  CHECK(d.density(3.0) ==
        Approx((1.0 - pi) * std::exp(-lambda) * std::pow(lambda, 3.0) / 6.0)
            .epsilon(1e-12));
}

TEST_CASE("survival closed forms") {
  CHECK(exp_rate(1.0).survival(1.0) == Approx(std::exp(-1.0)).epsilon(1e-12));
  const Distribution pois = build(FamilySpec{PoissonSpec{2.0}});
  CHECK(pois.survival(0.0) == 1.0);  // full mass
  // Erlang-2 survival (1+x) e^-x
  const Distribution g21 = build(FamilySpec{GammaSpec{2.0, 1.0}});
  CHECK(g21.survival(1.0) == Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("survival conventions outside the support") {
  const Distribution u = build(FamilySpec{UniformSpec{0.0, 1.0}});
  CHECK(u.survival(-3.0) == 1.0);
  CHECK(u.survival(2.0) == 0.0);
}

TEST_CASE("quantiles by bisection match closed forms") {
  CHECK(exp_rate(1.0).quantile(1.0 - std::exp(-1.0)) ==
        Approx(1.0).epsilon(1e-10));
  CHECK(build(FamilySpec{UniformSpec{0.0, 1.0}}).quantile(0.25) ==
        Approx(0.25).epsilon(1e-10));
  // Poisson(1): cumulative sums e^-1 (1, 2, 2.5)/1! -> cdf(1) ~ .7358 < .9,
  // cdf(2) ~ .9197 >= .9, so the 0.9-quantile is 2.
  CHECK(build(FamilySpec{PoissonSpec{1.0}}).quantile(0.9) == 2.0);
}

TEST_CASE("parameter domain errors") {
  CHECK_THROWS_AS(build(FamilySpec{GammaSpec{0.0, 1.0}}), std::domain_error);
  CHECK_THROWS_AS(build(FamilySpec{GammaSpec{1.0, -2.0}}), std::domain_error);
  CHECK_THROWS_AS(build(FamilySpec{ExponentialSpec{0.0}}), std::domain_error);
  CHECK_THROWS_AS(build(FamilySpec{UniformSpec{1.0, 1.0}}), std::domain_error);
  CHECK_THROWS_AS(build(FamilySpec{ZeroInflatedPoissonSpec{1.0, 1.0}}),
                  std::domain_error);
  CHECK_THROWS_AS(build(FamilySpec{HalfStudentSpec{-1.0}}), std::domain_error);
}

TEST_CASE("negative piecewise density is rejected") {
  PiecewiseSpec pw;
  pw.pieces.push_back({0.0, 1.0, "x - 1/2"});
  CHECK_THROWS_AS(build(FamilySpec{pw}), std::domain_error);
}

TEST_CASE("piecewise pieces must be contiguous") {
  PiecewiseSpec pw;
  pw.pieces.push_back({0.0, 1.0, "1"});
  pw.pieces.push_back({1.5, 2.0, "1"});
  CHECK_THROWS_AS(build(FamilySpec{pw}), std::domain_error);
}

TEST_CASE("panel-C free constant solves the implicit normalization") {
  const Distribution d = build(FamilySpec{panel_c_spec()});
  // c * integral_1^2 (x-1)(2-x)e^-x dx must equal e^-3 (1 - 1/mu), mu = 2.
  const double bump = numerics::integrate(
      [](double x) { return (x - 1.0) * (2.0 - x) * std::exp(-x); }, 1.0, 2.0);
  CHECK(d.solved_constant() == Approx(std::exp(-3.0) * 0.5 / bump).epsilon(1e-8));
  CHECK(d.solved_constant() > 0.0);
  // No global rescaling: the first piece must remain e^-x exactly.
  CHECK(d.normalization_factor() == Approx(1.0).epsilon(1e-10));
  CHECK(d.density(0.5) == Approx(std::exp(-0.5)).epsilon(1e-10));
  // Breakpoint evaluation uses the right-hand piece.
  CHECK(d.density(3.0) == Approx(std::exp(-3.0)).epsilon(1e-10));
  CHECK(d.breakpoints() == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("tabulated pmf renormalizes and pins the extremes") {
  const Distribution d = build(FamilySpec{TabulatedSpec{0, 2, {1.0, 1.0, 2.0}}});
  CHECK(d.density(0.0) == Approx(0.25));
  CHECK(d.density(2.0) == Approx(0.5));
  CHECK(d.survival(0.0) == 1.0);
  CHECK(d.cdf(2.0) == 1.0);
  CHECK(d.survival(2.0) == Approx(0.5));
}

TEST_CASE("mass conservation across families") {
  // build() already audits |mass - 1| <= 1e-8 by quadrature/summation;
  // constructing these without throwing is the check.
  CHECK_NOTHROW(build(FamilySpec{GammaSpec{3.5, 2.0}}));
  CHECK_NOTHROW(build(FamilySpec{HalfNormalSpec{1.0}}));
  CHECK_NOTHROW(build(FamilySpec{HalfStudentSpec{0.5}}));
  CHECK_NOTHROW(build(FamilySpec{FoldedNormalSpec{1.0, 0.6}}));
  CHECK_NOTHROW(build(FamilySpec{PoissonSpec{3.0}}));
  CHECK_NOTHROW(build(FamilySpec{panel_c_spec()}));
}

TEST_CASE("cdf/survival consistency") {
  const Distribution pois = build(FamilySpec{PoissonSpec{1.3}});
  for (double k = 0.0; k <= 12.0; k += 1.0) {
    // cdf(k) + survival(k) - pmf(k) = 1 at integer points
    CHECK(pois.cdf(k) + pois.survival(k) - pois.density(k) ==
          Approx(1.0).epsilon(1e-10));
  }
  const Distribution hs = build(FamilySpec{HalfStudentSpec{2.0}});
  for (double x : {0.1, 0.9, 3.0, 20.0}) {
    CHECK(hs.cdf(x) + hs.survival(x) == Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("evaluation grid: two uniforms give the exact lattice") {
  const Distribution a = build(FamilySpec{UniformSpec{0.0, 1.0}});
  const Distribution b = build(FamilySpec{UniformSpec{0.0, 1.0}});
  const auto grid = evaluation_grid(a, b, 5);
  REQUIRE(grid.size() == 5);
  CHECK(grid == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("evaluation grid: discrete truncation at joint negligible tails") {
  const Distribution p = build(FamilySpec{PoissonSpec{1.0}});
  const Distribution q = build(FamilySpec{ZeroInflatedPoissonSpec{0.5, 1.0}});
  const auto grid = evaluation_grid(p, q, 2, 1e-12);
  REQUIRE(grid.size() >= 2);
  CHECK(grid.front() == 0.0);
  // K is the first k with both survivals below the cutoff...
  const double K = grid.back();
  CHECK(p.survival(K) < 1e-12);
  CHECK(q.survival(K) < 1e-12);
  // ...and the previous point still carries mass in one of them.
  CHECK((p.survival(K - 1.0) >= 1e-12 || q.survival(K - 1.0) >= 1e-12));
}

TEST_CASE("evaluation grid: piecewise breakpoints are mandatory points") {
  const Distribution p = build(FamilySpec{panel_c_spec()});
  const Distribution q = exp_rate(1.0);
  const auto grid = evaluation_grid(p, q, 2001);
  for (double bp : {1.0, 2.0, 3.0}) {
    CHECK(std::find(grid.begin(), grid.end(), bp) != grid.end());
  }
}

TEST_CASE("evaluation grid: survival is nonincreasing along any grid") {
  const Distribution p = build(FamilySpec{GammaSpec{2.0, 1.0}});
  const Distribution q = build(FamilySpec{GammaSpec{1.0, 1.0}});
  const auto grid = evaluation_grid(p, q, 301);
  for (const auto* d : {&p, &q}) {
    double prev = 2.0;
    for (double x : grid) {
      const double s = d->survival(x);
      CHECK(s <= prev + 1e-12);
      prev = s;
    }
  }
}

TEST_CASE("evaluation grid: disjoint supports are an error") {
  const Distribution a = build(FamilySpec{UniformSpec{0.0, 1.0}});
  const Distribution b = build(FamilySpec{UniformSpec{2.0, 3.0}});
  CHECK_THROWS_AS(evaluation_grid(a, b, 64), std::domain_error);
  const Distribution c = build(FamilySpec{PoissonSpec{1.0}});
  CHECK_THROWS_AS(evaluation_grid(a, c, 64), std::domain_error);
}

TEST_CASE("heavy-tailed spans keep body resolution") {
  const Distribution p = build(FamilySpec{HalfStudentSpec{4.0}});
  const Distribution q = build(FamilySpec{HalfStudentSpec{0.5}});
  const auto grid = evaluation_grid(p, q, 2001, 1e-12);
  // The truncation point is astronomically far out...
  CHECK(grid.back() > 1e20);
  // ...but the mode region around x = 1 must still be resolved.
  std::size_t below_ten = 0;
  for (double x : grid)
    if (x <= 10.0) ++below_ten;
  CHECK(below_ten > 200);
  CHECK(q.survival(grid.back()) <= 1e-11);
}

}  // TEST_SUITE
