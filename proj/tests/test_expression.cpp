#include <doctest.h>

#include <cmath>

#include "stochorder/errors.hpp"
#include "stochorder/expression.hpp"

using namespace stochorder;
using doctest::Approx;

TEST_SUITE("expression") {

TEST_CASE("polynomials, precedence and unary minus") {
  const auto e = expr::parse("1 + 2*x - x^2");
  CHECK(e.eval(0.0) == 1.0);
  CHECK(e.eval(3.0) == Approx(1.0 + 6.0 - 9.0));
  CHECK(expr::parse("-x^2").eval(2.0) == -4.0);  // -(x^2)
  CHECK(expr::parse("(0-x)^2").eval(2.0) == 4.0);
  CHECK(expr::parse("2*3 + 4").eval(0.0) == 10.0);
  CHECK(expr::parse("2*(3 + 4)").eval(0.0) == 14.0);
}

TEST_CASE("exp composition and division") {
  CHECK(expr::parse("exp(-x)").eval(1.0) == Approx(std::exp(-1.0)));
  CHECK(expr::parse("exp(3 - 2*x)").eval(3.0) == Approx(std::exp(-3.0)));
  CHECK(expr::parse("1/3 + x/6").eval(1.0) == Approx(0.5));
  CHECK(expr::parse("exp(x)^2").eval(1.0) == Approx(std::exp(2.0)));
}

TEST_CASE("negative integer exponents") {
  CHECK(expr::parse("x^-2").eval(2.0) == Approx(0.25));
}

TEST_CASE("the free constant c") {
  const auto e = expr::parse("(1 + c*(x-1)*(2-x))*exp(-x)");
  CHECK(e.uses_constant());
  CHECK(e.eval(1.5, 0.0) == Approx(std::exp(-1.5)));
  CHECK(e.eval(1.5, 4.0) == Approx(2.0 * std::exp(-1.5)));
  CHECK_FALSE(expr::parse("1 + x").uses_constant());
}

TEST_CASE("parse errors carry a column position") {
  CHECK_THROWS_WITH_AS(expr::parse("1 + * 2"), doctest::Contains("column 5"),
                       InputError);
  CHECK_THROWS_AS(expr::parse("exp(1"), InputError);
  CHECK_THROWS_AS(expr::parse("x^1.5"), InputError);   // integer powers only
  CHECK_THROWS_AS(expr::parse("sin(x)"), InputError);  // no function library
  CHECK_THROWS_AS(expr::parse("1 + y"), InputError);
  CHECK_THROWS_AS(expr::parse(""), InputError);
  CHECK_THROWS_AS(expr::parse("1 2"), InputError);
}

TEST_CASE("whitespace is insignificant") {
  CHECK(expr::parse("  1+ x * 2 ").eval(3.0) == expr::parse("1+x*2").eval(3.0));
}

}  // TEST_SUITE
