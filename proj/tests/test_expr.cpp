#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "subcurv/expr.hpp"

using namespace subcurv;

namespace {
const Coordinates xy({"x", "y"});
const Coordinates xyz({"x", "y", "z"});
}  // namespace

TEST_CASE("differentiate: power rule and constants") {
  Expression e = parse_expression("x^2*y", xy);
  CHECK(differentiate(e, xy, "x") == parse_expression("2*x*y", xy));
  CHECK(differentiate(parse_expression("x^2", xy), xy, "y").is_zero());
  CHECK(differentiate(parse_expression("x^4", xy), xy, "x") == parse_expression("4*x^3", xy));
  CHECK_THROWS_AS(differentiate(e, xy, "q"), ExprError);
}

TEST_CASE("canonical form drops zero terms") {
  Expression e = parse_expression("x*y - y*x + 3 - 3", xy);
  CHECK(e.is_zero());
  CHECK(e.terms().empty());
  CHECK(parse_expression("2*x", xy) - parse_expression("x + x", xy) == Expression{});
}

TEST_CASE("parse and print round trip") {
  for (const char* s : {"x^2*y - 3", "3/2*x^2*y - 3", "-x", "x^3 + 1/7*y^2", "0"}) {
    Expression e = parse_expression(s, xy);
    CHECK(parse_expression(e.to_string(xy), xy) == e);
  }
  CHECK(parse_expression("x^2*y - 3", xy).to_string(xy) == "x^2*y - 3");
  CHECK(parse_expression("0.25*x", xy) == parse_expression("1/4*x", xy));
  CHECK(parse_expression("(x+y)^2", xy) == parse_expression("x^2 + 2*x*y + y^2", xy));
}

TEST_CASE("parse errors name the column") {
  CHECK_THROWS_WITH_AS(parse_expression("x +", xy), doctest::Contains("column"), ExprError);
  CHECK_THROWS_AS(parse_expression("x / y", xy), ExprError);
  CHECK_THROWS_AS(parse_expression("x / 0", xy), ExprError);
  CHECK_THROWS_AS(parse_expression("w^2", xy), ExprError);
  CHECK_THROWS_AS(parse_expression("x^-1", xy), ExprError);
  CHECK_THROWS_AS(parse_expression("(x", xy), ExprError);
}

TEST_CASE("coordinate table validation") {
  CHECK_THROWS_AS(Coordinates({"x", "x"}), ExprError);
  CHECK_THROWS_AS(Coordinates({"f"}), ExprError);
  CHECK_THROWS_AS(Coordinates({"xy"}), ExprError);
}

TEST_CASE("exponent overflow is an error") {
  Expression big = Expression::monomial(Monomial::variable(0, 1 << 30), Rational(1));
  CHECK_THROWS_AS(big * big * big, ExprError);
}

TEST_CASE("evaluation") {
  Expression e = parse_expression("x^2*y - 3", xy);
  std::vector<double> p{2.0, 0.5};
  CHECK(e.evaluate(p) == doctest::Approx(-1.0));
  std::vector<Rational> q{Rational(1, 3), Rational(3)};
  CHECK(e.evaluate_exact(q) == Rational(-8, 3));
}

TEST_CASE("property: ring laws hold exactly") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Expression a = gen::polynomial(rng, 3, 4), b = gen::polynomial(rng, 3, 4),
               c = gen::polynomial(rng, 3, 4);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a + b == b + a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * b == b * a);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a - a).is_zero());
  }
}

TEST_CASE("property: mixed partials commute") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    Expression e = gen::polynomial(rng, 3, 6, 8);
    CHECK(e.differentiate(0).differentiate(1) == e.differentiate(1).differentiate(0));
    CHECK(e.differentiate(2).differentiate(1) == e.differentiate(1).differentiate(2));
  }
}

TEST_CASE("property: derivative matches central differences") {
  std::mt19937_64 rng(13);
  const double h = 1e-5;
  for (int trial = 0; trial < 200; ++trial) {
    Expression e = gen::polynomial(rng, 3, 5, 6);
    auto p = gen::point(rng, 3);
    for (std::size_t v = 0; v < 3; ++v) {
      auto pp = p, pm = p;
      pp[v] += h;
      pm[v] -= h;
      double fd = (e.evaluate(pp) - e.evaluate(pm)) / (2 * h);
      double exact = e.differentiate(v).evaluate(p);
      double scale = std::max(1.0, std::abs(exact));
      CHECK(std::abs(fd - exact) / scale <= 1e-8);
    }
  }
}
