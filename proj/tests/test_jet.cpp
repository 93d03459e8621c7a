#include <doctest.h>

#include "subcurv/jet.hpp"

using namespace subcurv;

namespace {
const Coordinates xy({"x", "y"});

JetValues jet(std::initializer_list<std::pair<const char*, double>> vals) {
  JetValues j;
  for (auto& [n, v] : vals) j[JetSymbol::parse(n, xy)] = v;
  return j;
}
}  // namespace

TEST_CASE("mixed partials share one symbol") {
  CHECK(JetSymbol::parse("f_xy", xy) == JetSymbol::parse("f_yx", xy));
  CHECK(JetSymbol::second(0, 1) == JetSymbol::second(1, 0));
  CHECK(JetSymbol::parse("f_xyy", xy).order() == 3);
  CHECK_THROWS_AS(JetSymbol::parse("f_xxxx", xy), ExprError);
  CHECK_THROWS_AS(JetSymbol::parse("g_x", xy), ExprError);
}

TEST_CASE("apply_field derivation rule") {
  JetForm fx2 = parse_jetform("f_x^2", xy);
  FieldVector dx{Expression(1L), Expression()};
  CHECK(apply_field(dx, fx2) == parse_jetform("2*f_x*f_xx", xy));
  FieldVector kol{Expression(), Expression::variable(0)};
  CHECK(apply_field(kol, fx2) == parse_jetform("2*x*f_x*f_xy", xy));
  CHECK(apply_field(dx, JetForm(Expression(1L))).is_zero());
}

TEST_CASE("apply_field refuses to exceed order 3") {
  FieldVector dx{Expression(1L), Expression()};
  CHECK_THROWS_AS(apply_field(dx, parse_jetform("f_xxy", xy)), ExprError);
}

TEST_CASE("eval_jetform") {
  CHECK(eval_jetform(parse_jetform("f_xx^2 - f_x*f_y", xy), std::vector<double>{0, 0},
                     jet({{"f_x", 1}, {"f_y", 1}, {"f_xx", 2}})) == doctest::Approx(3));
  CHECK(eval_jetform(parse_jetform("x^2*f_y^2", xy), std::vector<double>{3, 0},
                     jet({{"f_y", 2}})) == doctest::Approx(36));
  CHECK_THROWS_AS(eval_jetform(parse_jetform("f_x*f_y", xy), std::vector<double>{0, 0},
                               jet({{"f_x", 1}})),
                  ExprError);
}

TEST_CASE("print in subscript notation") {
  JetForm q = parse_jetform("f_xx^2 - f_x*f_y + 2*x*f_xy^2", xy);
  CHECK(parse_jetform(q.to_string(xy), xy) == q);
  CHECK(parse_jetform("f_yx", xy).to_string(xy) == "f_xy");
}

TEST_CASE("jet basis ordering") {
  auto b = jet_basis(2);
  REQUIRE(b.size() == 5);
  CHECK(b[0].name(xy) == "f_x");
  CHECK(b[1].name(xy) == "f_y");
  CHECK(b[2].name(xy) == "f_xx");
  CHECK(b[3].name(xy) == "f_xy");
  CHECK(b[4].name(xy) == "f_yy");
}

TEST_CASE("total derivative commutes on jet forms") {
  JetForm q = parse_jetform("x*y*f_x^2 + y^2*f_x*f_y", xy);
  CHECK(q.total_derivative(0).total_derivative(1) == q.total_derivative(1).total_derivative(0));
}
