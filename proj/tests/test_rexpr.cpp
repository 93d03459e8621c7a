#include <doctest.h>

#include <cmath>
#include <random>

#include "subcurv/families.hpp"
#include "subcurv/rexpr.hpp"

using namespace subcurv;

TEST_CASE("rate expressions evaluate") {
  std::vector<double> r{2.0, 8.0};
  CHECK(RExpression::parse("r1^2/r2", 2)(r) == doctest::Approx(0.5));
  CHECK(RExpression::parse("min(r1, r2) - max(1, r1)", 2)(r) == doctest::Approx(0.0));
  CHECK(RExpression::parse("sqrt(r2) * 2", 2)(r) == doctest::Approx(std::sqrt(8.0) * 2));
  CHECK(RExpression::parse("-(5/r1 + 2*r1/r2)", 2)(r) == doctest::Approx(-3.0));
  std::vector<double> one{4.0};
  CHECK(RExpression::parse("1 - 2/r", 1)(one) == doctest::Approx(0.5));
  CHECK(RExpression(2.5)(one) == 2.5);
}

TEST_CASE("rate expressions reject bad input") {
  CHECK_THROWS_AS(RExpression::parse("r3", 2), RExprError);
  CHECK_THROWS_AS(RExpression::parse("r1 +", 1), RExprError);
  CHECK_THROWS_AS(RExpression::parse("foo(r1)", 1), RExprError);
  CHECK_THROWS_AS(RExpression::parse("r", 2), RExprError);
  CHECK_THROWS_AS(RExpression::parse("(r1", 1), RExprError);
}

TEST_CASE("text round trip keeps the value") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 10);
  for (const char* s : {"r1^3/r2^2 - 7/3", "min(r1 - 1/r1, 2*r2 - r1 - 4/r1)", "-(r1)^2 + r2/2"}) {
    auto e = RExpression::parse(s, 2);
    auto back = RExpression::parse(e.text(), 2);
    for (int k = 0; k < 20; ++k) {
      std::vector<double> r{u(rng), u(rng)};
      CHECK(back(r) == e(r));
    }
  }
}

TEST_CASE("shift adds a constant") {
  auto e = RExpression::parse("r1*r2", 2);
  std::vector<double> r{3, 4};
  CHECK(e.shifted(1.5)(r) == doctest::Approx(13.5));
  CHECK(e.shifted(-1)(r) == doctest::Approx(11));
}

TEST_CASE("format_number round trips") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 200; ++k) {
    double v = u(rng) / (1 + k);
    CHECK(std::stod(format_number(v).substr(format_number(v)[0] == '(' ? 1 : 0)) == v);
  }
  CHECK(format_number(77) == "77");
}

TEST_CASE("Omega membership") {
  auto k = k_family_kolmogorov();
  std::vector<double> in{2, 1}, edge{2, 1 + 1e-14}, out{2.0, 0.99}, neg{-1, 1};
  CHECK(k.contains(in));
  CHECK(k.contains(edge));
  CHECK_FALSE(k.contains(out));
  CHECK_FALSE(k.contains(neg));
  CHECK(k.omega_text().find("<=") != std::string::npos);
}

TEST_CASE("built-in families") {
  std::vector<double> r{2.0};
  auto k13 = k_family_13(1.0, 2.0, 3.0);
  CHECK(k13.evaluate(r) == std::vector<double>{1.0 - 1.5, 2.0});
  auto ea = k_family_example_a(1.0, 2.0, 1.0);
  // min(r0 - m/r, K r - r0 - 4/r) at r = 2: min(0, -1)
  CHECK(ea.K[0](r) == doctest::Approx(-1.0));
  auto c = k_family_example_c();
  std::vector<double> r2{1.0, 2.0};
  CHECK(c.K[0](r2) == doctest::Approx(-(5.0 + 1.0)));
  CHECK(c.K[1](r2) == doctest::Approx(1 - 2.0));
  CHECK(c.K[2](r2) == doctest::Approx(1.0));
  auto g = k_family_grushin(2, 3.0, 0.5);
  std::vector<double> rg{2.0, 4.0};
  // -alpha (r0^2/r1 + r1^3/r2^2), K_1 = beta, K_2 = beta r1
  CHECK(g.K[0](rg) == doctest::Approx(-3.0 * (1.0 / 2 + 8.0 / 16)));
  CHECK(g.K[1](rg) == doctest::Approx(0.5));
  CHECK(g.K[2](rg) == doctest::Approx(1.0));
  auto gs = k_family_grushin(2, 3.0, 0.5, true);
  CHECK(gs.K[0](rg) == doctest::Approx(-3.0 * (1.0 / 2 + 2.0 / 16)));
  CHECK(k_family_kolmogorov(true).K[1](rg) == doctest::Approx(5.0));
}
