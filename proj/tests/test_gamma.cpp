#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "subcurv/gamma.hpp"

using namespace subcurv;

namespace {

Coordinates xy({"x", "y"});
Coordinates xyz({"x", "y", "z"});

Expression P(const char* s, const Coordinates& c = xy) { return parse_expression(s, c); }
JetForm J(const char* s, const Coordinates& c = xy) { return parse_jetform(s, c); }
JetForm J(const std::string& s, const Coordinates& c = xy) { return parse_jetform(s, c); }

OperatorSpec kolmogorov() {
  return {xy, {{P("1"), P("0")}}, {P("0"), P("x")}};
}

OperatorSpec grushin(int l) {
  Expression xl = Expression::variable(0).pow(l);
  return {xy, {{P("1"), P("0")}, {P("0"), xl}}, {P("0"), P("0")}};
}

OperatorSpec example_c() {
  return {xyz, {{P("1", xyz), P("0", xyz), P("0", xyz)},
                {P("0", xyz), P("x", xyz), P("0", xyz)},
                {P("0", xyz), P("0", xyz), P("y", xyz)}},
          {P("0", xyz), P("0", xyz), P("0", xyz)}};
}

SquareField diag(const std::string& name, std::vector<Expression> d) {
  ExprMatrix m(d.size(), std::vector<Expression>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m[i][i] = d[i];
  return SquareField(name, m);
}

std::string pw(int k) { return std::to_string(k); }

}  // namespace

TEST_CASE("carre_du_champ: Kolmogorov and Grushin") {
  CHECK(carre_du_champ(kolmogorov()).diagonal() == J("f_x^2"));
  for (int l = 1; l <= 3; ++l)
    CHECK(carre_du_champ(grushin(l)).diagonal() == J("f_x^2 + x^" + pw(2 * l) + "*f_y^2"));
  OperatorSpec drift_only{xy, {}, {P("1"), P("0")}};
  CHECK(carre_du_champ(drift_only).is_zero());
}

TEST_CASE("operator well-formedness") {
  OperatorSpec bad{xy, {{P("1")}}, {P("0"), P("0")}};
  CHECK_THROWS_AS(carre_du_champ(bad), GammaError);
  OperatorSpec bad_drift{xy, {{P("1"), P("0")}}, {P("0")}};
  CHECK_THROWS_AS(gamma2(carre_du_champ(kolmogorov()), bad_drift), GammaError);
}

TEST_CASE("square fields must be symmetric") {
  ExprMatrix m{{P("0"), P("1")}, {P("0"), P("0")}};
  CHECK_THROWS_AS(SquareField("literal", m), GammaError);
}

TEST_CASE("gamma2: Kolmogorov") {
  auto op = kolmogorov();
  CHECK(gamma2(carre_du_champ(op), op).form == J("f_xx^2 - f_x*f_y"));
  // The printed Kolmogorov display with f_x*f_xy is not what the operator produces.
  CHECK_FALSE(gamma2(carre_du_champ(op), op).form == J("f_xx^2 - f_x*f_xy"));

  ExprMatrix m1{{P("0"), P("-1/2")}, {P("-1/2"), P("0")}};
  SquareField g1("Gamma1", m1);
  CHECK(gamma2(g1, op).form == J("1/2*f_y^2 - f_xx*f_xy"));

  // both symmetrizations of f_x g_y; neither equals f_xy^2 - f_x*f_yy
  SquareField yy = diag("Gamma2_yy", {P("0"), P("1")});
  CHECK(gamma2(yy, op).form == J("f_xy^2"));
  ExprMatrix ms{{P("0"), P("1/2")}, {P("1/2"), P("0")}};
  SquareField sym("Gamma2_sym", ms);
  CHECK(gamma2(sym, op).form == J("f_xx*f_xy - 1/2*f_y^2"));
  CHECK_FALSE(gamma2(yy, op).form == J("f_xy^2 - f_x*f_yy"));
  CHECK_FALSE(gamma2(sym, op).form == J("f_xy^2 - f_x*f_yy"));
}

TEST_CASE("gamma2: Grushin displays for l = 1..3") {
  for (int l = 1; l <= 3; ++l) {
    auto op = grushin(l);
    std::string g2 = "f_xx^2 + " + pw(l * (2 * l - 1)) + "*x^" + pw(2 * (l - 1)) + "*f_y^2 + x^" +
                     pw(4 * l) + "*f_yy^2 + 2*x^" + pw(2 * l) + "*f_xy^2 + " + pw(4 * l) + "*x^" +
                     pw(2 * l - 1) + "*f_y*f_xy - " + pw(2 * l) + "*x^" + pw(2 * l - 1) +
                     "*f_x*f_yy";
    CHECK(gamma2(carre_du_champ(op), op).form == J(g2));
    for (int i = 1; i <= l; ++i) {
      SquareField gi = diag("Gamma" + pw(i), {P("0"), Expression::variable(0).pow(2 * (l - i))});
      int a = l - i;
      std::string s = pw(a * (2 * a - 1)) + "*x^" + pw(std::max(0, 2 * (a - 1))) + "*f_y^2 + " +
                      pw(4 * a) + "*x^" + pw(std::max(0, 2 * a - 1)) + "*f_y*f_xy + x^" +
                      pw(2 * a) + "*f_xy^2 + x^" + pw(2 * (2 * l - i)) + "*f_yy^2";
      CHECK(gamma2(gi, op).form == J(s));
    }
  }
}

TEST_CASE("gamma2: Example C displays") {
  auto op = example_c();
  CHECK(gamma2(carre_du_champ(op), op).form ==
        J("f_xx^2 + f_y^2 + x^2*f_z^2 + 2*x^2*f_xy^2 + 2*y^2*f_xz^2 + x^4*f_yy^2 + "
          "2*x^2*y^2*f_yz^2 + y^4*f_zz^2 + 4*x*f_y*f_xy + 4*x^2*y*f_z*f_yz - 2*x*f_x*f_yy - "
          "2*x^2*y*f_y*f_zz",
          xyz));
  SquareField g1 = diag("Gamma1", {P("0", xyz), P("1", xyz), P("x^2", xyz)});
  CHECK(gamma2(g1, op).form ==
        J("f_z^2 + f_xy^2 + x^2*f_yy^2 + (y^2 + x^4)*f_yz^2 + x^2*f_xz^2 + x^2*y^2*f_zz^2 + "
          "4*x*f_z*f_xz - 2*y*f_y*f_zz",
          xyz));
  SquareField g2 = diag("Gamma2", {P("0", xyz), P("0", xyz), P("1", xyz)});
  CHECK(gamma2(g2, op).form == J("f_xz^2 + x^2*f_yz^2 + y^2*f_zz^2", xyz));
}

TEST_CASE("commutation verdicts") {
  auto kol = kolmogorov();
  auto g0 = carre_du_champ(kol);
  ExprMatrix m1{{P("0"), P("-1/2")}, {P("-1/2"), P("0")}};
  CHECK(check_commutation(SquareField("G1", m1), g0).commutes);
  CHECK(check_commutation(diag("G2", {P("0"), P("1")}), g0).commutes);

  // Example A with a flat circle fiber: Gamma = f_x^2 + x^2 f_y^2, Gamma1 = f_y^2
  OperatorSpec ex_a{xy, {{P("1"), P("0")}, {P("0"), P("x")}}, {P("-x"), P("0")}};
  CHECK(check_commutation(diag("G1", {P("0"), P("1")}), carre_du_champ(ex_a)).commutes);

  auto c = example_c();
  auto r1 = check_commutation(diag("G1", {P("0", xyz), P("1", xyz), P("x^2", xyz)}),
                              carre_du_champ(c));
  CHECK_FALSE(r1.commutes);
  CHECK_FALSE(r1.residual.is_zero());

  for (int l = 2; l <= 3; ++l) {
    auto r = check_commutation(diag("G1", {P("0"), Expression::variable(0).pow(2 * (l - 1))}),
                               carre_du_champ(grushin(l)));
    CHECK_FALSE(r.commutes);
  }
  // l = 1: Gamma1 = f_y^2 has constant coefficients and commutes.
  CHECK(check_commutation(diag("G1", {P("0"), P("1")}), carre_du_champ(grushin(1))).commutes);
}

TEST_CASE("property: Leibniz rule for square fields") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    ExprMatrix m(2, std::vector<Expression>(2));
    m[0][0] = gen::polynomial(rng, 2, 2);
    m[1][1] = gen::polynomial(rng, 2, 2);
    m[0][1] = m[1][0] = gen::polynomial(rng, 2, 2);
    SquareField sf("rand", m);
    Expression u = gen::polynomial(rng, 2, 3), v = gen::polynomial(rng, 2, 3),
               w = gen::polynomial(rng, 2, 3);
    CHECK(sf.bilinear(u * v, w) == u * sf.bilinear(v, w) + v * sf.bilinear(u, w));
  }
}

TEST_CASE("property: gamma2 agrees with a concrete polynomial oracle") {
  std::mt19937_64 rng(22);
  std::vector<OperatorSpec> ops{kolmogorov(), grushin(1), grushin(2)};
  for (const auto& op : ops) {
    auto sf = carre_du_champ(op);
    auto g2 = gamma2(sf, op).form;
    for (int trial = 0; trial < 30; ++trial) {
      Expression f = gen::polynomial(rng, 2, 4, 8);
      // oracle: 1/2 L Gamma(f) - Gamma(f, Lf) with f instantiated
      Expression oracle = Expression(Rational(1, 2)) * op.apply(sf.bilinear(f, f)) -
                          sf.bilinear(f, op.apply(f));
      auto p = gen::point(rng, 2);
      JetValues jet;
      for (const auto& s : jet_basis(2)) {
        Expression d = f;
        for (std::size_t v = 0; v < 2; ++v)
          for (int k = 0; k < s.count(v); ++k) d = d.differentiate(v);
        jet[s] = d.evaluate(p);
      }
      double a = g2.evaluate(p, jet), b = oracle.evaluate(p);
      CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(b)));
    }
  }
}

TEST_CASE("property: third-order jets cancel for random symmetric fields") {
  // [X_i X_i, d_b] is second order, so symmetric fields never leave order-3 terms.
  std::mt19937_64 rng(23);
  std::vector<OperatorSpec> ops{kolmogorov(), grushin(2)};
  for (const auto& op : ops)
    for (int trial = 0; trial < 20; ++trial) {
      ExprMatrix m(2, std::vector<Expression>(2));
      m[0][0] = gen::polynomial(rng, 2, 2, 3);
      m[1][1] = gen::polynomial(rng, 2, 2, 3);
      m[0][1] = m[1][0] = gen::polynomial(rng, 2, 2, 3);
      auto out = gamma2(SquareField("rand", m), op);
      CHECK(out.form.terms_with_order(3).is_zero());
      CHECK(out.form.max_order() <= 2);
    }
}

TEST_CASE("permuting coordinates permutes forms") {
  auto op = grushin(2);
  std::vector<std::size_t> perm{1, 0};
  auto pop = permuted(op, perm);
  CHECK(pop.coords.name(0) == "y");
  auto g = gamma2(carre_du_champ(pop), pop).form;
  // rename back by parsing the printed form in swapped coordinates
  CHECK(parse_jetform(g.to_string(pop.coords), pop.coords) == g);
  CHECK(J(gamma2(carre_du_champ(op), op).form.to_string(xy)) ==
        parse_jetform(g.to_string(pop.coords), xy));
}
