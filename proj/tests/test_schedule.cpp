#include <doctest.h>

#include <cmath>
#include <random>

#include "subcurv/catalog.hpp"
#include "subcurv/families.hpp"
#include "subcurv/schedule.hpp"

using namespace subcurv;

TEST_CASE("example C power schedule: c_b = 77 and the printed b(0)") {
  for (double t : {0.5, 1.0, 3.0}) {
    const auto s = make_schedule_powers(PowerKind::kExampleC, {}, t);
    CHECK(s.omega_ok);
    CHECK(s.positive);
    CHECK(std::abs(s.cb.value - 77.0) <= 1e-9);
    CHECK(s.cb.lower <= s.cb.value);
    CHECK(s.cb.value <= s.cb.upper);
    CHECK(s.b(0, 0) == doctest::Approx(t));
    CHECK(s.b(1, 0) == doctest::Approx(t * t / 7));
    CHECK(s.b(2, 0) == doctest::Approx(2 * t * t * t / 21));
    for (double r : s.residual_min) CHECK(r >= -1e-9);
  }
}

TEST_CASE("classical schedule: c_b = 1 when kappa = 0") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 2.0), p(0.2, 3.0);
  for (int n = 0; n < 10; ++n) {
    const double rho1 = u(rng), rho2 = p(rng), t = p(rng);
    const auto s = make_schedule_two_rate(rho1, rho2, 0.0, t);
    CHECK(s.cb.value == doctest::Approx(1.0).epsilon(1e-9));
    for (double r : s.residual_min) CHECK(r >= -1e-9 * (1 + s.residual_max_abs[0]));
  }
}

TEST_CASE("lambda for K_0 = rho1 - kappa/r, K_1 = rho2") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> p(0.1, 5.0), q(0.0, 5.0);
  for (int n = 0; n < 20; ++n) {
    const double rho1 = p(rng), rho2 = p(rng), kappa = q(rng);
    const auto rr = compute_lambda(k_family_13(rho1, rho2, kappa));
    CHECK(std::abs(rr.lambda - rho1 * rho2 / (rho2 + kappa)) <= 1e-6);
    CHECK(rr.positive);
    CHECK(lambda_at(k_family_13(rho1, rho2, kappa), rr.r_star) == doctest::Approx(rr.lambda));
  }
}

TEST_CASE("lambda for the flat-fiber product model") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> k(0.05, 5.0), r0(0.1, 3.0), m(1.1, 6.0);
  for (int n = 0; n < 20; ++n) {
    const double K = k(rng), R = r0(rng), M = m(rng);
    const double expect = std::min(2 * K / (R + std::sqrt(R * R + 20 * K)), R / (M + 1));
    CHECK(std::abs(compute_lambda(k_family_example_a(K, M, R)).lambda - expect) <= 1e-6);
  }
  const auto zero = compute_lambda(k_family_example_a(0.0, 2.0, 1.0));
  CHECK(zero.lambda <= 0);
  CHECK_FALSE(zero.positive);
}

TEST_CASE("example A power schedule") {
  PowerParams p;
  p.K = 0;
  p.m = 2;
  p.r0 = 1;
  CHECK(make_schedule_powers(PowerKind::kExampleA, p, 1.0).cb.value == doctest::Approx(11.0).epsilon(1e-9));
}

TEST_CASE("Grushin power schedule c_b in closed form") {
  for (int l = 1; l <= 3; ++l) {
    const auto k = grushin_constants(l);
    PowerParams p;
    p.l = l;
    p.alpha = k.alpha;
    p.beta = k.beta;
    const auto c = grushin_coefficients(l, k.beta);
    double sum = 0.0;
    for (int i = 1; i <= l; ++i) sum += std::pow(c[i - 1], i + 1) / std::pow(c[i], i);
    for (double t : {0.5, 1.0, 2.0}) {
      const auto s = make_schedule_powers(PowerKind::kGrushin, p, t);
      const double expect = (2 * l - 1 + 2 * k.alpha * sum) * std::pow(t, 2 * l - 2);
      CHECK(s.cb.value == doctest::Approx(expect).epsilon(1e-9));
      CHECK(s.omega_ok);
      for (double r : s.residual_min) CHECK(r >= -1e-8 * (1 + s.residual_max_abs[0]));
    }
  }
}

TEST_CASE("Kolmogorov ODE with the printed rates") {
  const auto k = k_family_kolmogorov(true);
  for (double t : {0.25, 0.5, 1.0}) {
    const auto s = solve_schedule_ode(k, t);
    for (int j = 0; j <= 20; ++j) {
      const double at = t * j / 20.0, u = t - at;
      CHECK(std::abs(s.b(2, at) - (std::sinh(std::sqrt(2.0) * u) / std::sqrt(2.0) - u)) <= 1e-8);
      CHECK(std::abs(s.b(1, at) - (std::cosh(std::sqrt(2.0) * u) - 1)) <= 1e-8);
    }
  }
}

TEST_CASE("ODE step halving converges") {
  const auto k = k_family_kolmogorov(true);
  const double t = 1.0;
  const double exact = std::sinh(std::sqrt(2.0) * t) / std::sqrt(2.0) - t;
  double prev = 0.0;
  for (std::size_t steps : {16u, 32u, 64u}) {
    OdeOptions o;
    o.steps = steps;
    const double err = std::abs(solve_schedule_ode(k, t, o).b(2, 0.0) - exact);
    if (prev > 0) CHECK(err < prev / 8);  // fourth order
    prev = err;
  }
}

TEST_CASE("ODE trajectory leaving Omega is rejected with its exit time") {
  KFamily k;
  k.ell = 1;
  k.K = {RExpression(0.0), RExpression(-1.0)};
  try {
    (void)solve_schedule_ode(k, 1.0);
    FAIL("expected rejection");
  } catch (const ScheduleRejected& e) {
    CHECK(e.exit_s >= 0.0);
    CHECK(e.exit_s <= 1.0);
  }
}

TEST_CASE("c_b diverges when K_0 blows up faster than b_0 vanishes") {
  KFamily k;
  k.ell = 1;
  k.K = {RExpression::parse("-1/r^2", 1), RExpression(1.0)};
  const auto s = solve_schedule_ode(k, 1.0);
  CHECK(s.cb.divergent);
  CHECK(std::isinf(s.cb.value));
}

TEST_CASE("t_theta for the Kolmogorov schedule") {
  const auto th = find_t_theta(1.9, k_family_kolmogorov(true));
  CHECK(std::abs(th.residual) <= 1e-10);
  CHECK(th.monotone);
  CHECK(th.feasible_lo == doctest::Approx(std::sqrt(3.0)).epsilon(1e-6));
  CHECK(th.feasible_hi == doctest::Approx(2.0).epsilon(1e-6));
  // b_2(0) >= t^3/3 on (0, t_theta]
  const auto k = k_family_kolmogorov(true);
  for (int j = 1; j <= 10; ++j) {
    const double t = th.t_theta * j / 10.0;
    CHECK(solve_schedule_ode(k, t).b(2, 0.0) >= t * t * t / 3);
  }
  CHECK_THROWS_AS((void)find_t_theta(1.6, k), ScheduleError);
}

TEST_CASE("Harnack exponent matches the closed form for gamma = c/(4 delta)") {
  for (double alpha : {1.5, 2.0, 4.0})
    for (double rho : {0.3, 1.0, 2.5}) {
      const double c = 3.0;
      const double v = harnack_exponent([c](double d) { return c / (4 * d); }, rho, alpha);
      CHECK(v == doctest::Approx(alpha * c * rho * rho / (4 * (alpha - 1))).epsilon(1e-10));
    }
}

TEST_CASE("negative rho1 classical schedule constant") {
  // c_b against a brute-force supremum of -(b_0' + 2 b_0 K_0) on a fine grid
  const auto s = make_schedule_two_rate(-0.5, 1.0, 0.4, 2.0);
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<double> grid;
  for (int j = 1; j < 200000; ++j) grid.push_back(2.0 * j / 200000.0);
  for (int e = 5; e <= 9; ++e) grid.push_back(2.0 - 2.0 * std::pow(10.0, -e));  // the supremum is a limit at s = t
  for (double at : grid) {
    worst = std::max(worst, -(s.db(0, at) + 2 * s.b(0, at) * s.k.K[0](s.ratios(at))));
  }
  CHECK(s.cb.value >= worst - 1e-9);
  CHECK(s.cb.value <= worst + 1e-6);
}
