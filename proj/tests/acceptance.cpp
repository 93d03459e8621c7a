// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is nonzero when a criterion fails that is not a recorded deviation.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "subcurv/catalog.hpp"
#include "subcurv/cli.hpp"
#include "subcurv/families.hpp"

using namespace subcurv;

namespace {

constexpr double kCbTol = 1e-9;
constexpr double kLambdaTol = 1e-6;
constexpr double kPsdTol = 1e-8;
constexpr double kBoundaryTol = 1e-10;
constexpr double kBoundaryStep = 1e-3;
constexpr double kSeTimes = 4.0;
constexpr std::size_t kOraclePaths = 200000;
constexpr std::size_t kOracleSteps = 2048;
constexpr double kSharpTol = 0.05;
constexpr double kOdeTol = 1e-8;
constexpr double kThetaResidual = 1e-10;

// Criteria that fail for a documented reason (see the decisions ledger).
const std::set<int> kRecordedDeviations{4};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
};

std::string g(double v) {
  char b[48];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

JetForm engine(const CatalogEntry& e, std::size_t i) {
  return gamma2(i == 0 ? carre_du_champ(e.spec.op) : e.spec.aux[i - 1], e.spec.op).form;
}

void symbolic(Outcome& o) {
  const auto k = get("kolmogorov");
  const auto& c = k.spec.op.coords;
  bool ok = carre_du_champ(k.spec.op).diagonal() == parse_jetform("f_x^2", c) &&
            engine(k, 0) == parse_jetform("f_xx^2 - f_x*f_y", c) &&
            engine(k, 1) == parse_jetform("1/2*f_y^2 - f_xx*f_xy", c);
  std::size_t displays = 0, conflicts = 0;
  std::vector<CatalogEntry> entries{k, get("exampleC")};
  for (int l = 1; l <= 3; ++l) entries.push_back(get("grushin", l));
  for (const auto& e : entries)
    for (const auto& d : e.displays) {
      const bool match = engine(e, d.index) == parse_jetform(d.text, e.spec.op.coords);
      ok = ok && match == d.expected_match;
      ++displays;
      if (!d.expected_match) ++conflicts;
    }
  o.pass = ok;
  o.detail << displays << " displays checked exactly, " << conflicts
           << " printed Kolmogorov displays differ from the engine as recorded";
}

void constants(Outcome& o) {
  const double cb = make_schedule_powers(PowerKind::kExampleC, {}, 1.0).cb.value;
  bool ok = std::abs(cb - 77.0) <= kCbTol;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> p(0.1, 5.0), q(0.0, 5.0), m(1.1, 6.0);
  double worst13 = 0, worstA = 0;
  for (int n = 0; n < 20; ++n) {
    const double r1 = p(rng), r2 = p(rng), kap = q(rng);
    worst13 = std::max(worst13, std::abs(compute_lambda(k_family_13(r1, r2, kap)).lambda - r1 * r2 / (r2 + kap)));
  }
  for (int n = 0; n < 20; ++n) {
    const double K = p(rng), r0 = p(rng), mm = m(rng);
    const double expect = std::min(2 * K / (r0 + std::sqrt(r0 * r0 + 20 * K)), r0 / (mm + 1));
    worstA = std::max(worstA, std::abs(compute_lambda(k_family_example_a(K, mm, r0)).lambda - expect));
  }
  ok = ok && worst13 <= kLambdaTol && worstA <= kLambdaTol;
  o.pass = ok;
  o.detail << "c_b = " << g(cb) << ", max lambda error " << g(worst13) << " and " << g(worstA) << " over 20 draws each";
}

void psd(Outcome& o) {
  const auto c = psd_sweep(get("exampleC").spec);
  bool ok = c.global_min >= -kPsdTol && c.pass;
  const auto ks = get("kolmogorov").spec;
  const auto prep = PreparedSpec::build(ks);
  KFamily open = ks.k;
  open.omega.clear();
  double edge = 0, past = -1e300;
  for (double r1 : {0.05, 0.5, 1.0, 2.0, 10.0, 50.0}) {
    for (const std::vector<double>& x : {std::vector<double>{0, 0}, std::vector<double>{2.5, -3}}) {
      std::vector<double> rb{r1, r1 * r1 / 4}, ro{r1, r1 * r1 / (4 * (1 + kBoundaryStep))};
      edge = std::max(edge, std::abs(min_eigenvalue(prep, ks.k, x, rb)));
      past = std::max(past, min_eigenvalue(prep, open, x, ro));
    }
  }
  ok = ok && edge <= kBoundaryTol && past < 0;
  o.detail << "example C min " << g(c.global_min) << "; Kolmogorov boundary |min eig| <= " << g(edge)
           << ", outside max " << g(past) << "; Grushin";
  for (int l = 1; l <= 3; ++l) {
    const auto e = get("grushin", l);
    const auto r = psd_sweep(e.spec);
    ok = ok && r.pass;
    o.detail << " l=" << l << " (" << format_number(e.alpha) << ", " << format_number(e.beta) << ") "
             << (r.pass ? "PASS" : "FAIL");
  }
  o.pass = ok;
}

void commutation(Outcome& o) {
  const bool ka = get("kolmogorov").context().commutes;
  const bool ea = get("exampleA").context().commutes;
  const bool ec = get("exampleC").context().commutes;
  bool ok = ka && ea && !ec;
  o.detail << "kolmogorov " << ka << ", exampleA " << ea << ", exampleC " << ec;
  for (int l = 1; l <= 3; ++l) {
    const bool gl = get("grushin", l).context().commutes;
    ok = ok && !gl;
    o.detail << ", grushin l=" << l << ' ' << gl;
  }
  o.detail << " (1 = holds); for l = 1 the auxiliary field f_y^2 commutes exactly";
  o.pass = ok;
}

void kolmogorov_oracle(Outcome& o) {
  const auto e = get("kolmogorov");
  SdeModel m(e.spec.op);
  MCConfig cfg;
  cfg.paths = kOraclePaths;
  cfg.steps = kOracleSteps;
  cfg.seed = 5;
  bool ok = true;
  double worst = 0;
  const std::vector<double> z0{0.5, -0.5};
  for (double t : {0.25, 1.0, 4.0}) {
    const auto law = kolmogorov_law(z0, t);
    const auto end = m.simulate({z0}, t, cfg).front();
    for (int a = 0; a < 2; ++a)
      for (int b = a; b < 2; ++b) {
        const auto est = mc_mean(end, [&, a, b](std::span<const double> z) {
          return (z[a] - law.mean[a]) * (z[b] - law.mean[b]);
        });
        const double zs = std::abs(est.mean - law.cov[a][b]) / est.se;
        worst = std::max(worst, zs);
        ok = ok && zs <= kSeTimes;
      }
    for (const auto& f : e.battery) {
      const auto est = mc_mean(end, f.value);
      const double zs = std::abs(est.mean - semigroup_exact("kolmogorov", Method::kGaussQuadrature, f.value, z0, t)) / est.se;
      worst = std::max(worst, zs);
      ok = ok && zs <= kSeTimes;
    }
  }
  o.pass = ok;
  o.detail << "covariance and 6-function battery at t = 0.25, 1, 4 with " << kOraclePaths
           << " paths; worst deviation " << g(worst) << " SE";
}

struct Tally {
  std::size_t pass = 0, fail = 0, skipped = 0, inconclusive = 0;
  void add(const InequalityCase& c) {
    const auto v = c.verdict();
    if (v == "FAIL") ++fail;
    else if (v == "SKIPPED") ++skipped;
    else {
      ++pass;
      if (v == "INCONCLUSIVE") ++inconclusive;
    }
  }
  std::string text() const {
    return std::to_string(pass) + " pass (" + std::to_string(inconclusive) + " inconclusive), " +
           std::to_string(fail) + " fail, " + std::to_string(skipped) + " skipped";
  }
};

void inequalities(Outcome& o) {
  const auto k = get("kolmogorov");
  SuiteOptions so;
  so.ineqs = {"grad-variance", "grad-entropy", "harnack", "log-harnack"};
  std::map<std::string, Tally> t;
  for (const auto& c : run_verify_suite(k, so)) {
    std::string key = c.ineq == "grad-variance" ? (c.schedule_id == k.harnack->id ? "reduced gradient" : "gradient/variance")
                      : c.ineq == "grad-entropy" ? "gradient/entropy"
                      : c.ineq == "harnack"      ? "Harnack"
                                                 : "log-Harnack";
    t["kolmogorov " + key].add(c);
  }
  const auto ec = get("exampleC");
  so.ineqs = {"grad-variance", "grad-entropy"};
  for (const auto& c : run_verify_suite(ec, so))
    t[std::string("exampleC ") + (c.ineq == "grad-variance" ? "gradient/variance" : "gradient/entropy")].add(c);
  bool ok = true;
  for (const auto& [name, tally] : t) {
    ok = ok && tally.fail == 0 && tally.pass + tally.skipped > 0;
    o.detail << name << ": " << tally.text() << "; ";
  }
  for (const char* need : {"kolmogorov reduced gradient", "kolmogorov Harnack", "kolmogorov gradient/variance",
                           "kolmogorov gradient/entropy", "kolmogorov log-Harnack", "exampleC gradient/variance"})
    ok = ok && t.count(need) && t[need].pass > 0;

  // the entropy form for example C is not claimed without commutation; evaluated here for information only
  auto ctx = ec.context();
  ctx.commutes = true;
  const auto s = ec.schedule().build(1.0);
  const auto info = check_grad_entropy(ctx, schedule_form(ctx, s), s.cb.value, ec.battery[0], ec.starts[1], 1.0, "powers");
  o.detail << "exampleC entropy form evaluated anyway: " << info.verdict() << " margin " << g(info.margin);
  o.pass = ok;
}

void sharpness(Outcome& o) {
  const auto e = get("ou");
  const auto ctx = e.context();
  const double t = 0.1, rho = 1.0;
  const auto s = e.schedule().build(t);
  const double prefactor = s.cb.value / s.b(0, 0.0);
  const double expect = 2 * rho / std::expm1(2 * rho * t);
  bool ok = std::abs(prefactor - expect) <= 1e-12 * expect;
  const auto f = exp_function("exp(x/10)", e.spec.op.coords, "x/10");
  double worst = 1.0;
  for (double x0 : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
    const std::vector<double> z{x0};
    const auto c = check_grad_entropy(ctx, schedule_form(ctx, s), s.cb.value, f, z, t, "two-rate");
    const double ratio = c.lhs / c.rhs;
    worst = std::min(worst, ratio);
    ok = ok && c.pass && ratio >= 1 - kSharpTol;
  }
  const auto p = check_poincare_rayleigh(ctx, compute_lambda(e.spec.k).lambda, e.sampler, e.rayleigh_family, 200000, 11);
  ok = ok && p.rhs >= 1.0 - 3 * p.uncertainty;
  o.pass = ok;
  o.detail << "prefactor " << g(prefactor) << " vs " << g(expect) << ", min bound ratio " << g(worst)
           << ", Rayleigh minimum " << g(p.rhs) << " +- " << g(p.uncertainty) << " (" << p.test_function << ")";
}

void schedule_ode(Outcome& o) {
  const auto k = k_family_kolmogorov(true);
  const auto th = find_t_theta(kKolmogorovTheta, k);
  bool ok = std::abs(th.residual) <= kThetaResidual;
  double worst = 0;
  bool dominates = true;
  for (int j = 1; j <= 20; ++j) {
    const double t = th.t_theta * j / 20.0;
    const auto s = solve_schedule_ode(k, t);
    for (int q = 0; q <= 50; ++q) {
      const double at = t * q / 50.0, u = t - at;
      worst = std::max(worst, std::abs(s.b(2, at) - (std::sinh(std::sqrt(2.0) * u) / std::sqrt(2.0) - u)));
    }
    dominates = dominates && s.b(2, 0.0) >= t * t * t / 3;
  }
  ok = ok && worst <= kOdeTol && dominates;
  o.pass = ok;
  o.detail << "max |b_2 - closed form| " << g(worst) << ", b_2(0) >= t^3/3 on (0, t_theta]: " << dominates
           << ", t_theta(1.9) = " << g(th.t_theta) << " residual " << g(th.residual) << ", feasible theta ("
           << g(th.feasible_lo) << ", " << g(th.feasible_hi) << ") against printed (1.5, 2)";
}

void decay(Outcome& o) {
  SuiteOptions so;
  so.ineqs = {"decay"};
  bool ok = true;
  for (const char* id : {"exampleA", "ou"}) {
    Tally t;
    double worst = 1e300;
    for (const auto& c : run_verify_suite(get(id), so)) {
      t.add(c);
      if (!c.skipped && c.uncertainty > 0) worst = std::min(worst, c.margin / c.uncertainty);
    }
    ok = ok && t.fail == 0 && t.pass > 0;
    o.detail << id << ": " << t.text() << ", min margin/u " << g(worst) << "; ";
  }
  o.pass = ok;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"symbolic goldens", symbolic},
      {"constants", constants},
      {"PSD certification", psd},
      {"commutation verdicts", commutation},
      {"Kolmogorov oracle", kolmogorov_oracle},
      {"inequality suites", inequalities},
      {"sharpness on OU", sharpness},
      {"schedule ODE", schedule_ode},
      {"decay property", decay},
  };
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail << "error: " << ex.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const int n = static_cast<int>(i) + 1;
    const bool recorded = !o.pass && kRecordedDeviations.count(n);
    std::cout << "criterion " << n << " " << (o.pass ? "PASS" : "FAIL") << (recorded ? " (recorded deviation)" : "")
              << " " << criteria[i].first << ": " << o.detail.str() << " [" << g(secs) << " s]" << std::endl;
    if (!o.pass && !recorded) ++unexpected;
  }
  return unexpected ? 1 : 0;
}
