#include "subcurv/catalog.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "subcurv/families.hpp"

namespace subcurv {

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kReference: return "reference";
    case Provenance::kElementary: return "elementary";
    case Provenance::kComputed: return "computed";
  }
  return "?";
}

TestFunction polynomial_function(std::string name, const Coordinates& c, const std::string& text,
                                 double lower_bound) {
  Expression e = parse_expression(text, c);
  auto val = std::make_shared<CompiledPoly>(e);
  auto grads = std::make_shared<std::vector<CompiledPoly>>();
  for (std::size_t j = 0; j < c.size(); ++j) grads->emplace_back(e.differentiate(j));
  TestFunction f;
  f.name = std::move(name);
  f.value = [val](std::span<const double> z) { return (*val)(z); };
  f.grad = [grads](std::span<const double> z, std::span<double> g) {
    for (std::size_t j = 0; j < grads->size(); ++j) g[j] = (*grads)[j](z);
  };
  f.lower_bound = lower_bound;
  f.positive = lower_bound > 0;
  return f;
}

TestFunction exp_function(std::string name, const Coordinates& c, const std::string& exponent) {
  auto p = polynomial_function("", c, exponent);
  TestFunction f;
  f.name = std::move(name);
  f.value = [v = p.value](std::span<const double> z) { return std::exp(v(z)); };
  f.grad = [v = p.value, g = p.grad](std::span<const double> z, std::span<double> out) {
    g(z, out);
    const double e = std::exp(v(z));
    for (auto& x : out) x *= e;
  };
  f.lower_bound = 0.0;
  f.positive = true;
  return f;
}

TestFunction one_plus_square(std::string name, const Coordinates& c, const std::string& g) {
  auto p = polynomial_function("", c, g);
  TestFunction f;
  f.name = std::move(name);
  f.value = [v = p.value](std::span<const double> z) {
    const double a = v(z);
    return 1.0 + a * a;
  };
  f.grad = [v = p.value, gr = p.grad](std::span<const double> z, std::span<double> out) {
    gr(z, out);
    const double a = 2 * v(z);
    for (auto& x : out) x *= a;
  };
  f.lower_bound = 1.0;
  f.positive = true;
  return f;
}

MeasureSampler example_a_measure_sampler(double /*K*/, double r0) {
  if (!(r0 > 0)) throw CatalogError("the invariant measure needs r0 > 0");
  return [r0](std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0 / std::sqrt(r0));
    std::uniform_real_distribution<double> u(0.0, 2 * std::numbers::pi);
    const double x = n(rng);
    return std::vector<double>{x, u(rng)};
  };
}

GrushinConstants grushin_constants(int l) {
  // output of search_constants on the default grid, rounded up to 4 significant digits
  switch (l) {
    case 1: return {3.992, 1.0};
    case 2: return {119.5, 1.0};
    case 3: return {16.68, 0.5};
    default: throw CatalogError("Grushin constants are stored for l = 1, 2, 3 only");
  }
}

VerifyContext CatalogEntry::context() const { return make_context(id, spec.op, spec.aux, backend); }

const ScheduleChoice& CatalogEntry::schedule(const std::string& sid) const {
  if (schedules.empty()) throw CatalogError(id + " has no schedules");
  if (sid.empty()) return schedules.front();
  for (const auto& s : schedules)
    if (s.id == sid) return s;
  throw CatalogError("unknown schedule \"" + sid + "\" for " + id);
}

void CatalogEntry::validate() const {
  auto psd = psd_sweep(spec, grid);
  const bool expect_pass = id != "kolmogorov-stated";
  if (psd.pass != expect_pass)
    throw CatalogError(id + ": psd_sweep " + (psd.pass ? "passed" : "failed") + " with global min " +
                       std::to_string(psd.global_min));
  auto w = verify_compact_function(spec, grid);
  if (!w.pass) throw CatalogError(id + ": compact function check failed: " + w.detail);
}

namespace {

SquareField diag(const std::string& name, const Coordinates& c, const std::vector<std::string>& d) {
  ExprMatrix m(d.size(), std::vector<Expression>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m[i][i] = parse_expression(d[i], c);
  return SquareField(name, m);
}

FieldVector vec(const Coordinates& c, const std::vector<std::string>& v) {
  FieldVector out;
  for (const auto& s : v) out.push_back(parse_expression(s, c));
  return out;
}

std::string pw(int k) { return std::to_string(k); }

// grad-form sum_j w_j u_j^2
GradientForm diagonal_form(std::vector<double> w) {
  return [w = std::move(w)](std::span<const double>, std::span<const double> u) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * u[j] * u[j];
    return s;
  };
}

HarnackData diagonal_harnack(std::string id, std::function<std::vector<double>(double)> weights,
                             std::function<double(double)> c_b) {
  HarnackData h;
  h.id = std::move(id);
  h.form = [weights](const VerifyContext&, double t) { return diagonal_form(weights(t)); };
  h.distance = diagonal_distance(h.id, weights);
  h.c_b = std::move(c_b);
  return h;
}

Schedule kolmogorov_engine_schedule(double t) {
  Schedule s;
  s.label = "b = (t-s, (t-s)^2, (t-s)^3/3)";
  s.t = t;
  s.ell = 2;
  s.k = k_family_kolmogorov();
  s.b = [t](std::size_t i, double at) {
    const double u = t - at;
    return i == 0 ? u : i == 1 ? u * u : u * u * u / 3;
  };
  s.db = [t](std::size_t i, double at) {
    const double u = t - at;
    return i == 0 ? -1.0 : i == 1 ? -2 * u : -u * u;
  };
  finalize_schedule(s);
  return s;
}

double kolmogorov_t_theta() {
  static std::once_flag once;
  static double value = 0.0;
  std::call_once(once, [] { value = find_t_theta(kKolmogorovTheta, k_family_kolmogorov(true)).t_theta; });
  return value;
}

CatalogEntry kolmogorov(bool stated) {
  CatalogEntry e;
  Coordinates c({"x", "y"});
  e.id = stated ? "kolmogorov-stated" : "kolmogorov";
  e.title = stated ? "Kolmogorov operator, rate K_1 = 1 + r2 as printed" : "Kolmogorov operator d_xx + x d_y";
  e.spec.name = e.id;
  e.spec.op = {c, {vec(c, {"1", "0"})}, vec(c, {"0", "x"})};
  ExprMatrix m1{{parse_expression("0", c), parse_expression("-1/2", c)},
                {parse_expression("-1/2", c), parse_expression("0", c)}};
  e.spec.aux = {SquareField("Gamma1", m1), diag("Gamma2", c, {"0", "1"})};
  e.spec.k = k_family_kolmogorov(stated);
  e.spec.W = parse_expression("1 + x^2 + y^2", c);
  e.spec.omega_witness = {1.0, 1.0};
  e.displays = {
      {0, "Gamma_2 in the running text", "f_xx^2 - f_x*f_y", true, ""},
      {0, "Gamma_2 in the worked example", "f_xx^2 - f_x*f_xy", false, "f_xy printed where the operator gives f_y"},
      {1, "Gamma_2^(1) for Gamma^(1)(f,g) = -(f_x g_y + f_y g_x)/2", "1/2*f_y^2 - f_xx*f_xy", true, ""},
      {2, "Gamma_2^(2) as printed", "f_xy^2 - f_x*f_yy", false,
       "Gamma^(2)(f) = f_y^2 gives f_xy^2; the symmetrized f_x f_y gives f_xx*f_xy - 1/2*f_y^2"},
  };
  ExprMatrix sym{{parse_expression("0", c), parse_expression("1/2", c)},
                 {parse_expression("1/2", c), parse_expression("0", c)}};
  e.display_variants = {SquareField("(f_x g_y + f_y g_x)/2", sym), diag("f_y g_y", c, {"0", "1"})};
  e.expected = {
      {"Gamma(f)", "f_x^2", Provenance::kReference, ""},
      {"commutation", "true", Provenance::kReference, ""},
      {"K", "(0, 1, r1/2) on r1^2 <= 4 r2", Provenance::kComputed, "maximal K_1 found by bisection is 1"},
      {"K_1 as printed", "1 + r2 (not PSD on Omega)", Provenance::kComputed, ""},
      {"c_b (engine schedule)", "1", Provenance::kElementary, ""},
      {"theta range", "(sqrt(3), 2)", Provenance::kComputed, "printed range is (3/2, 2)"},
      {"b_2 (printed rates, ODE)", "sinh(sqrt(2)(t-s))/sqrt(2) - (t-s)", Provenance::kComputed, ""},
  };
  e.schedules = {{"engine", kolmogorov_engine_schedule},
                 {"ode-stated", [](double t) {
                    OdeOptions o;
                    return solve_schedule_ode(k_family_kolmogorov(true), t, o);
                  }}};
  const double th = kKolmogorovTheta;
  e.harnack = diagonal_harnack(
      "theta-reduced",
      [th](double t) {
        const double tau = std::min(t, kolmogorov_t_theta());
        return std::vector<double>{(2 - th) / 2 * tau, (2 - th) / 2 * tau * tau * tau / 3};
      },
      [](double) { return 1.0; });
  e.battery = {exp_function("exp(x/4)", c, "x/4"),
               exp_function("exp(y/10)", c, "y/10"),
               exp_function("exp(x/5 - y/10)", c, "x/5 - y/10"),
               one_plus_square("1 + x^2", c, "x"),
               one_plus_square("1 + (x - y)^2", c, "x - y"),
               one_plus_square("1 + (x + y/2)^2", c, "x + y/2")};
  for (double x : {-1.0, 0.0, 1.0})
    for (double y : {-1.0, 0.0, 1.0}) e.starts.push_back({x, y});
  e.backend.model = "kolmogorov";
  e.backend.method = Method::kGaussQuadrature;
  return e;
}

CatalogEntry grushin(int l) {
  if (l < 1 || l > 3) throw CatalogError("grushin is available for l = 1, 2, 3");
  CatalogEntry e;
  Coordinates c({"x", "y"});
  e.id = "grushin";
  e.l = l;
  e.title = "Grushin operator d_xx + x^" + pw(2 * l) + " d_yy";
  const auto k = grushin_constants(l);
  e.alpha = k.alpha;
  e.beta = k.beta;
  e.spec.name = "grushin-l" + pw(l);
  e.spec.op = {c, {vec(c, {"1", "0"}), vec(c, {"0", "x^" + pw(l)})}, vec(c, {"0", "0"})};
  for (int i = 1; i <= l; ++i) e.spec.aux.push_back(diag("Gamma" + pw(i), c, {"0", "x^" + pw(2 * (l - i))}));
  e.spec.k = k_family_grushin(l, e.alpha, e.beta);
  e.spec.W = parse_expression("1 + x^" + pw(2 * l) + " + y^2", c);
  e.spec.omega_witness.assign(static_cast<std::size_t>(l), 1.0);

  std::string g2 = "f_xx^2 + " + pw(l * (2 * l - 1)) + "*x^" + pw(2 * (l - 1)) + "*f_y^2 + x^" + pw(4 * l) +
                   "*f_yy^2 + 2*x^" + pw(2 * l) + "*f_xy^2 + " + pw(4 * l) + "*x^" + pw(2 * l - 1) +
                   "*f_y*f_xy - " + pw(2 * l) + "*x^" + pw(2 * l - 1) + "*f_x*f_yy";
  e.displays.push_back({0, "Gamma_2", g2, true, ""});
  for (int i = 1; i <= l; ++i) {
    const int a = l - i;
    std::string s = pw(a * (2 * a - 1)) + "*x^" + pw(std::max(0, 2 * (a - 1))) + "*f_y^2 + " + pw(4 * a) + "*x^" +
                    pw(std::max(0, 2 * a - 1)) + "*f_y*f_xy + x^" + pw(2 * a) + "*f_xy^2 + x^" +
                    pw(2 * (2 * l - i)) + "*f_yy^2";
    e.displays.push_back({static_cast<std::size_t>(i), "Gamma_2^(" + pw(i) + ")", s, true, ""});
  }
  e.search_log = {"search_constants on the default grid, beta ladder 2^0..2^-10, alpha in 2^-10..2^10 + 20 bisections",
                  "l=1: beta=1: alpha=3.991701126098633",
                  "l=2: beta=1: alpha=119.43206787109375",
                  "l=3: beta=1: none; beta=0.5: alpha=16.675216674804688",
                  "stored alpha is rounded up to 4 significant digits"};
  // c_b grows like t^(2l-2); C0 fitted against the printed 1 + t^(l-1) on t in {1, 2, 4, 8}
  PowerParams pp;
  pp.l = l;
  pp.alpha = e.alpha;
  pp.beta = e.beta;
  double c4 = 0, c8 = 0;
  for (double t : {1.0, 2.0, 4.0, 8.0}) {
    const double cb = make_schedule_powers(PowerKind::kGrushin, pp, t).cb.value;
    e.c0_fit = std::max(e.c0_fit, cb / (1 + std::pow(t, l - 1)));
    (t == 4.0 ? c4 : c8) = cb;
  }
  e.growth_exponent = std::log2(c8 / c4);
  e.expected = {
      {"fields", "d_x, x^l d_y", Provenance::kReference, ""},
      {"commutation", l == 1 ? "true" : "false", Provenance::kComputed,
       "the text says it fails; for l = 1 every Gamma^(i) has constant coefficients"},
      {"alpha", format_number(e.alpha), Provenance::kComputed, "search output, see search_log"},
      {"beta", format_number(e.beta), Provenance::kComputed, ""},
      {"K_0 power", "r_{i-1}^{i+1} / r_i^i", Provenance::kComputed, "the printed r_{i-1}^{i-1} is infeasible for l >= 2"},
      {"C0", format_number(e.c0_fit), Provenance::kComputed, "max c_b / (1 + t^(l-1)) on t = 1, 2, 4, 8"},
      {"c_b growth exponent", format_number(e.growth_exponent), Provenance::kComputed, "2l - 2, not l - 1"},
  };
  e.schedules = {{"powers", [pp](double t) { return make_schedule_powers(PowerKind::kGrushin, pp, t); }}};
  const double cl = grushin_coefficients(l, e.beta).back();
  e.harnack = diagonal_harnack(
      "diagonal-lower",
      [l, cl](double t) { return std::vector<double>{std::pow(t, 2 * l - 1), cl * std::pow(t, 3 * l - 1)}; },
      [pp](double t) { return make_schedule_powers(PowerKind::kGrushin, pp, t).cb.value; });
  e.battery = {exp_function("exp(x/4 + y/4)", c, "x/4 + y/4"), exp_function("exp(-y/5)", c, "-y/5"),
               one_plus_square("1 + (x - y)^2", c, "x - y"), one_plus_square("1 + y^2", c, "y")};
  e.starts = {{0, 0}, {1, 0}, {-0.5, 0.5}, {1, 1}};
  e.backend.mc.paths = 20000;
  e.backend.mc.steps = 256;
  return e;
}

CatalogEntry example_c() {
  CatalogEntry e;
  Coordinates c({"x", "y", "z"});
  e.id = "exampleC";
  e.title = "d_xx + x^2 d_yy + y^2 d_zz";
  e.spec.name = e.id;
  e.spec.op = {c, {vec(c, {"1", "0", "0"}), vec(c, {"0", "x", "0"}), vec(c, {"0", "0", "y"})}, vec(c, {"0", "0", "0"})};
  e.spec.aux = {diag("Gamma1", c, {"0", "1", "x^2"}), diag("Gamma2", c, {"0", "0", "1"})};
  e.spec.k = k_family_example_c();
  e.spec.W = parse_expression("1 + x^2 + y^2 + z^2", c);
  e.spec.omega_witness = {1.0, 1.0};
  e.displays = {
      {0, "Gamma_2",
       "f_xx^2 + f_y^2 + x^2*f_z^2 + 2*x^2*f_xy^2 + 2*y^2*f_xz^2 + x^4*f_yy^2 + 2*x^2*y^2*f_yz^2 + y^4*f_zz^2 + "
       "4*x*f_y*f_xy + 4*x^2*y*f_z*f_yz - 2*x*f_x*f_yy - 2*x^2*y*f_y*f_zz",
       true, ""},
      {1, "Gamma_2^(1)",
       "f_z^2 + f_xy^2 + x^2*f_yy^2 + (y^2 + x^4)*f_yz^2 + x^2*f_xz^2 + x^2*y^2*f_zz^2 + 4*x*f_z*f_xz - 2*y*f_y*f_zz",
       true, ""},
      {2, "Gamma_2^(2)", "f_xz^2 + x^2*f_yz^2 + y^2*f_zz^2", true, ""},
  };
  e.expected = {
      {"K_2(r1, r2)", "r1", Provenance::kReference, ""},
      {"c_b", "77", Provenance::kReference, ""},
      {"b(0)", "(t, t^2/7, 2t^3/21)", Provenance::kReference, ""},
      {"commutation", "false", Provenance::kReference, ""},
      {"W", "1 + x^2 + y^2 + z^2", Provenance::kComputed, "1 + x^2 + y^2 is not compact in z"},
  };
  e.schedules = {{"powers", [](double t) { return make_schedule_powers(PowerKind::kExampleC, {}, t); }},
                 {"ode", [](double t) {
                    OdeOptions o;
                    o.seed_coef = {1.0 / 7, 2.0 / 21};
                    o.seed_power = {2, 3};
                    return solve_schedule_ode(k_family_example_c(), t, o);
                  }}};
  e.harnack = diagonal_harnack(
      "diagonal-lower", [](double t) { return std::vector<double>{t, t * t / 7, 2 * t * t * t / 21}; },
      [](double) { return 77.0; });
  e.battery = {exp_function("exp((x + y + z)/5)", c, "(x + y + z)/5"),
               one_plus_square("1 + (y - z)^2", c, "y - z"), one_plus_square("1 + (x + z)^2", c, "x + z")};
  e.starts = {{0, 0, 0}, {1, 0, 0}, {0.5, -0.5, 0.5}, {1, 1, 1}};
  e.backend.mc.paths = 20000;
  e.backend.mc.steps = 256;
  return e;
}

CatalogEntry example_a() {
  constexpr double K = 0.0, m = 2.0, r0 = 1.0;
  CatalogEntry e;
  Coordinates c({"x", "y"});
  e.id = "exampleA";
  e.title = "d_xx - r0 x d_x + x^2 d_yy with y on the circle (r0 = 1, K = 0, m = 2)";
  e.spec.name = e.id;
  e.spec.op = {c, {vec(c, {"1", "0"}), vec(c, {"0", "x"})}, vec(c, {"-x", "0"})};
  e.spec.aux = {diag("Gamma1", c, {"0", "1"})};
  e.spec.k = k_family_example_a(K, m, r0);
  e.spec.W = parse_expression("2 + x^2", c);
  e.spec.periodic = {false, true};
  e.spec.omega_witness = {1.0};
  e.displays = {
      {0, "Gamma_2 (flat fiber, r0 = 1)",
       "f_xx^2 + (1 - x^2)*f_y^2 + 4*x*f_y*f_xy + 2*x^2*f_xy^2 + x^4*f_yy^2 - 2*x*f_x*f_yy + f_x^2", true, ""},
      {1, "Gamma_2^(1)", "x^2*f_yy^2 + f_xy^2", true, ""},
  };
  e.expected = {
      {"commutation", "true", Provenance::kReference, ""},
      {"c_b", "1 + 2 sup_{r in (0,t)} max(m - r0 r, r0 r + 4 - K r^2)", Provenance::kReference, ""},
      {"lambda", "<= 0 for K = 0", Provenance::kComputed, "Poincare check skipped"},
      {"W", "2 + x^2", Provenance::kComputed, "1 + x^2 + W_bar with W_bar = 1 on the circle"},
  };
  PowerParams pp;
  pp.K = K;
  pp.m = m;
  pp.r0 = r0;
  e.schedules = {{"powers", [pp](double t) { return make_schedule_powers(PowerKind::kExampleA, pp, t); }}};
  e.harnack = diagonal_harnack(
      "diagonal-lower", [](double t) { return std::vector<double>{t, t * t}; },
      [pp](double t) { return make_schedule_powers(PowerKind::kExampleA, pp, t).cb.value; });
  // the y distance is measured on the circle
  auto base = e.harnack->distance.squared;
  e.harnack->distance.squared = [base](std::span<const double> z, std::span<const double> w, double t) {
    const double twopi = 2 * std::numbers::pi;
    double dy = std::remainder(z[1] - w[1], twopi);
    std::vector<double> zz{z[0], w[1] + dy};
    return base(zz, w, t);
  };
  e.sampler = example_a_measure_sampler(K, r0);
  e.battery = {exp_function("exp(x/4 + y/5)", c, "x/4 + y/5"), one_plus_square("1 + (x + y)^2", c, "x + y"),
               one_plus_square("1 + (x*y)^2", c, "x*y")};
  e.rayleigh_family = {polynomial_function("x", c, "x"), polynomial_function("x^2", c, "x^2"),
                       polynomial_function("x^3 - 3*x", c, "x^3 - 3*x")};
  e.starts = {{0, 0}, {1, 0.5}, {-1, 2}};
  e.backend.mc.paths = 20000;
  e.backend.mc.steps = 256;
  e.lambda_hint = std::min(2 * K / (r0 + std::sqrt(r0 * r0 + 20 * K)), r0 / (m + 1));
  return e;
}

CatalogEntry ou() {
  constexpr double rho = 1.0;
  CatalogEntry e;
  Coordinates c({"x"});
  e.id = "ou";
  e.title = "Ornstein-Uhlenbeck d_xx - x d_x";
  e.spec.name = e.id;
  e.spec.op = {c, {vec(c, {"1"})}, vec(c, {"-x"})};
  e.spec.k = k_family_ou(rho);
  e.spec.W = parse_expression("1 + x^2", c);
  e.displays = {{0, "Gamma_2", "f_xx^2 + f_x^2", true, ""}};
  e.expected = {
      {"lambda", "1", Provenance::kElementary, "spectral gap of the OU operator"},
      {"gradient prefactor", "2 rho/(exp(2 rho t) - 1)", Provenance::kReference, ""},
      {"c_b (kappa = 0)", "1", Provenance::kComputed, ""},
  };
  e.schedules = {{"two-rate", [rho](double t) { return make_schedule_two_rate(rho, 1.0, 0.0, t); }}};
  e.harnack = diagonal_harnack(
      "b0-scaled", [rho](double t) { return std::vector<double>{std::expm1(2 * rho * t) / (2 * rho)}; },
      [](double) { return 1.0; });
  e.sampler = [rho](std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0 / std::sqrt(rho));
    return std::vector<double>{n(rng)};
  };
  e.battery = {exp_function("exp(x/10)", c, "x/10"), exp_function("exp(x/2)", c, "x/2"),
               one_plus_square("1 + x^2", c, "x"), polynomial_function("x", c, "x")};
  e.rayleigh_family = {polynomial_function("x", c, "x"), polynomial_function("x^2", c, "x^2"),
                       polynomial_function("x^3", c, "x^3"), exp_function("exp(x/2)", c, "x/2"),
                       polynomial_function("x + x^2", c, "x + x^2")};
  e.starts = {{-1}, {0}, {0.5}, {1}};
  e.backend.model = "ou";
  e.backend.method = Method::kOUMehler;
  e.backend.rho = rho;
  e.lambda_hint = rho;
  return e;
}

}  // namespace

std::vector<std::string> catalog_ids() {
  return {"kolmogorov", "kolmogorov-stated", "grushin", "exampleC", "exampleA", "ou"};
}

CatalogEntry get(const std::string& id, int l) {
  if (id == "kolmogorov") return kolmogorov(false);
  if (id == "kolmogorov-stated") return kolmogorov(true);
  if (id == "grushin") return grushin(l);
  if (id == "exampleC") return example_c();
  if (id == "exampleA") return example_a();
  if (id == "ou") return ou();
  std::ostringstream os;
  os << "unknown catalog id \"" << id << "\"; known:";
  for (const auto& k : catalog_ids()) os << ' ' << k;
  throw CatalogError(os.str());
}

}  // namespace subcurv
