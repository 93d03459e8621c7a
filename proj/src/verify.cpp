#include "subcurv/verify.hpp"

#include <cmath>
#include <map>

namespace subcurv {

std::string InequalityCase::verdict() const {
  if (skipped) return "SKIPPED";
  if (!pass) return "FAIL";
  return inconclusive ? "INCONCLUSIVE" : "PASS";
}

void InequalityCase::settle() {
  pass = std::isfinite(margin) && margin >= -3.0 * uncertainty;
  inconclusive = std::abs(margin) < uncertainty;
}

InequalityCase skipped_case(std::string ineq, std::string op_id, std::string why) {
  InequalityCase c;
  c.ineq = std::move(ineq);
  c.op_id = std::move(op_id);
  c.skipped = true;
  c.pass = true;
  c.note = std::move(why);
  return c;
}

DistanceRule diagonal_distance(std::string name, std::function<std::vector<double>(double)> weights) {
  DistanceRule r;
  r.name = std::move(name);
  r.squared = [weights = std::move(weights)](std::span<const double> z, std::span<const double> w, double t) {
    auto wt = weights(t);
    double s = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      double d = z[j] - w[j];
      if (d != 0.0) s += d * d / wt[j];
    }
    return s;
  };
  return r;
}

namespace {

double norm(std::span<const double> z) {
  double s = 0;
  for (double v : z) s += v * v;
  return std::sqrt(s);
}

Moments from_samples(const std::vector<std::vector<double>>& rows, std::size_t k) {
  Moments m;
  const std::size_t n = rows.size();
  m.paths = n;
  m.mean.assign(k, 0.0);
  m.cov.assign(k, std::vector<double>(k, 0.0));
  if (n == 0) throw VerifyError("no valid samples");
  for (const auto& r : rows)
    for (std::size_t a = 0; a < k; ++a) m.mean[a] += r[a];
  for (auto& v : m.mean) v /= static_cast<double>(n);
  if (n < 2) return m;
  for (const auto& r : rows)
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a; b < k; ++b) m.cov[a][b] += (r[a] - m.mean[a]) * (r[b] - m.mean[b]);
  const double scale = 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) m.cov[b][a] = m.cov[a][b] *= scale;
  return m;
}

Moments at_time_zero(const std::vector<std::vector<double>>& starts, const std::vector<Quantity>& q) {
  Moments m;
  m.floor = kQuadratureUncertainty;
  m.cov.assign(q.size(), std::vector<double>(q.size(), 0.0));
  for (const auto& qq : q) {
    const auto& z = starts.at(qq.start);
    if (qq.coord < 0) {
      m.mean.push_back(qq.h(z));
      continue;
    }
    if (!qq.grad) throw VerifyError("derivative requested without a gradient");
    std::vector<double> g(z.size());
    qq.grad(z, g);
    m.mean.push_back(g[static_cast<std::size_t>(qq.coord)]);
  }
  return m;
}

Moments exact(const Backend& b, const std::vector<std::vector<double>>& starts, double t,
              const std::vector<Quantity>& q) {
  Moments m;
  m.floor = kQuadratureUncertainty;
  m.cov.assign(q.size(), std::vector<double>(q.size(), 0.0));
  for (const auto& qq : q) {
    const auto& z = starts.at(qq.start);
    if (qq.coord < 0) {
      m.mean.push_back(semigroup_exact(b.model, b.method, qq.h, z, t, b.rho));
      continue;
    }
    if (!qq.grad) throw VerifyError("exact derivative needs the gradient of the test function");
    TestFunction f{"", qq.h, qq.grad};
    m.mean.push_back(semigroup_gradient_exact(b.model, f, z, t, b.rho)[static_cast<std::size_t>(qq.coord)]);
  }
  return m;
}

Moments monte_carlo(const Backend& b, const std::vector<std::vector<double>>& starts, double t,
                    const std::vector<Quantity>& q) {
  if (!b.sde) throw VerifyError("Monte Carlo backend has no SDE model");
  // every start plus +-h shifts for the requested derivatives
  std::vector<std::vector<double>> all = starts;
  std::map<std::pair<std::size_t, int>, std::pair<std::size_t, double>> shifted;
  for (const auto& qq : q) {
    if (qq.coord < 0) continue;
    auto key = std::make_pair(qq.start, qq.coord);
    if (shifted.count(key)) continue;
    const auto& z = starts.at(qq.start);
    const double h = 1e-3 * (1 + norm(z));
    shifted[key] = {all.size(), h};
    auto up = z, dn = z;
    up[static_cast<std::size_t>(qq.coord)] += h;
    dn[static_cast<std::size_t>(qq.coord)] -= h;
    all.push_back(up);
    all.push_back(dn);
  }
  auto ends = b.sde->simulate(all, t, b.mc);
  std::vector<std::vector<double>> rows;
  rows.reserve(b.mc.paths);
  std::size_t excluded = 0;
  for (std::size_t p = 0; p < b.mc.paths; ++p) {
    bool ok = true;
    for (const auto& e : ends) ok = ok && e.valid[p];
    if (!ok) {
      ++excluded;
      continue;
    }
    std::vector<double> r(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
      const auto& qq = q[k];
      if (qq.coord < 0) {
        r[k] = qq.h(ends[qq.start].row(p));
      } else {
        auto [idx, h] = shifted.at({qq.start, qq.coord});
        r[k] = (qq.h(ends[idx].row(p)) - qq.h(ends[idx + 1].row(p))) / (2 * h);
      }
    }
    rows.push_back(std::move(r));
  }
  auto m = from_samples(rows, q.size());
  m.excluded = excluded;
  return m;
}

}  // namespace

Moments estimate(const Backend& b, const std::vector<std::vector<double>>& starts, double t,
                 const std::vector<Quantity>& q) {
  if (t < 0) throw VerifyError("need t >= 0");
  if (t == 0) return at_time_zero(starts, q);
  if (b.method != Method::kMC) return exact(b, starts, t, q);
  return monte_carlo(b, starts, t, q);
}

double delta_uncertainty(const Moments& m, const std::function<double(std::span<const double>)>& G) {
  const std::size_t k = m.mean.size();
  bool random = false;
  for (const auto& row : m.cov)
    for (double v : row) random = random || v != 0.0;
  if (!random) return m.floor;
  std::vector<double> g(k), p = m.mean;
  for (std::size_t a = 0; a < k; ++a) {
    double sd = std::sqrt(std::max(m.cov[a][a], 0.0));
    double h = std::max(1e-6 * std::max(1.0, std::abs(m.mean[a])), 1e-3 * sd);
    p[a] = m.mean[a] + h;
    double up = G(p);
    p[a] = m.mean[a] - h;
    double dn = G(p);
    p[a] = m.mean[a];
    g[a] = (up - dn) / (2 * h);
  }
  double var = 0.0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) var += g[a] * m.cov[a][b] * g[b];
  return std::max(std::sqrt(std::max(var, 0.0)), m.floor);
}

void VerifyContext::compile() {
  compiled_.clear();
  for (const auto& sf : fields) {
    std::vector<std::vector<CompiledPoly>> m;
    for (const auto& row : sf.matrix()) {
      std::vector<CompiledPoly> r;
      for (const auto& e : row) r.emplace_back(e);
      m.push_back(std::move(r));
    }
    compiled_.push_back(std::move(m));
  }
}

double VerifyContext::field_value(std::size_t i, std::span<const double> z, std::span<const double> u) const {
  const auto& m = compiled_.at(i);
  double s = 0.0;
  for (std::size_t a = 0; a < m.size(); ++a)
    for (std::size_t b = 0; b < m.size(); ++b)
      if (!m[a][b].is_zero() && u[a] != 0.0 && u[b] != 0.0) s += m[a][b](z) * u[a] * u[b];
  return s;
}

VerifyContext make_context(std::string op_id, const OperatorSpec& op, std::vector<SquareField> aux, Backend b) {
  VerifyContext ctx;
  ctx.op_id = std::move(op_id);
  ctx.op = op;
  ctx.fields.push_back(carre_du_champ(op));
  ctx.commutes = true;
  for (auto& sf : aux) {
    ctx.commutes = ctx.commutes && check_commutation(sf, ctx.fields[0]).commutes;
    ctx.fields.push_back(std::move(sf));
  }
  if (b.method == Method::kMC && !b.sde) b.sde = std::make_shared<SdeModel>(op);
  ctx.backend = std::move(b);
  ctx.compile();
  return ctx;
}

GradientForm schedule_form(const VerifyContext& ctx, const Schedule& sch) {
  std::vector<double> w;
  for (std::size_t i = 0; i < ctx.fields.size(); ++i) w.push_back(sch.b(i, 0.0));
  return [&ctx, w](std::span<const double> z, std::span<const double> u) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * ctx.field_value(i, z, u);
    return s;
  };
}

namespace {

InequalityCase base_case(const VerifyContext& ctx, std::string ineq, const TestFunction& f, double t,
                         const std::string& schedule_id) {
  InequalityCase c;
  c.ineq = std::move(ineq);
  c.op_id = ctx.op_id;
  c.schedule_id = schedule_id;
  c.test_function = f.name;
  c.method = method_name(ctx.backend.method);
  c.t = t;
  return c;
}

// f at z, then h at z, then the derivatives of P_t f at z
std::vector<Quantity> value_and_gradient(const TestFunction& f, std::function<double(std::span<const double>)> h,
                                         std::size_t dim) {
  std::vector<Quantity> q{{0, -1, f.value, f.grad}, {0, -1, std::move(h), {}}};
  for (std::size_t j = 0; j < dim; ++j) q.push_back({0, static_cast<int>(j), f.value, f.grad});
  return q;
}

InequalityCase gradient_case(const VerifyContext& ctx, const GradientForm& form, double c_b, const TestFunction& f,
                             std::span<const double> z, double t, const std::string& schedule_id, bool entropy) {
  if (entropy && !f.positive) throw VerifyError("entropy needs a positive test function; " + f.name + " is not");
  auto c = base_case(ctx, entropy ? "grad-entropy" : "grad-variance", f, t, schedule_id);
  c.x.assign(z.begin(), z.end());
  const std::size_t d = z.size();
  std::function<double(std::span<const double>)> h;
  if (entropy) {
    h = [&f](std::span<const double> w) {
      double v = f.value(w);
      return v > 0 ? v * std::log(v) : 0.0;
    };
  } else {
    h = [&f](std::span<const double> w) {
      double v = f.value(w);
      return v * v;
    };
  }
  std::vector<double> zv(z.begin(), z.end());
  auto m = estimate(ctx.backend, {zv}, t, value_and_gradient(f, h, d));
  auto lhs = [&](std::span<const double> mm) { return form(zv, mm.subspan(2, d)); };
  auto rhs = [&](std::span<const double> mm) {
    if (entropy) return c_b * mm[0] * (mm[1] - mm[0] * std::log(mm[0]));
    return c_b * (mm[1] - mm[0] * mm[0]);
  };
  c.lhs = lhs(m.mean);
  c.rhs = rhs(m.mean);
  c.margin = c.rhs - c.lhs;
  c.uncertainty = delta_uncertainty(m, [&](std::span<const double> mm) { return rhs(mm) - lhs(mm); });
  c.settle();
  return c;
}

double distance(const DistanceRule& rule, std::span<const double> x, std::span<const double> y, double t) {
  double r2 = rule.squared(x, y, t);
  if (!(r2 >= 0) || !std::isfinite(r2)) throw VerifyError("distance rule " + rule.name + " returned " + std::to_string(r2));
  return std::sqrt(r2);
}

}  // namespace

InequalityCase check_grad_variance(const VerifyContext& ctx, const GradientForm& form, double c_b,
                                   const TestFunction& f, std::span<const double> z, double t,
                                   const std::string& schedule_id) {
  return gradient_case(ctx, form, c_b, f, z, t, schedule_id, false);
}

InequalityCase check_grad_entropy(const VerifyContext& ctx, const GradientForm& form, double c_b,
                                  const TestFunction& f, std::span<const double> z, double t,
                                  const std::string& schedule_id) {
  if (!ctx.commutes) {
    auto c = skipped_case("grad-entropy", ctx.op_id,
                          "refused: the auxiliary fields do not commute with Gamma, so the entropy bound is not claimed");
    c.test_function = f.name;
    c.t = t;
    c.x.assign(z.begin(), z.end());
    return c;
  }
  return gradient_case(ctx, form, c_b, f, z, t, schedule_id, true);
}

InequalityCase check_harnack(const VerifyContext& ctx, const DistanceRule& rule, double c_b, double alpha,
                             const TestFunction& f, std::span<const double> x, std::span<const double> y,
                             double t, const std::string& schedule_id) {
  if (!(alpha > 1)) throw VerifyError("Harnack inequality needs alpha > 1");
  if (!f.positive) throw VerifyError("Harnack inequality needs a positive test function; " + f.name + " is not");
  auto c = base_case(ctx, "harnack", f, t, schedule_id);
  c.alpha = alpha;
  c.x.assign(x.begin(), x.end());
  c.y.assign(y.begin(), y.end());
  const double rho = distance(rule, x, y, t);
  const double expo = harnack_exponent([c_b](double d) { return c_b / (4 * d); }, rho, alpha);
  auto fa = [&f, alpha](std::span<const double> w) { return std::pow(f.value(w), alpha); };
  auto m = estimate(ctx.backend, {c.x, c.y}, t, {{0, -1, f.value, f.grad}, {1, -1, fa, {}}});
  auto lhs = [&](std::span<const double> mm) { return alpha * std::log(mm[0]); };
  auto rhs = [&](std::span<const double> mm) { return std::log(mm[1]) + expo; };
  c.lhs = lhs(m.mean);
  c.rhs = rhs(m.mean);
  c.margin = c.rhs - c.lhs;
  c.uncertainty = delta_uncertainty(m, [&](std::span<const double> mm) { return rhs(mm) - lhs(mm); });
  c.note = "rho^2 = " + std::to_string(rho * rho) + ", exponent = " + std::to_string(expo);
  c.settle();
  return c;
}

InequalityCase check_log_harnack(const VerifyContext& ctx, const DistanceRule& rule, double c_b,
                                 const TestFunction& f, std::span<const double> x, std::span<const double> y,
                                 double t, const std::string& schedule_id) {
  if (!(f.lower_bound > 0))
    throw VerifyError("log-Harnack needs a uniformly positive test function; " + f.name + " is not");
  auto c = base_case(ctx, "log-harnack", f, t, schedule_id);
  c.x.assign(x.begin(), x.end());
  c.y.assign(y.begin(), y.end());
  const double rho = distance(rule, x, y, t);
  auto logf = [&f](std::span<const double> w) { return std::log(f.value(w)); };
  auto m = estimate(ctx.backend, {c.x, c.y}, t, {{0, -1, logf, {}}, {1, -1, f.value, f.grad}});
  auto lhs = [&](std::span<const double> mm) { return mm[0]; };
  auto rhs = [&](std::span<const double> mm) { return std::log(mm[1]) + c_b * rho * rho / 4; };
  c.lhs = lhs(m.mean);
  c.rhs = rhs(m.mean);
  c.margin = c.rhs - c.lhs;
  c.uncertainty = delta_uncertainty(m, [&](std::span<const double> mm) { return rhs(mm) - lhs(mm); });
  c.settle();
  return c;
}

InequalityCase check_harnack_sqrt(const VerifyContext& ctx, const DistanceRule& rule, double c_b,
                                  const TestFunction& f, std::span<const double> x, std::span<const double> y,
                                  double t, const std::string& schedule_id) {
  auto c = base_case(ctx, "harnack-sqrt", f, t, schedule_id);
  c.x.assign(x.begin(), x.end());
  c.y.assign(y.begin(), y.end());
  const double rho = distance(rule, x, y, t);
  auto f2 = [&f](std::span<const double> w) {
    double v = f.value(w);
    return v * v;
  };
  auto m = estimate(ctx.backend, {c.x, c.y}, t, {{0, -1, f.value, f.grad}, {0, -1, f2, {}}, {1, -1, f.value, f.grad}});
  auto lhs = [&](std::span<const double> mm) { return mm[0]; };
  auto rhs = [&](std::span<const double> mm) { return mm[2] + c_b * rho * std::sqrt(std::max(mm[1], 0.0)); };
  c.lhs = lhs(m.mean);
  c.rhs = rhs(m.mean);
  c.margin = c.rhs - c.lhs;
  c.uncertainty = delta_uncertainty(m, [&](std::span<const double> mm) { return rhs(mm) - lhs(mm); });
  c.settle();
  return c;
}

InequalityCase check_decay(const VerifyContext& ctx, std::span<const double> r, double lambda,
                           const TestFunction& f, std::span<const double> z, double t) {
  if (r.size() + 1 != ctx.fields.size()) throw VerifyError("decay check needs one r per auxiliary field");
  for (double v : r)
    if (!(v > 0)) throw VerifyError("decay check needs r > 0");
  auto c = base_case(ctx, "decay", f, t, "");
  c.x.assign(z.begin(), z.end());
  const std::size_t d = z.size();
  std::vector<double> w{1.0};
  w.insert(w.end(), r.begin(), r.end());
  auto weighted = [&ctx, w](std::span<const double> at, std::span<const double> u) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * ctx.field_value(i, at, u);
    return s;
  };
  auto gamma_f = [&f, &weighted, d](std::span<const double> at) {
    std::vector<double> g(d);
    f.grad(at, g);
    return weighted(at, g);
  };
  std::vector<Quantity> q;
  for (std::size_t j = 0; j < d; ++j) q.push_back({0, static_cast<int>(j), f.value, f.grad});
  q.push_back({0, -1, gamma_f, {}});
  auto m = estimate(ctx.backend, {c.x}, t, q);
  const double decay = std::exp(-2 * lambda * t);
  auto lhs = [&](std::span<const double> mm) { return weighted(c.x, mm.subspan(0, d)); };
  auto rhs = [&](std::span<const double> mm) { return decay * mm[d]; };
  c.lhs = lhs(m.mean);
  c.rhs = rhs(m.mean);
  c.margin = c.rhs - c.lhs;
  c.uncertainty = delta_uncertainty(m, [&](std::span<const double> mm) { return rhs(mm) - lhs(mm); });
  c.note = "lambda(r) = " + std::to_string(lambda);
  c.settle();
  return c;
}

InequalityCase check_poincare_rayleigh(const VerifyContext& ctx, double lambda, const MeasureSampler& mu,
                                       const std::vector<TestFunction>& family, std::size_t samples,
                                       std::uint64_t seed, std::vector<RayleighRow>* rows) {
  if (!(lambda > 0)) return skipped_case("poincare", ctx.op_id, "no positive Poincare rate (lambda <= 0)");
  if (!mu) return skipped_case("poincare", ctx.op_id, "no invariant-measure sampler");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> pts(samples);
  for (auto& p : pts) p = mu(rng);
  InequalityCase best;
  bool have = false;
  for (const auto& f : family) {
    std::vector<std::vector<double>> s;
    s.reserve(samples);
    std::vector<double> g(ctx.op.dimension());
    for (const auto& p : pts) {
      f.grad(p, g);
      double v = f.value(p);
      s.push_back({ctx.field_value(0, p, g), v, v * v});
    }
    auto m = from_samples(s, 3);
    auto R = [](std::span<const double> mm) { return mm[0] / (mm[2] - mm[1] * mm[1]); };
    const double var = m.mean[2] - m.mean[1] * m.mean[1];
    if (!(var > 1e-12 * std::max(1.0, m.mean[2]))) continue;  // constants carry no information
    const double q = R(m.mean), se = delta_uncertainty(m, R);
    if (rows) rows->push_back({f.name, q, se});
    if (!have || q - lambda < best.margin) {
      best = InequalityCase{};
      best.ineq = "poincare";
      best.op_id = ctx.op_id;
      best.test_function = f.name;
      best.method = "mc";
      best.lhs = lambda;
      best.rhs = q;
      best.margin = q - lambda;
      best.uncertainty = se;
      best.note = "Rayleigh quotient over " + std::to_string(samples) + " samples of mu";
      have = true;
    }
  }
  if (!have) return skipped_case("poincare", ctx.op_id, "every test function is constant under mu");
  best.settle();
  return best;
}

}  // namespace subcurv
