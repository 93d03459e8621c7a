#include "subcurv/schedule.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "subcurv/families.hpp"

namespace subcurv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe(double v) { return std::isnan(v) ? -kInf : v; }

}  // namespace

double Schedule::condition(std::size_t i, double s) const {
  auto r = ratios(s);
  return db(i, s) + 2.0 * b(0, s) * k.K.at(i)(r);
}

std::vector<double> Schedule::ratios(double s) const {
  std::vector<double> r(ell);
  const double b0 = b(0, s);
  for (std::size_t i = 1; i <= ell; ++i) r[i - 1] = b(i, s) / b0;
  return r;
}

void finalize_schedule(Schedule& sch, std::size_t n) {
  sch.residual_min.assign(sch.ell, kInf);
  sch.residual_max_abs.assign(sch.ell, 0.0);
  sch.omega_ok = true;
  sch.positive = true;
  for (std::size_t j = 0; j < n; ++j) {
    const double s = sch.t * (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    for (std::size_t i = 0; i <= sch.ell; ++i)
      if (!(sch.b(i, s) > 0.0)) sch.positive = false;
    if (sch.ell > 0 && !sch.k.contains(sch.ratios(s))) sch.omega_ok = false;
    for (std::size_t i = 1; i <= sch.ell; ++i) {
      double c = sch.condition(i, s);
      sch.residual_min[i - 1] = std::min(sch.residual_min[i - 1], c);
      sch.residual_max_abs[i - 1] = std::max(sch.residual_max_abs[i - 1], std::abs(c));
    }
  }
  sch.cb = compute_cb(sch, n);
}

Schedule make_schedule_two_rate(double rho1, double rho2, double kappa, double t) {
  if (!(rho2 > 0) || !(kappa >= 0) || !(t > 0)) throw ScheduleError("need rho2 > 0, kappa >= 0, t > 0");
  Schedule sch;
  sch.label = "closed form, K0 = rho1 - kappa/r, K1 = rho2";
  sch.t = t;
  sch.ell = 1;
  sch.k = k_family_13(rho1, rho2, kappa);
  // b0 = (e^{2 rho1 u} - 1)/(2 rho1), b1 = rho2 (e^{2 rho1 u} - 1 - 2 rho1 u)/(2 rho1^2); expm1 keeps rho1 -> 0 exact
  const bool flat = std::abs(rho1) * t < 1e-6;
  sch.b = [=](std::size_t i, double s) {
    const double u = t - s;
    if (i == 0) return flat ? u * (1 + rho1 * u) : std::expm1(2 * rho1 * u) / (2 * rho1);
    if (flat) return rho2 * u * u * (1 + 2 * rho1 * u / 3);
    return rho2 * (std::expm1(2 * rho1 * u) - 2 * rho1 * u) / (2 * rho1 * rho1);
  };
  sch.db = [=](std::size_t i, double s) {
    const double u = t - s;
    const double b0 = flat ? u * (1 + rho1 * u) : std::expm1(2 * rho1 * u) / (2 * rho1);
    if (i == 0) return -std::exp(2 * rho1 * u);
    return -2 * rho2 * b0;
  };
  finalize_schedule(sch);
  return sch;
}

std::vector<double> grushin_coefficients(int l, double beta) {
  std::vector<double> c(static_cast<std::size_t>(l) + 1, 1.0);
  for (int i = 1; i <= l; ++i) c[static_cast<std::size_t>(i)] = 2 * beta * c[static_cast<std::size_t>(i) - 1] / (2 * l - 1 + i);
  return c;
}

Schedule make_schedule_powers(PowerKind kind, const PowerParams& p, double t) {
  if (!(t > 0)) throw ScheduleError("need t > 0");
  std::vector<double> coef, power;
  Schedule sch;
  sch.t = t;
  switch (kind) {
    case PowerKind::kExampleA:
      coef = {1, 1};
      power = {1, 2};
      sch.k = k_family_example_a(p.K, p.m, p.r0);
      sch.label = "b0 = t-s, b1 = (t-s)^2";
      break;
    case PowerKind::kGrushin: {
      coef = grushin_coefficients(p.l, p.beta);
      for (int i = 0; i <= p.l; ++i) power.push_back(2 * p.l - 1 + i);
      sch.k = k_family_grushin(p.l, p.alpha, p.beta, p.stated_k0);
      sch.label = "b_i = c_i (t-s)^{2l-1+i}, l = " + std::to_string(p.l);
      break;
    }
    case PowerKind::kExampleC:
      coef = {1, 1.0 / 7, 2.0 / 21};
      power = {1, 2, 3};
      sch.k = k_family_example_c();
      sch.label = "b = (t-s, (t-s)^2/7, 2(t-s)^3/21)";
      break;
  }
  sch.ell = coef.size() - 1;
  sch.b = [=](std::size_t i, double s) { return coef[i] * std::pow(t - s, power[i]); };
  sch.db = [=](std::size_t i, double s) { return -coef[i] * power[i] * std::pow(t - s, power[i] - 1); };
  finalize_schedule(sch);
  return sch;
}

namespace {

// Dense RK4 solution of db_i/du = 2u K_i(b/u) on a uniform u grid.
struct DenseSolution {
  double u0 = 0, h = 0;
  std::size_t ell = 0;
  std::vector<double> y, dy;  // (steps+1) x ell
  std::vector<double> seed_coef, seed_power;

  void value(double u, std::vector<double>& b, std::vector<double>& db) const {
    b.assign(ell, 0.0);
    db.assign(ell, 0.0);
    if (u <= u0) {
      for (std::size_t i = 0; i < ell; ++i) {
        if (!seed_coef.empty()) {
          b[i] = seed_coef[i] * std::pow(u, seed_power[i]);
          db[i] = seed_coef[i] * seed_power[i] * std::pow(u, seed_power[i] - 1);
        } else {
          // b_i' = 2u K_i(0) to leading order from a zero start
          db[i] = dy[i] * u / u0;
          b[i] = dy[i] * u * u / (2 * u0);
        }
      }
      return;
    }
    const std::size_t n = y.size() / ell - 1;
    double x = (u - u0) / h;
    std::size_t k = std::min(static_cast<std::size_t>(x), n - 1);
    double tau = x - static_cast<double>(k);
    double h00 = (1 + 2 * tau) * (1 - tau) * (1 - tau), h10 = tau * (1 - tau) * (1 - tau);
    double h01 = tau * tau * (3 - 2 * tau), h11 = tau * tau * (tau - 1);
    double d00 = 6 * tau * tau - 6 * tau, d10 = 3 * tau * tau - 4 * tau + 1;
    double d01 = -d00, d11 = 3 * tau * tau - 2 * tau;
    for (std::size_t i = 0; i < ell; ++i) {
      double y0 = y[k * ell + i], y1 = y[(k + 1) * ell + i];
      double m0 = dy[k * ell + i] * h, m1 = dy[(k + 1) * ell + i] * h;
      b[i] = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
      db[i] = (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h;
    }
  }
};

void rhs(const KFamily& k, double u, const double* y, double* out, std::vector<double>& r) {
  for (std::size_t i = 0; i < k.ell; ++i) r[i] = y[i] / u;
  for (std::size_t i = 0; i < k.ell; ++i) out[i] = 2 * u * k.K[i + 1](r);
}

}  // namespace

Schedule solve_schedule_ode(const KFamily& k, double t, const OdeOptions& opt) {
  if (!(t > 0)) throw ScheduleError("need t > 0");
  if (k.ell == 0) throw ScheduleError("no auxiliary schedules to solve for");
  const std::size_t l = k.ell;
  auto dense = std::make_shared<DenseSolution>();
  dense->ell = l;
  dense->u0 = opt.eps_rel * t;
  dense->h = (t - dense->u0) / static_cast<double>(opt.steps);
  dense->seed_coef = opt.seed_coef;
  dense->seed_power = opt.seed_power;
  if (!opt.seed_coef.empty() && (opt.seed_coef.size() != l || opt.seed_power.size() != l))
    throw ScheduleError("seed must give one coefficient and power per auxiliary schedule");

  std::vector<double> y(l, 0.0), k1(l), k2(l), k3(l), k4(l), tmp(l), r(l);
  for (std::size_t i = 0; i < l; ++i)
    if (!opt.seed_coef.empty()) y[i] = opt.seed_coef[i] * std::pow(dense->u0, opt.seed_power[i]);
  dense->y.reserve((opt.steps + 1) * l);
  dense->dy.reserve((opt.steps + 1) * l);
  double u = dense->u0;
  const double h = dense->h;
  for (std::size_t step = 0; step <= opt.steps; ++step) {
    rhs(k, u, y.data(), k1.data(), r);
    for (std::size_t i = 0; i < l; ++i)
      if (!std::isfinite(y[i]) || !std::isfinite(k1[i]))
        throw ScheduleError("ODE solution became non-finite at s = " + format_number(t - u));
    if (step > 0) {
      for (std::size_t i = 0; i < l; ++i) r[i] = y[i] / u;
      if (opt.enforce_omega && !k.contains(r))
        throw ScheduleRejected("schedule leaves Omega at s = " + format_number(t - u), t - u);
    }
    dense->y.insert(dense->y.end(), y.begin(), y.end());
    dense->dy.insert(dense->dy.end(), k1.begin(), k1.end());
    if (step == opt.steps) break;
    for (std::size_t i = 0; i < l; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(k, u + 0.5 * h, tmp.data(), k2.data(), r);
    for (std::size_t i = 0; i < l; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(k, u + 0.5 * h, tmp.data(), k3.data(), r);
    for (std::size_t i = 0; i < l; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(k, u + h, tmp.data(), k4.data(), r);
    for (std::size_t i = 0; i < l; ++i) y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    u = dense->u0 + h * static_cast<double>(step + 1);
  }

  Schedule sch;
  sch.label = "RK4 solution of b_i' + 2 b_0 K_i(b/b_0) = 0";
  sch.t = t;
  sch.ell = l;
  sch.k = k;
  const std::size_t last = opt.steps;
  sch.b = [dense, t, l, last](std::size_t i, double s) {
    if (i == 0) return t - s;
    if (s <= 0) return dense->y[last * l + i - 1];
    std::vector<double> b, db;
    dense->value(t - s, b, db);
    return b[i - 1];
  };
  sch.db = [dense, t](std::size_t i, double s) {
    if (i == 0) return -1.0;
    std::vector<double> b, db;
    dense->value(t - s, b, db);
    return -db[i - 1];
  };
  finalize_schedule(sch);
  return sch;
}

CbResult compute_cb(const Schedule& sch, std::size_t n) {
  const double t = sch.t;
  auto phi = [&](double s) {
    if (sch.ell == 0) return sch.db(0, s) + 2 * sch.b(0, s) * sch.k.K[0](std::vector<double>{});
    return safe(sch.db(0, s) + 2 * sch.b(0, s) * sch.k.K[0](sch.ratios(s)));
  };
  std::vector<double> grid;
  for (std::size_t j = 0; j < n; ++j) grid.push_back(t * (static_cast<double>(j) + 0.5) / static_cast<double>(n));
  if (std::isfinite(phi(0.0))) grid.push_back(0.0);
  for (int e = 5; e <= 8; ++e) {
    grid.push_back(t * std::pow(10.0, -e));
    grid.push_back(t - t * std::pow(10.0, -e));
  }
  std::sort(grid.begin(), grid.end());

  CbResult out;
  std::size_t arg = 0;
  double fmin = kInf;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double v = phi(grid[j]);
    if (v < fmin) {
      fmin = v;
      arg = j;
    }
  }
  // endpoint divergence: compare the integrand deep inside both ends
  for (double sgn : {0.0, 1.0}) {
    auto at = [&](double e) { return phi(sgn == 0.0 ? t * e : t - t * e); };
    double a = at(1e-6), b = at(1e-10);
    if (b == -kInf || (b < 0 && std::abs(b) > 1e3 * (1 + std::abs(a)))) {
      out.divergent = true;
      out.value = out.lower = out.upper = kInf;
      out.s_at_inf = sgn == 0.0 ? 0.0 : t;
      return out;
    }
  }
  // golden-section refinement on the neighboring cells
  double lo = arg > 0 ? grid[arg - 1] : grid[arg] * 0.5;
  double hi = arg + 1 < grid.size() ? grid[arg + 1] : 0.5 * (grid[arg] + t);
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = phi(c), fd = phi(d);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, t); ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = phi(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = phi(d);
    }
  }
  double s_best = grid[arg];
  for (auto [s, v] : {std::pair{c, fc}, std::pair{d, fd}})
    if (v < fmin) {
      fmin = v;
      s_best = s;
    }
  out.value = -fmin;
  out.lower = -fmin;
  out.upper = -fmin + std::abs(fc - fd) + 1e-15 * std::abs(fmin);
  out.s_at_inf = s_best;
  return out;
}

double lambda_at(const KFamily& k, std::span<const double> r) {
  double lam = safe(k.K[0](r));
  for (std::size_t i = 1; i <= k.ell; ++i) lam = std::min(lam, safe(k.K[i](r) / r[i - 1]));
  return lam;
}

RateReport compute_lambda(const KFamily& k) {
  RateReport rep;
  const std::size_t l = k.ell;
  if (l == 0) {
    rep.lambda = k.K[0](std::vector<double>{});
    rep.positive = rep.lambda > 0;
    rep.trace.push_back("l = 0: lambda = K_0");
    return rep;
  }
  auto f = [&](const std::vector<double>& x) {
    std::vector<double> r(l);
    for (std::size_t i = 0; i < l; ++i) r[i] = std::exp(x[i]);
    return lambda_at(k, r);
  };
  const double lo = -12, hi = 12;
  const int per = l == 1 ? 2401 : (l == 2 ? 97 : 25);
  const double step = (hi - lo) / (per - 1);
  // coarse scan, keep the 8 best cells as starts
  std::vector<std::pair<double, std::vector<double>>> scan;
  std::vector<int> idx(l, 0);
  for (;;) {
    std::vector<double> x(l);
    for (std::size_t i = 0; i < l; ++i) x[i] = lo + step * idx[i];
    scan.emplace_back(f(x), x);
    std::size_t j = 0;
    while (j < l && ++idx[j] == per) idx[j++] = 0;
    if (j == l) break;
  }
  std::stable_sort(scan.begin(), scan.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  const std::size_t starts = std::min<std::size_t>(8, scan.size());
  double best = -kInf;
  std::vector<double> best_x;
  for (std::size_t st = 0; st < starts; ++st) {
    std::vector<double> x = scan[st].second;
    double fx = scan[st].first;
    double width = 2 * step;
    for (int sweep = 0; sweep < 200 && width > 1e-11; ++sweep) {
      double before = fx;
      for (std::size_t i = 0; i < l; ++i) {
        double a = x[i] - width, b = x[i] + width;
        const double g = (std::sqrt(5.0) - 1) / 2;
        auto at = [&](double v) {
          auto y = x;
          y[i] = v;
          return f(y);
        };
        double c = b - g * (b - a), d = a + g * (b - a), fc = at(c), fd = at(d);
        while (b - a > 1e-13) {
          if (fc > fd) {
            b = d; d = c; fd = fc; c = b - g * (b - a); fc = at(c);
          } else {
            a = c; c = d; fc = fd; d = a + g * (b - a); fd = at(d);
          }
        }
        double cand = 0.5 * (a + b), fcand = at(cand);
        if (fcand > fx) {
          x[i] = cand;
          fx = fcand;
        }
      }
      if (fx - before <= 1e-14 * std::max(1.0, std::abs(fx))) width *= 0.5;
    }
    std::ostringstream line;
    line << "start " << st << ": lambda=" << fx;
    rep.trace.push_back(line.str());
    if (fx > best) {
      best = fx;
      best_x = x;
    }
  }
  rep.lambda = best;
  for (double v : best_x) rep.r_star.push_back(std::exp(v));
  rep.positive = best > 0;
  if (!rep.positive) rep.trace.push_back("no Poincare rate from this spec (sup <= 0)");
  return rep;
}

namespace {
double endpoint_ratio(const KFamily& k, double t) {
  OdeOptions o;
  o.enforce_omega = false;
  o.steps = 4096;
  auto sch = solve_schedule_ode(k, t, o);
  double b0 = sch.b(0, 0), b1 = sch.b(1, 0), b2 = sch.b(2, 0);
  return b1 * b1 / (b0 * b2);
}
}  // namespace

ThetaResult find_t_theta(double theta, const KFamily& k) {
  if (k.ell != 2) throw ScheduleError("find_t_theta needs a two-parameter family");
  ThetaResult res;
  res.theta = theta;
  const double lim = endpoint_ratio(k, 1e-4);
  res.feasible_lo = std::sqrt(lim);
  // Omega boundary along the trajectory
  auto in_omega = [&](double t) {
    OdeOptions o;
    o.enforce_omega = false;
    o.steps = 4096;
    auto sch = solve_schedule_ode(k, t, o);
    return k.contains(std::vector<double>{sch.b(1, 0) / t, sch.b(2, 0) / t});
  };
  double a = 1e-4, b = 1.0;
  while (in_omega(b) && b < 1e3) b *= 2;
  if (in_omega(b)) {
    res.feasible_hi = kInf;
  } else {
    for (int it = 0; it < 80; ++it) {
      double m = 0.5 * (a + b);
      (in_omega(m) ? a : b) = m;
    }
    res.feasible_hi = std::sqrt(endpoint_ratio(k, a));
  }
  auto range = [&]() {
    std::ostringstream os;
    os << "(" << res.feasible_lo << ", " << res.feasible_hi << ")";
    return os.str();
  };
  if (!(theta * theta > lim) || !(theta < res.feasible_hi))
    throw ScheduleError("theta = " + format_number(theta) + " outside the feasible range " + range() +
                        " (stated range (3/2, 2))");
  double hi = 1.0;
  while (endpoint_ratio(k, hi) < theta * theta) hi *= 2;
  res.monotone = true;
  double prev = 0;
  for (int j = 0; j <= 64; ++j) {
    double tt = 1e-3 * std::pow(hi / 1e-3, j / 64.0);
    double v = endpoint_ratio(k, tt);
    if (v < prev * (1 - 1e-12)) res.monotone = false;
    prev = v;
  }
  if (!res.monotone) throw ScheduleError("ratio is not monotone in t; bisection would be unsound");
  double lo = 1e-4;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    double m = 0.5 * (lo + hi);
    (endpoint_ratio(k, m) < theta * theta ? lo : hi) = m;
  }
  res.t_theta = 0.5 * (lo + hi);
  res.residual = endpoint_ratio(k, res.t_theta) - theta * theta;
  return res;
}

double harnack_exponent(const std::function<double(double)>& gamma, double rho, double alpha) {
  if (!(alpha > 1)) throw ScheduleError("need alpha > 1");
  if (rho == 0.0) return 0.0;
  if (!(rho > 0)) throw ScheduleError("need rho >= 0");
  auto integrand = [&](double s) {
    const double q = 1 + (alpha - 1) * s;
    double v = alpha * rho / q * gamma((alpha - 1) / (q * rho));
    if (!std::isfinite(v)) throw ScheduleError("non-integrable gamma: integrand not finite at s = " + format_number(s));
    return v;
  };
  double err = 0;
  double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, 1.0, 15, 1e-14, &err);
  if (!std::isfinite(val) || err > 1e-10) throw ScheduleError("Harnack exponent quadrature did not converge");
  return val;
}

}  // namespace subcurv
