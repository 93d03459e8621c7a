#include "subcurv/curvature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace subcurv {

void CurvatureSpec::validate() const {
  op.validate();
  const std::size_t d = op.dimension();
  for (const auto& sf : aux)
    if (sf.dimension() != d) throw CurvatureError("auxiliary field " + sf.name() + " has wrong dimension");
  if (k.ell != ell()) throw CurvatureError("K family has l = " + std::to_string(k.ell) +
                                           " but there are " + std::to_string(ell()) + " auxiliary fields");
  if (k.K.size() != ell() + 1) throw CurvatureError("need K_0..K_l");
  if (!periodic.empty() && periodic.size() != d) throw CurvatureError("periodic flags have wrong size");
  if (!k.contains(omega_witness)) throw CurvatureError("Omega witness is not in Omega");
}

PreparedSpec PreparedSpec::build(const CurvatureSpec& spec) {
  spec.validate();
  PreparedSpec p;
  p.dim = spec.op.dimension();
  p.basis = jet_basis(p.dim);
  p.fields.push_back(carre_du_champ(spec.op));
  for (const auto& sf : spec.aux) p.fields.push_back(sf);
  for (const auto& sf : p.fields) {
    p.gamma.push_back(sf.diagonal());
    p.gamma2.push_back(subcurv::gamma2(sf, spec.op).form);
    p.A.emplace_back(p.gamma2.back(), p.basis);
    p.B.emplace_back(p.gamma.back(), p.basis);
  }
  p.active.assign(p.dim, false);
  for (std::size_t v = 0; v < p.dim; ++v)
    for (std::size_t i = 0; i < p.A.size(); ++i)
      if (p.A[i].uses(v) || p.B[i].uses(v)) p.active[v] = true;
  return p;
}

JetForm difference_form(const PreparedSpec& prep, const KFamily& k, std::span<const double> r) {
  if (!k.contains(r)) throw CurvatureError("r is outside Omega (" + k.omega_text() + ")");
  const auto kv = k.evaluate(r);
  JetForm d = prep.gamma2[0] - JetForm(Expression(Rational(kv[0]))) * prep.gamma[0];
  for (std::size_t i = 1; i < prep.fields.size(); ++i) {
    d += JetForm(Expression(Rational(r[i - 1]))) * prep.gamma2[i];
    d -= JetForm(Expression(Rational(kv[i]))) * prep.gamma[i];
  }
  return d;
}

JetForm difference_form(const CurvatureSpec& spec, std::span<const double> r) {
  return difference_form(PreparedSpec::build(spec), spec.k, r);
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os << "[-" << half_width << "," << half_width << "]^d with " << per_axis << " points/axis"
     << (scale_probes ? " + probes at |x| in {10,100,1000}" : "") << "; r log-grid [" << r_lo
     << "," << r_hi << "]^l with " << r_per_axis << " points/axis intersected with Omega";
  return os.str();
}

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1);
  return v;
}

// All points of axis^k over the chosen coordinates, other coordinates zero.
void product(const std::vector<std::size_t>& coords, const std::vector<double>& axis, std::size_t dim,
             std::vector<std::vector<double>>& out) {
  std::vector<double> p(dim, 0.0);
  std::vector<std::size_t> idx(coords.size(), 0);
  for (;;) {
    for (std::size_t j = 0; j < coords.size(); ++j) p[coords[j]] = axis[idx[j]];
    out.push_back(p);
    std::size_t j = 0;
    while (j < idx.size() && ++idx[j] == axis.size()) idx[j++] = 0;
    if (j == idx.size()) break;
  }
}

// Directions in {-1,0,1}^coords minus the origin, scaled by s.
void probes(const std::vector<std::size_t>& coords, std::size_t dim, double s,
            std::vector<std::vector<double>>& out) {
  std::vector<std::vector<double>> tmp;
  product(coords, {-s, 0.0, s}, dim, tmp);
  for (auto& p : tmp)
    if (std::any_of(p.begin(), p.end(), [](double v) { return v != 0.0; })) out.push_back(std::move(p));
}

std::vector<std::size_t> active_list(const std::vector<bool>& active) {
  std::vector<std::size_t> c;
  for (std::size_t v = 0; v < active.size(); ++v)
    if (active[v]) c.push_back(v);
  return c;
}

struct PointResult {
  double rel = std::numeric_limits<double>::infinity();
  double abs = 0.0;
  std::size_t r = 0;
  std::size_t nonconverged = 0;
};

}  // namespace

std::vector<std::vector<double>> sweep_points(const PreparedSpec& prep, const GridSpec& g) {
  std::vector<std::vector<double>> pts;
  auto coords = active_list(prep.active);
  product(coords, linspace(-g.half_width, g.half_width, g.per_axis), prep.dim, pts);
  if (g.scale_probes && !coords.empty())
    for (double s : {10.0, 100.0, 1000.0}) probes(coords, prep.dim, s, pts);
  return pts;
}

std::vector<std::vector<double>> sweep_r_values(const KFamily& k, const GridSpec& g) {
  if (k.ell == 0) return {{}};
  std::vector<double> axis(static_cast<std::size_t>(g.r_per_axis));
  for (int i = 0; i < g.r_per_axis; ++i)
    axis[static_cast<std::size_t>(i)] =
        g.r_per_axis == 1 ? g.r_lo
                          : std::exp(std::log(g.r_lo) + (std::log(g.r_hi) - std::log(g.r_lo)) * i / (g.r_per_axis - 1));
  std::vector<std::size_t> coords(k.ell);
  for (std::size_t i = 0; i < k.ell; ++i) coords[i] = i;
  std::vector<std::vector<double>> all, out;
  product(coords, axis, k.ell, all);
  for (auto& r : all)
    if (k.contains(r)) out.push_back(std::move(r));
  return out;
}

PSDReport psd_sweep(const PreparedSpec& prep, const KFamily& k,
                    const std::vector<std::vector<double>>& points,
                    const std::vector<std::vector<double>>& rs, const SweepOptions& opt) {
  if (rs.empty()) throw CurvatureError("r grid has no point inside Omega");
  if (k.K.size() != prep.fields.size()) throw CurvatureError("K family does not match the spec");
  for (const auto& r : rs)
    if (!k.contains(r)) throw CurvatureError("r grid point outside Omega");

  const std::size_t n = prep.basis.size(), nf = prep.fields.size();
  std::vector<std::vector<double>> kvals(rs.size());
  for (std::size_t j = 0; j < rs.size(); ++j) kvals[j] = k.evaluate(rs[j]);

  std::vector<PointResult> results(points.size());
  std::vector<PSDCell> cells(opt.keep_cells ? points.size() * rs.size() : 0);

  auto kernel = [&](std::size_t pi) {
    std::vector<double> a(nf * n * n), b(nf * n * n);
    for (std::size_t i = 0; i < nf; ++i) {
      prep.A[i].fill(points[pi], std::span<double>(a.data() + i * n * n, n * n));
      prep.B[i].fill(points[pi], std::span<double>(b.data() + i * n * n, n * n));
    }
    Eigen::MatrixXd m(n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(static_cast<Eigen::Index>(n));
    PointResult best;
    for (std::size_t j = 0; j < rs.size(); ++j) {
      double scale = 1.0;
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
          std::size_t e = p * n + q;
          double v = a[e] - kvals[j][0] * b[e];
          for (std::size_t i = 1; i < nf; ++i) v += rs[j][i - 1] * a[i * n * n + e] - kvals[j][i] * b[i * n * n + e];
          m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = v;
          scale = std::max(scale, std::abs(v));
        }
      es.compute(m, Eigen::EigenvaluesOnly);
      bool ok = es.info() == Eigen::Success && std::isfinite(es.eigenvalues()(0));
      double ev = ok ? es.eigenvalues()(0) : std::numeric_limits<double>::quiet_NaN();
      if (!ok) ++best.nonconverged;
      if (opt.keep_cells) cells[pi * rs.size() + j] = {pi, j, ev, scale, ok};
      if (ok && ev / scale < best.rel) best = {ev / scale, ev, j, best.nonconverged};
    }
    results[pi] = best;
  };

  const auto np = static_cast<long>(points.size());
  if (opt.parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (long pi = 0; pi < np; ++pi) kernel(static_cast<std::size_t>(pi));
  } else {
    for (long pi = 0; pi < np; ++pi) kernel(static_cast<std::size_t>(pi));
  }

  PSDReport rep;
  rep.n_points = points.size();
  rep.n_r = rs.size();
  rep.tolerance = opt.tol;
  rep.global_min = std::numeric_limits<double>::infinity();
  std::size_t arg_p = 0, arg_r = 0;
  for (std::size_t pi = 0; pi < results.size(); ++pi) {
    rep.nonconverged += results[pi].nonconverged;
    if (results[pi].rel < rep.global_min) {
      rep.global_min = results[pi].rel;
      rep.global_min_abs = results[pi].abs;
      arg_p = pi;
      arg_r = results[pi].r;
    }
  }
  if (!points.empty()) {
    rep.argmin_point = points[arg_p];
    rep.argmin_r = rs[arg_r];
  }
  rep.pass = rep.nonconverged == 0 && rep.global_min >= -opt.tol;
  rep.cells = std::move(cells);
  return rep;
}

PSDReport psd_sweep(const CurvatureSpec& spec, const GridSpec& g, const SweepOptions& opt) {
  auto prep = PreparedSpec::build(spec);
  auto rep = psd_sweep(prep, spec.k, sweep_points(prep, g), sweep_r_values(spec.k, g), opt);
  rep.grid = g.describe();
  return rep;
}

double min_eigenvalue(const PreparedSpec& prep, const KFamily& k, std::span<const double> point,
                      std::span<const double> r) {
  std::vector<std::vector<double>> pts{std::vector<double>(point.begin(), point.end())};
  std::vector<std::vector<double>> rs{std::vector<double>(r.begin(), r.end())};
  return psd_sweep(prep, k, pts, rs, {.tol = 0.0, .keep_cells = false, .parallel = false}).global_min_abs;
}

ConstantSearch search_constants(const PreparedSpec& prep,
                                const std::function<KFamily(double, double)>& family,
                                const GridSpec& g) {
  ConstantSearch out;
  const auto pts = sweep_points(prep, g);
  for (int kb = 0; kb <= 10; ++kb) {
    const double beta = std::ldexp(1.0, -kb);
    const auto rs = sweep_r_values(family(1.0, beta), g);
    auto feasible = [&](double alpha) {
      return psd_sweep(prep, family(alpha, beta), pts, rs).pass;
    };
    double lo = 0.0, hi = 0.0;
    bool found = false;
    for (int e = -10; e <= 10; ++e) {
      double a = std::ldexp(1.0, e);
      if (feasible(a)) {
        hi = a;
        lo = e > -10 ? std::ldexp(1.0, e - 1) : 0.0;
        found = true;
        break;
      }
    }
    std::ostringstream line;
    line << "beta=" << format_number(beta);
    if (!found) {
      line << ": no alpha in [2^-10, 2^10]";
      out.log.push_back(line.str());
      continue;
    }
    for (int s = 0; s < 20; ++s) {
      double mid = 0.5 * (lo + hi);
      if (feasible(mid)) hi = mid;
      else lo = mid;
    }
    line << ": alpha=" << format_number(hi) << " (infeasible below " << format_number(lo) << ")";
    out.log.push_back(line.str());
    out.found = true;
    out.alpha = hi;
    out.beta = beta;
    out.report = psd_sweep(prep, family(hi, beta), pts, rs);
    out.report.grid = g.describe();
    return out;
  }
  out.log.push_back("no feasible (alpha, beta) on the search range");
  return out;
}

double maximal_shift(const PreparedSpec& prep, const KFamily& k, std::size_t index, double lo,
                     double hi, const GridSpec& g, int steps) {
  const auto pts = sweep_points(prep, g);
  const auto rs = sweep_r_values(k, g);
  auto feasible = [&](double delta) {
    KFamily kk = k;
    kk.K.at(index) = k.K.at(index).shifted(delta);
    return psd_sweep(prep, kk, pts, rs).pass;
  };
  if (feasible(hi)) return hi;
  // with an indefinite Gamma^(i) the feasible shifts can shrink to the point 0
  if (!feasible(lo)) {
    if (lo >= 0 || !feasible(0.0)) return std::numeric_limits<double>::quiet_NaN();
    lo = 0.0;
  }
  for (int s = 0; s < steps; ++s) {
    double mid = 0.5 * (lo + hi);
    if (feasible(mid)) lo = mid;
    else hi = mid;
  }
  return lo;
}

CompactReport verify_compact_function(const CurvatureSpec& spec, const GridSpec& g) {
  spec.validate();
  const std::size_t d = spec.op.dimension();
  CompactReport rep;
  CompiledPoly w(spec.W), lw(spec.op.apply(spec.W));
  std::vector<CompiledPoly> gw;
  gw.emplace_back(carre_du_champ(spec.op).bilinear(spec.W, spec.W));
  for (const auto& sf : spec.aux) gw.emplace_back(sf.bilinear(spec.W, spec.W));

  std::vector<std::size_t> all(d), open;
  for (std::size_t v = 0; v < d; ++v) {
    all[v] = v;
    if (spec.periodic.empty() || !spec.periodic[v]) open.push_back(v);
  }
  std::vector<std::vector<double>> grid, near, far;
  product(all, linspace(-g.half_width, g.half_width, g.per_axis), d, grid);
  for (double s : {10.0, 100.0}) probes(open, d, s, near);
  probes(open, d, 1000.0, far);

  double wmin = std::numeric_limits<double>::infinity();
  auto ratios = [&](const std::vector<double>& p, double& rl, double& rg) {
    double wv = w(p);
    wmin = std::min(wmin, wv);
    rl = lw(p) / wv;
    double s = 0.0;
    for (const auto& q : gw) s += std::abs(q(p));
    rg = s / (wv * wv);
  };
  double near_l = 0.0, near_g = 0.0, far_l = 0.0, far_g = 0.0, mid_l = 0.0, mid_g = 0.0;
  double rl = 0.0, rg = 0.0;
  for (const auto& p : grid) {
    ratios(p, rl, rg);
    near_l = std::max(near_l, rl);
    near_g = std::max(near_g, rg);
  }
  const double w_grid_min = wmin;
  for (const auto& p : near) {
    ratios(p, rl, rg);
    mid_l = std::max(mid_l, rl);
    mid_g = std::max(mid_g, rg);
  }
  for (const auto& p : far) {
    ratios(p, rl, rg);
    far_l = std::max(far_l, rl);
    far_g = std::max(far_g, rg);
  }
  rep.c_lw = std::max({near_l, mid_l, far_l});
  rep.c_gamma = std::max({near_g, mid_g, far_g});
  const double floor = 1e-9;
  rep.growth_lw = far_l / std::max({near_l, mid_l, floor});
  rep.growth_gamma = far_g / std::max({near_g, mid_g, floor});
  rep.bounded = std::isfinite(rep.c_lw) && std::isfinite(rep.c_gamma) && rep.growth_lw <= 4.0 &&
                rep.growth_gamma <= 4.0;
  rep.w_at_least_one = w_grid_min >= 1.0 - 1e-12;

  // compactness: W must keep growing along every non-periodic direction
  std::vector<std::vector<double>> dirs;
  probes(open, d, 1.0, dirs);
  std::ostringstream why;
  for (const auto& v : dirs) {
    std::vector<double> p100(d), p1000(d);
    for (std::size_t j = 0; j < d; ++j) {
      p100[j] = 100.0 * v[j];
      p1000[j] = 1000.0 * v[j];
    }
    if (!(w(p1000) >= 5.0 * w(p100))) {
      rep.compact = false;
      why << "W does not grow along direction (";
      for (std::size_t j = 0; j < d; ++j) why << (j ? "," : "") << v[j];
      why << "); ";
      break;
    }
  }
  if (open.empty()) rep.compact = false;
  if (!rep.bounded) why << "ratio growth at |x|=1000 (LW/W x" << rep.growth_lw << ", Gamma(W)/W^2 x" << rep.growth_gamma << "); ";
  if (!rep.w_at_least_one) why << "W < 1 on the grid (min " << w_grid_min << "); ";
  rep.pass = rep.bounded && rep.compact && rep.w_at_least_one;
  rep.detail = why.str();
  return rep;
}

FuzzReport fuzz_example_a(double K, double m, double r0, std::size_t samples, std::uint64_t seed,
                          double k0_shift) {
  using LD = long double;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> nrm(0.0, 1.0);
  auto logu = [&](double lo, double hi) { return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * u01(rng)); };

  FuzzReport rep;
  rep.samples = samples;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    LD x, r, a, b, c, gv, h, q, s;
    r = logu(1e-2, 1e2);
    const int kind = static_cast<int>(k % 4);
    x = (u01(rng) < 0.5 ? -1 : 1) * (kind == 3 ? logu(1e-3, 1e-1) : logu(1e-3, 1e1));
    h = 2.0 * nrm(rng);
    q = 2.0 * nrm(rng);
    s = kind >= 2 ? 0.0 : nrm(rng);
    if (kind <= 1) {
      a = u01(rng) < 0.1 ? 0.0 : 5.0 * u01(rng);
      c = 5.0 * u01(rng);
      LD cs = std::sqrt(a * c);
      b = kind == 1 ? (u01(rng) < 0.5 ? -cs : cs) : cs * (2.0 * u01(rng) - 1.0);
      gv = K * a + q * q / m + 2.0 * u01(rng);
    } else {
      // equality case of every step in the proof chain
      if (u01(rng) < 0.2) h = 0.0;
      a = u01(rng) < 0.2 ? 0.0 : 2.0 * u01(rng) / (x * x);
      LD sc = 2.0 * std::abs(x) * std::sqrt(a) / (2.0 * x * x + r);
      c = sc * sc;
      b = -(x > 0 ? 1 : -1) * std::sqrt(a * c);
      q = x * h * m / (x * x * x * x + r * x * x);
      gv = K * a + q * q / m;
    }
    const LD x2 = x * x;
    const LD g2 = s * s + (1 - r0 * x2) * a + 4 * x * b + 2 * x2 * c + x2 * x2 * gv - 2 * x * h * q + r0 * h * h;
    const LD g21 = x2 * gv + c;
    const LD k0 = std::min<LD>(r0 - m / r, K * r - r0 - 4 / r) + k0_shift;
    const LD margin = g2 + r * g21 - a - k0 * (h * h + x2 * a);
    if (static_cast<double>(margin) < rep.min_margin) {
      rep.min_margin = static_cast<double>(margin);
      rep.argmin = {double(x), double(r), double(a), double(b), double(c), double(gv), double(h), double(q), double(s)};
    }
  }
  rep.pass = rep.min_margin >= -1e-9;
  return rep;
}

}  // namespace subcurv
