#include "subcurv/sim.hpp"

#include <Eigen/Cholesky>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "subcurv/quadrature.hpp"

namespace subcurv {

FieldVector ito_drift(const OperatorSpec& op) {
  op.validate();
  FieldVector out = op.drift;
  const std::size_t d = op.dimension();
  for (const auto& x : op.fields)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t j = 0; j < d; ++j)
        if (!x[j].is_zero()) out[a] += x[j] * x[a].differentiate(j);
  return out;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over the pair
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SdeModel::SdeModel(const OperatorSpec& op) : dim_(op.dimension()) {
  for (const auto& x : op.fields) {
    std::vector<CompiledPoly> f;
    std::vector<int> c;
    for (const auto& e : x) {
      f.emplace_back(e);
      c.push_back(e.is_constant() ? 1 : 0);
    }
    fields_.push_back(std::move(f));
    const_field_.push_back(std::move(c));
  }
  for (const auto& e : ito_drift(op)) drift_.emplace_back(e);
}

void SdeModel::run_path(const std::vector<std::vector<double>>& starts, double t, std::size_t steps,
                        const MCConfig& cfg, std::size_t path, std::vector<Endpoints>& out) const {
  const std::size_t stream = cfg.antithetic ? path / 2 : path;
  const double sign = cfg.antithetic && (path & 1) ? -1.0 : 1.0;
  std::mt19937_64 rng(stream_seed(cfg.seed, stream));
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t ns = starts.size(), nf = fields_.size();
  const double dt = t / static_cast<double>(steps), sq = std::sqrt(2.0 * dt);
  std::vector<double> z(ns * dim_), dz(dim_), xi(nf);
  for (std::size_t s = 0; s < ns; ++s) std::copy(starts[s].begin(), starts[s].end(), z.begin() + s * dim_);
  // constant components, evaluated once
  std::vector<double> cvals(nf * dim_, 0.0);
  const std::vector<double> origin(dim_, 0.0);
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t a = 0; a < dim_; ++a)
      if (const_field_[i][a]) cvals[i * dim_ + a] = fields_[i][a](origin);

  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t i = 0; i < nf; ++i) xi[i] = sign * normal(rng);
    for (std::size_t s = 0; s < ns; ++s) {
      std::span<const double> zs(z.data() + s * dim_, dim_);
      for (std::size_t a = 0; a < dim_; ++a) {
        double v = drift_[a].is_zero() ? 0.0 : drift_[a](zs) * dt;
        for (std::size_t i = 0; i < nf; ++i) {
          double c = const_field_[i][a] ? cvals[i * dim_ + a] : fields_[i][a](zs);
          v += sq * c * xi[i];
        }
        dz[a] = v;
      }
      for (std::size_t a = 0; a < dim_; ++a) z[s * dim_ + a] += dz[a];
    }
  }
  for (std::size_t s = 0; s < ns; ++s) {
    bool ok = true;
    for (std::size_t a = 0; a < dim_; ++a) ok = ok && std::isfinite(z[s * dim_ + a]);
    double* dst = out[s].data.data() + path * dim_;
    for (std::size_t a = 0; a < dim_; ++a) dst[a] = ok ? z[s * dim_ + a] : std::numeric_limits<double>::quiet_NaN();
    out[s].valid[path] = ok ? 1 : 0;
  }
}

std::vector<Endpoints> SdeModel::simulate(const std::vector<std::vector<double>>& starts, double t,
                                          const MCConfig& cfg) const {
  if (!(t > 0)) throw SimError("need t > 0");
  if (cfg.paths == 0) throw SimError("need at least one path");
  if (cfg.dt < 0) throw SimError("need dt > 0");
  for (const auto& s : starts)
    if (s.size() != dim_) throw SimError("start point has the wrong dimension");
  if (cfg.dt == 0 && cfg.steps == 0) throw SimError("need dt > 0 or steps > 0");
  const double dt = cfg.dt > 0 ? cfg.dt : t / static_cast<double>(cfg.steps);
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t / dt - 1e-9)));
  std::vector<Endpoints> out(starts.size());
  for (auto& e : out) {
    e.dim = dim_;
    e.rows = cfg.paths;
    e.data.assign(cfg.paths * dim_, 0.0);
    e.valid.assign(cfg.paths, 0);
  }
  const auto n = static_cast<long>(cfg.paths);
  if (cfg.parallel) {
#pragma omp parallel for schedule(static)
    for (long p = 0; p < n; ++p) run_path(starts, t, steps, cfg, static_cast<std::size_t>(p), out);
  } else {
    for (long p = 0; p < n; ++p) run_path(starts, t, steps, cfg, static_cast<std::size_t>(p), out);
  }
  for (auto& e : out) {
    e.excluded = 0;
    for (auto v : e.valid) e.excluded += v ? 0 : 1;
    if (static_cast<double>(e.excluded) > 1e-3 * static_cast<double>(e.rows))
      throw SimError("estimate rejected: " + std::to_string(e.excluded) + " of " + std::to_string(e.rows) +
                     " paths became non-finite");
  }
  return out;
}

Endpoints simulate(const OperatorSpec& op, std::span<const double> z0, double t, const MCConfig& cfg) {
  SdeModel m(op);
  return m.simulate({std::vector<double>(z0.begin(), z0.end())}, t, cfg).front();
}

MCEstimate mc_mean(const Endpoints& e, const std::function<double(std::span<const double>)>& g) {
  MCEstimate est;
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (std::size_t p = 0; p < e.rows; ++p) {
    if (!e.valid[p]) continue;
    double v = g(e.row(p));
    ++n;
    double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
  }
  est.mean = mean;
  est.paths = n;
  est.excluded = e.excluded;
  est.se = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return est;
}

GaussianLaw kolmogorov_law(std::span<const double> z0, double t) {
  GaussianLaw law;
  law.mean = {z0[0], z0[1] + z0[0] * t};
  law.cov = {{2 * t, t * t}, {t * t, 2 * t * t * t / 3}};
  return law;
}

GaussianLaw ou_law(double x0, double rho, double t) {
  GaussianLaw law;
  law.mean = {x0 * std::exp(-rho * t)};
  double var = rho == 0.0 ? 2 * t : -std::expm1(-2 * rho * t) / rho;
  law.cov = {{var}};
  return law;
}

double gaussian_expectation(const GaussianLaw& law, const std::function<double(std::span<const double>)>& g,
                            std::size_t nodes) {
  const std::size_t d = law.mean.size();
  Eigen::MatrixXd cov(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = law.cov[a][b];
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw SimError("covariance is not positive definite");
  Eigen::MatrixXd L = llt.matrixL();
  const auto& rule = gauss_hermite(nodes);
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> z(d);
  double acc = 0.0;
  for (;;) {
    double w = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
      double v = law.mean[a];
      for (std::size_t b = 0; b <= a; ++b)
        v += L(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * rule.nodes[idx[b]];
      z[a] = v;
      w *= rule.weights[idx[a]];
    }
    acc += w * g(z);
    std::size_t j = 0;
    while (j < d && ++idx[j] == nodes) idx[j++] = 0;
    if (j == d) break;
  }
  return acc;
}

Method parse_method(const std::string& s) {
  if (s == "mc") return Method::kMC;
  if (s == "gauss-quadrature") return Method::kGaussQuadrature;
  if (s == "ou-mehler") return Method::kOUMehler;
  throw SimError("unknown method \"" + s + "\"");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::kMC: return "mc";
    case Method::kGaussQuadrature: return "gauss-quadrature";
    case Method::kOUMehler: return "ou-mehler";
  }
  return "?";
}

double semigroup_exact(const std::string& model, Method m, const std::function<double(std::span<const double>)>& g,
                       std::span<const double> z0, double t, double rho) {
  if (model == "kolmogorov" && m == Method::kGaussQuadrature) {
    if (t == 0) return g(z0);
    return gaussian_expectation(kolmogorov_law(z0, t), g);
  }
  if (model == "ou" && m == Method::kOUMehler) {
    if (t == 0) return g(z0);
    return gaussian_expectation(ou_law(z0[0], rho, t), g, 96);
  }
  throw SimError("method " + method_name(m) + " is not available for operator \"" + model + "\"");
}

std::vector<double> semigroup_gradient_exact(const std::string& model, const TestFunction& f,
                                             std::span<const double> z0, double t, double rho) {
  if (model == "kolmogorov") {
    // d(endpoint)/dx0 = (1, t), d(endpoint)/dy0 = (0, 1)
    auto gx = [&](std::span<const double> z) {
      double gr[2];
      f.grad(z, gr);
      return gr[0] + t * gr[1];
    };
    auto gy = [&](std::span<const double> z) {
      double gr[2];
      f.grad(z, gr);
      return gr[1];
    };
    if (t == 0) return {gx(z0), gy(z0)};
    auto law = kolmogorov_law(z0, t);
    return {gaussian_expectation(law, gx), gaussian_expectation(law, gy)};
  }
  if (model == "ou") {
    auto gx = [&](std::span<const double> z) {
      double gr[1];
      f.grad(z, gr);
      return gr[0];
    };
    if (t == 0) return {gx(z0)};
    return {std::exp(-rho * t) * gaussian_expectation(ou_law(z0[0], rho, t), gx, 96)};
  }
  throw SimError("no exact gradient for operator \"" + model + "\"");
}

DerivativeSamples derivative_samples(const SdeModel& model, const TestFunction& f, std::span<const double> z0,
                                     double t, const MCConfig& cfg, double h) {
  const std::size_t d = model.dim();
  if (h <= 0) {
    double n2 = 0;
    for (double v : z0) n2 += v * v;
    h = 1e-3 * (1 + std::sqrt(n2));
  }
  std::vector<std::vector<double>> starts{std::vector<double>(z0.begin(), z0.end())};
  for (std::size_t j = 0; j < d; ++j)
    for (double sg : {1.0, -1.0}) {
      auto s = starts[0];
      s[j] += sg * h;
      starts.push_back(s);
    }
  auto ends = model.simulate(starts, t, cfg);
  DerivativeSamples out;
  out.grad.resize(d);
  for (std::size_t p = 0; p < cfg.paths; ++p) {
    bool ok = true;
    for (const auto& e : ends) ok = ok && e.valid[p];
    if (!ok) continue;
    out.f.push_back(f.value(ends[0].row(p)));
    for (std::size_t j = 0; j < d; ++j)
      out.grad[j].push_back((f.value(ends[1 + 2 * j].row(p)) - f.value(ends[2 + 2 * j].row(p))) / (2 * h));
  }
  out.valid = out.f.size();
  return out;
}

void write_endpoints(const std::string& path, const Endpoints& e) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw SimError("cannot open " + path);
  const char magic[4] = {'S', 'C', 'E', 'P'};
  const std::uint32_t version = 1;
  const std::uint64_t rows = e.rows, cols = e.dim;
  os.write(magic, 4);
  os.write(reinterpret_cast<const char*>(&version), sizeof version);
  os.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  os.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  for (std::size_t c = 0; c < e.dim; ++c)
    for (std::size_t r = 0; r < e.rows; ++r) os.write(reinterpret_cast<const char*>(&e.data[r * e.dim + c]), sizeof(double));
  if (!os) throw SimError("write failed for " + path);
}

Endpoints read_endpoints(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SimError("cannot open " + path);
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t rows = 0, cols = 0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&version), sizeof version);
  is.read(reinterpret_cast<char*>(&rows), sizeof rows);
  is.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!is || std::memcmp(magic, "SCEP", 4) != 0 || version != 1) throw SimError("not an endpoint file: " + path);
  Endpoints e;
  e.dim = cols;
  e.rows = rows;
  e.data.resize(rows * cols);
  e.valid.assign(rows, 1);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r) is.read(reinterpret_cast<char*>(&e.data[r * cols + c]), sizeof(double));
  if (!is) throw SimError("truncated endpoint file: " + path);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (!std::isfinite(e.data[r * cols + c])) e.valid[r] = 0;
  for (auto v : e.valid) e.excluded += v ? 0 : 1;
  return e;
}

}  // namespace subcurv
