#pragma once

// Semigroup evaluation: Euler-Maruyama Monte Carlo for any generator, and
// exact Gaussian laws for the Kolmogorov and Ornstein-Uhlenbeck models.
//
// Convention: L = sum_i X_i^2 + X_0 (no factor 1/2), so the SDE is
//   dZ = (X_0 + sum_i (X_i . grad) X_i)(Z) dt + sqrt(2) sum_i X_i(Z) dB^i.

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "subcurv/compiled.hpp"
#include "subcurv/gamma.hpp"

namespace subcurv {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MCConfig {
  std::size_t paths = 200000;
  double dt = 0.0;          // 0 means t / steps
  std::size_t steps = 2048;  // used when dt == 0
  std::uint64_t seed = 1;
  bool antithetic = false;
  bool parallel = true;
};

struct MCEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t paths = 0;
  std::size_t excluded = 0;
};

/// A smooth test function with its gradient.
struct TestFunction {
  std::string name;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> grad;
  double lower_bound = -std::numeric_limits<double>::infinity();  // inf of f
  bool positive = false;  // f > 0 everywhere (entropy and Harnack need it)
};

/// X_0 + sum_i (X_i . grad) X_i
FieldVector ito_drift(const OperatorSpec& op);

/// Endpoints of `rows` paths in `dim` coordinates, row-major; excluded paths are NaN rows.
struct Endpoints {
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::vector<double> data;
  std::vector<std::uint8_t> valid;
  std::size_t excluded = 0;

  [[nodiscard]] std::span<const double> row(std::size_t p) const { return {data.data() + p * dim, dim}; }
};

/// Per-path RNG seed: deterministic in (seed, stream), independent of thread layout.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

class SdeModel {
 public:
  explicit SdeModel(const OperatorSpec& op);
  [[nodiscard]] std::size_t dim() const { return dim_; }

  /// Simulates every start with the same Brownian increments (common random numbers).
  /// Throws SimError if more than 0.1% of the paths of any start go non-finite.
  [[nodiscard]] std::vector<Endpoints> simulate(const std::vector<std::vector<double>>& starts, double t,
                                                const MCConfig& cfg) const;

 private:
  void run_path(const std::vector<std::vector<double>>& starts, double t, std::size_t steps,
                const MCConfig& cfg, std::size_t path, std::vector<Endpoints>& out) const;

  std::size_t dim_ = 0;
  std::vector<std::vector<CompiledPoly>> fields_;
  std::vector<CompiledPoly> drift_;
  std::vector<std::vector<int>> const_field_;  // 1 if the component is constant
};

Endpoints simulate(const OperatorSpec& op, std::span<const double> z0, double t, const MCConfig& cfg);

/// Mean and standard error of g over the valid rows.
MCEstimate mc_mean(const Endpoints& e, const std::function<double(std::span<const double>)>& g);

struct GaussianLaw {
  std::vector<double> mean;
  std::vector<std::vector<double>> cov;
};

/// Law of (x_t, y_t) for L = d_xx + x d_y started at z0.
GaussianLaw kolmogorov_law(std::span<const double> z0, double t);
/// Law of x_t for L = d_xx - rho x d_x started at x0.
GaussianLaw ou_law(double x0, double rho, double t);

/// E[g(Z)] for a Gaussian law via tensorized Gauss-Hermite with `nodes` per axis.
double gaussian_expectation(const GaussianLaw& law, const std::function<double(std::span<const double>)>& g,
                            std::size_t nodes = 64);

enum class Method { kMC, kGaussQuadrature, kOUMehler };

Method parse_method(const std::string& s);
std::string method_name(Method m);

/// Exact semigroup for the Gaussian models. `model` is "kolmogorov" or "ou";
/// `rho` is used by "ou".
double semigroup_exact(const std::string& model, Method m, const std::function<double(std::span<const double>)>& g,
                       std::span<const double> z0, double t, double rho = 1.0);

/// Gradient of P_t f at z0 by differentiating under the Gaussian law
/// (the endpoint is affine in the start point).
std::vector<double> semigroup_gradient_exact(const std::string& model, const TestFunction& f,
                                             std::span<const double> z0, double t, double rho = 1.0);

/// Per-path samples for the MC derivative estimators: f at the start's
/// endpoint and central differences with step h per coordinate (CRN).
struct DerivativeSamples {
  std::vector<double> f;                   // f(Z)
  std::vector<std::vector<double>> grad;   // per coordinate (f(Z+) - f(Z-)) / 2h
  std::size_t valid = 0;
};

DerivativeSamples derivative_samples(const SdeModel& model, const TestFunction& f, std::span<const double> z0,
                                     double t, const MCConfig& cfg, double h = -1.0);

/// Binary columnar dump: "SCEP", u32 version, u64 rows, u64 cols, then float64 columns.
void write_endpoints(const std::string& path, const Endpoints& e);
Endpoints read_endpoints(const std::string& path);

}  // namespace subcurv
