#pragma once

// Numeric certification of the gradient, Harnack, decay and Poincare
// inequalities derived from the curvature condition.
//
// Every case carries margin = RHS - LHS and an uncertainty u; it passes iff
// margin >= -3u and is flagged inconclusive when |margin| < u.

#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "subcurv/compiled.hpp"
#include "subcurv/gamma.hpp"
#include "subcurv/schedule.hpp"
#include "subcurv/sim.hpp"

namespace subcurv {

class VerifyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Absolute uncertainty assigned to quadrature-evaluated quantities.
inline constexpr double kQuadratureUncertainty = 1e-8;

struct InequalityCase {
  std::string ineq;  // grad-variance, grad-entropy, harnack, log-harnack, harnack-sqrt, decay, poincare
  std::string op_id;
  std::string schedule_id;
  std::string test_function;
  std::string method;
  std::vector<double> x;
  std::vector<double> y;
  double t = 0.0;
  double alpha = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double uncertainty = 0.0;
  bool pass = false;
  bool inconclusive = false;
  bool skipped = false;
  std::string note;

  /// PASS, FAIL, INCONCLUSIVE or SKIPPED.
  [[nodiscard]] std::string verdict() const;
  /// Sets pass and inconclusive from margin and uncertainty.
  void settle();
};

InequalityCase skipped_case(std::string ineq, std::string op_id, std::string why);

/// Closed-form squared intrinsic distance between two points at horizon t.
struct DistanceRule {
  std::string name;
  std::function<double(std::span<const double>, std::span<const double>, double)> squared;
};

/// rho^2 = sum_j (z_j - w_j)^2 / weight_j(t) for Gamma_b = sum_j weight_j(t) f_j^2.
DistanceRule diagonal_distance(std::string name, std::function<std::vector<double>(double)> weights);

/// How P_t is evaluated for one operator.
struct Backend {
  std::string model;  // "kolmogorov" or "ou" for the exact methods
  Method method = Method::kMC;
  double rho = 1.0;
  std::shared_ptr<const SdeModel> sde;
  MCConfig mc;
};

/// A quantity whose mean is estimated: P_t h at a start, or d/dz_j P_t h.
struct Quantity {
  std::size_t start = 0;
  int coord = -1;
  std::function<double(std::span<const double>)> h;
  /// gradient of h; required for exact derivatives
  std::function<void(std::span<const double>, std::span<double>)> grad;
};

/// Means of several quantities with the covariance of the estimator.
struct Moments {
  std::vector<double> mean;
  std::vector<std::vector<double>> cov;
  double floor = 0.0;  // absolute uncertainty of exact methods
  std::size_t paths = 0;
  std::size_t excluded = 0;
};

/// Evaluates all quantities with common random numbers across starts.
Moments estimate(const Backend& b, const std::vector<std::vector<double>>& starts, double t,
                 const std::vector<Quantity>& q);

/// Delta-method standard error of G(mean), never below the floor.
double delta_uncertainty(const Moments& m, const std::function<double(std::span<const double>)>& G);

/// Operator data shared by every check.
struct VerifyContext {
  std::string op_id;
  OperatorSpec op;
  std::vector<SquareField> fields;  // Gamma^(0..l)
  bool commutes = false;            // check_commutation holds for every auxiliary field
  Backend backend;

  /// Gamma^(i)(u)(z) for a gradient u at z.
  [[nodiscard]] double field_value(std::size_t i, std::span<const double> z, std::span<const double> u) const;
  void compile();

 private:
  std::vector<std::vector<std::vector<CompiledPoly>>> compiled_;
};

VerifyContext make_context(std::string op_id, const OperatorSpec& op, std::vector<SquareField> aux, Backend b);

/// Lower side of a gradient inequality as a function of the point and grad P_t f.
using GradientForm = std::function<double(std::span<const double>, std::span<const double>)>;

/// sum_i b_i(0) Gamma^(i) at horizon sch.t.
GradientForm schedule_form(const VerifyContext& ctx, const Schedule& sch);

InequalityCase check_grad_variance(const VerifyContext& ctx, const GradientForm& form, double c_b,
                                   const TestFunction& f, std::span<const double> z, double t,
                                   const std::string& schedule_id);

/// Refused (skipped) unless ctx.commutes.
InequalityCase check_grad_entropy(const VerifyContext& ctx, const GradientForm& form, double c_b,
                                  const TestFunction& f, std::span<const double> z, double t,
                                  const std::string& schedule_id);

/// Log-scale Harnack inequality with power alpha > 1; exponent from harnack_exponent.
InequalityCase check_harnack(const VerifyContext& ctx, const DistanceRule& rule, double c_b, double alpha,
                             const TestFunction& f, std::span<const double> x, std::span<const double> y,
                             double t, const std::string& schedule_id);

/// P_t log f(x) <= log P_t f(y) + c_b rho^2 / 4; f must be bounded below by a positive constant.
InequalityCase check_log_harnack(const VerifyContext& ctx, const DistanceRule& rule, double c_b,
                                 const TestFunction& f, std::span<const double> x, std::span<const double> y,
                                 double t, const std::string& schedule_id);

/// P_t f(x) <= P_t f(y) + c_b rho sqrt(P_t f^2(x)).
InequalityCase check_harnack_sqrt(const VerifyContext& ctx, const DistanceRule& rule, double c_b,
                                  const TestFunction& f, std::span<const double> x, std::span<const double> y,
                                  double t, const std::string& schedule_id);

/// sum_i r_i Gamma^(i)(P_t f) <= exp(-2 lambda t) sum_i r_i P_t Gamma^(i)(f), r_0 = 1.
InequalityCase check_decay(const VerifyContext& ctx, std::span<const double> r, double lambda,
                           const TestFunction& f, std::span<const double> z, double t);

using MeasureSampler = std::function<std::vector<double>(std::mt19937_64&)>;

struct RayleighRow {
  std::string test_function;
  double quotient = 0.0;
  double se = 0.0;
};

/// min over the family of mu(Gamma(f)) / Var_mu(f); skipped when lambda <= 0.
InequalityCase check_poincare_rayleigh(const VerifyContext& ctx, double lambda, const MeasureSampler& mu,
                                       const std::vector<TestFunction>& family, std::size_t samples,
                                       std::uint64_t seed, std::vector<RayleighRow>* rows = nullptr);

}  // namespace subcurv
