#pragma once

// Schedules b_0..b_l on [0, t], the constant c_b, the Poincare rate and the
// Harnack exponent integral.
//
// Throughout, u = t - s is the time to the horizon; b_0 is t - s unless a
// closed form says otherwise.

#include <functional>
#include <string>
#include <vector>

#include "subcurv/rexpr.hpp"

namespace subcurv {

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The ODE trajectory left Omega; `exit_s` is the first grid time outside.
class ScheduleRejected : public ScheduleError {
 public:
  ScheduleRejected(const std::string& what, double exit_s) : ScheduleError(what), exit_s(exit_s) {}
  double exit_s;
};

struct CbResult {
  double value = 0.0;  // c_b
  double lower = 0.0;  // bracket [lower, upper]
  double upper = 0.0;
  double s_at_inf = 0.0;
  bool divergent = false;
};

struct Schedule {
  std::string label;
  double t = 0.0;
  std::size_t ell = 0;
  KFamily k;
  /// b_i(s) and b_i'(s) (derivative in s).
  std::function<double(std::size_t, double)> b;
  std::function<double(std::size_t, double)> db;
  CbResult cb;
  bool omega_ok = true;
  bool positive = true;
  std::vector<double> residual_min;  // per i = 1..l, min over the dense grid of condition(i, s)
  std::vector<double> residual_max_abs;

  /// b_i'(s) + 2 b_0(s) K_i(b_1/b_0, ..., b_l/b_0)(s)
  [[nodiscard]] double condition(std::size_t i, double s) const;
  /// (b_1/b_0, ..., b_l/b_0)(s)
  [[nodiscard]] std::vector<double> ratios(double s) const;
};

/// Fills omega_ok, positive, residuals and cb on a dense grid of `n` interior points.
void finalize_schedule(Schedule& sch, std::size_t n = 10000);

/// Closed-form schedule for K_0 = rho1 - kappa/r, K_1 = rho2.
Schedule make_schedule_two_rate(double rho1, double rho2, double kappa, double t);

enum class PowerKind { kExampleA, kGrushin, kExampleC };

struct PowerParams {
  // example A
  double K = 0.0, m = 2.0, r0 = 1.0;
  // Grushin
  int l = 1;
  double alpha = 1.0, beta = 1.0;
  bool stated_k0 = false;  // see k_family_grushin
};

/// Power schedules b_i = c_i (t-s)^{p_i} with the matching K family.
Schedule make_schedule_powers(PowerKind kind, const PowerParams& p, double t);
/// c_i = 2 beta c_{i-1} / (2l-1+i), c_0 = 1.
std::vector<double> grushin_coefficients(int l, double beta);

struct OdeOptions {
  std::size_t steps = 8192;
  double eps_rel = 1e-8;
  /// Optional seed b_i(eps) = coef_i * eps^power_i for i = 1..l (zero seed if empty).
  std::vector<double> seed_coef;
  std::vector<double> seed_power;
  bool enforce_omega = true;
};

/// Backward RK4 solve of b_i'(s) + 2 b_0 K_i(b/b_0) = 0 with b_0 = t - s, b_i(t) = 0.
Schedule solve_schedule_ode(const KFamily& k, double t, const OdeOptions& opt = {});

/// c_b = -inf_{(0,t)} {b_0' + 2 b_0 K_0(b/b_0)}: grid of n points, points clustered
/// near s = t, golden-section refinement; +inf if the integrand diverges at an endpoint.
CbResult compute_cb(const Schedule& sch, std::size_t n = 10000);

struct RateReport {
  double lambda = 0.0;
  std::vector<double> r_star;
  bool positive = false;
  std::vector<std::string> trace;
};

/// sup over r in (0,inf)^l of min_i K_i(r)/r_i (r_0 = 1); multi-start coordinate ascent in log r.
RateReport compute_lambda(const KFamily& k);
/// min_i K_i(r)/r_i
double lambda_at(const KFamily& k, std::span<const double> r);

struct ThetaResult {
  double theta = 0.0;
  double t_theta = 0.0;
  double residual = 0.0;       // ratio(t_theta) - theta^2
  double feasible_lo = 0.0;    // small-t limit of sqrt(ratio)
  double feasible_hi = 0.0;    // Omega boundary
  double stated_lo = 1.5;
  double stated_hi = 2.0;
  bool monotone = false;
};

/// Root of b_1(0)^2 / (b_0(0) b_2(0)) = theta^2 over t for the ODE schedule of `k`
/// (the ratio is nondecreasing in t; checked before bisection).
ThetaResult find_t_theta(double theta, const KFamily& k);

/// int_0^1 alpha rho / (1 + (alpha-1)s) * gamma((alpha-1) / ((1 + (alpha-1)s) rho)) ds
double harnack_exponent(const std::function<double(double)>& gamma, double rho, double alpha);

}  // namespace subcurv
