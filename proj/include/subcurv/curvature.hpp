#pragma once

// Generalized curvature condition
//   Gamma_2 + sum_i r_i Gamma_2^(i) >= sum_i K_i(r) Gamma^(i)
// as a point- and r-dependent quadratic form in the order-1 and order-2 jets.

#include <functional>
#include <string>
#include <vector>

#include "subcurv/compiled.hpp"
#include "subcurv/gamma.hpp"
#include "subcurv/rexpr.hpp"

namespace subcurv {

class CurvatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CurvatureSpec {
  std::string name;
  OperatorSpec op;
  std::vector<SquareField> aux;  // Gamma^(1)..Gamma^(l); Gamma^(0) is carre_du_champ(op)
  KFamily k;
  Expression W;
  std::vector<bool> periodic;  // coordinates on a circle (skipped by compactness checks)
  std::vector<double> omega_witness;

  [[nodiscard]] std::size_t ell() const { return aux.size(); }
  /// Throws CurvatureError on inconsistent sizes or an Omega witness outside Omega.
  void validate() const;
};

/// Symbolic preprocessing shared by every sweep over one spec.
struct PreparedSpec {
  std::vector<JetSymbol> basis;       // f_x.. then f_xx..
  std::vector<SquareField> fields;    // Gamma^(0..l)
  std::vector<JetForm> gamma;         // Gamma^(i)(f)
  std::vector<JetForm> gamma2;        // Gamma_2^(i)(f)
  std::vector<QuadraticJetMatrix> A;  // matrices of gamma2
  std::vector<QuadraticJetMatrix> B;  // matrices of gamma
  std::vector<bool> active;           // coordinates that appear in any coefficient
  std::size_t dim = 0;

  static PreparedSpec build(const CurvatureSpec& spec);
};

/// D(x; r) = Gamma_2 + sum r_i Gamma_2^(i) - sum K_i(r) Gamma^(i). The double
/// values r and K_i(r) enter as exact rationals. Throws if r is outside Omega.
JetForm difference_form(const CurvatureSpec& spec, std::span<const double> r);
JetForm difference_form(const PreparedSpec& prep, const KFamily& k, std::span<const double> r);

struct GridSpec {
  int per_axis = 21;
  double half_width = 3.0;
  bool scale_probes = true;  // |x| in {10, 100, 1000} along every axis and diagonal
  int r_per_axis = 9;
  double r_lo = 1e-2;
  double r_hi = 1e2;

  [[nodiscard]] std::string describe() const;
};

/// Points of the default grid; inactive coordinates are pinned to 0.
std::vector<std::vector<double>> sweep_points(const PreparedSpec& prep, const GridSpec& g);
/// Log-spaced r values intersected with Omega (a single empty vector when l = 0).
std::vector<std::vector<double>> sweep_r_values(const KFamily& k, const GridSpec& g);

struct PSDCell {
  std::size_t point = 0;
  std::size_t r = 0;
  double min_eig = 0.0;  // absolute
  double scale = 1.0;    // max(1, max |M_ij|)
  bool converged = true;
};

struct PSDReport {
  std::string grid;
  std::size_t n_points = 0;
  std::size_t n_r = 0;
  double tolerance = 1e-8;
  double global_min = 0.0;      // min over cells of min_eig / scale
  double global_min_abs = 0.0;  // unscaled eigenvalue at the same cell
  std::vector<double> argmin_point;
  std::vector<double> argmin_r;
  std::size_t nonconverged = 0;
  bool pass = false;
  std::vector<PSDCell> cells;  // filled only on request
};

struct SweepOptions {
  double tol = 1e-8;
  bool keep_cells = false;
  bool parallel = true;
};

/// Minimum eigenvalue of D at every (point, r). PASS iff every cell converged
/// and min_eig >= -tol * max(1, max|M_ij|).
PSDReport psd_sweep(const PreparedSpec& prep, const KFamily& k,
                    const std::vector<std::vector<double>>& points,
                    const std::vector<std::vector<double>>& rs, const SweepOptions& opt = {});
PSDReport psd_sweep(const CurvatureSpec& spec, const GridSpec& g = {}, const SweepOptions& opt = {});

/// Minimum eigenvalue of D at one cell (absolute), for probes.
double min_eigenvalue(const PreparedSpec& prep, const KFamily& k, std::span<const double> point,
                      std::span<const double> r);

struct ConstantSearch {
  bool found = false;
  double alpha = 0.0;
  double beta = 0.0;
  PSDReport report;
  std::vector<std::string> log;
};

/// Largest beta on the ladder 2^0, 2^-1, ..., 2^-10 admitting some alpha, and the
/// smallest such alpha (log grid 2^-10..2^10, then 20 bisection steps). Assumes
/// feasibility is monotone increasing in alpha.
ConstantSearch search_constants(const PreparedSpec& prep,
                                const std::function<KFamily(double alpha, double beta)>& family,
                                const GridSpec& g = {});

/// Largest shift delta in [lo, hi] such that K_index + delta still passes (bisection from lo, or
/// from 0 when lo fails); NaN if no shift in the range passes.
double maximal_shift(const PreparedSpec& prep, const KFamily& k, std::size_t index, double lo,
                     double hi, const GridSpec& g = {}, int steps = 40);

struct CompactReport {
  double c_lw = 0.0;        // max LW / W on grid and probes
  double c_gamma = 0.0;     // max sum_i |Gamma^(i)(W)| / W^2
  double growth_lw = 1.0;   // ratio at |x| = 1000 over the rest
  double growth_gamma = 1.0;
  bool bounded = true;
  bool compact = true;      // W grows along every non-periodic direction
  bool w_at_least_one = true;
  bool pass = false;
  std::string detail;
};

CompactReport verify_compact_function(const CurvatureSpec& spec, const GridSpec& g = {});

struct FuzzReport {
  std::size_t samples = 0;
  double min_margin = 0.0;
  std::vector<double> argmin;  // x, r, a, b, c, g, h, q, s
  bool pass = false;
};

/// Samples abstract jet tuples for the flat-fiber product model and evaluates
/// Gamma_2 + r Gamma_2^(1) - Gamma^(1) - (K0(r) + k0_shift) Gamma in long double.
FuzzReport fuzz_example_a(double K, double m, double r0, std::size_t samples, std::uint64_t seed,
                          double k0_shift = 0.0);

}  // namespace subcurv
