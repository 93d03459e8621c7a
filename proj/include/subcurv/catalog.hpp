#pragma once

// Built-in models: Kolmogorov, Grushin (l = 1..3), the three-dimensional
// step-three example, the product model with a flat circle fiber, and the
// Ornstein-Uhlenbeck reference.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "subcurv/curvature.hpp"
#include "subcurv/schedule.hpp"
#include "subcurv/sim.hpp"
#include "subcurv/verify.hpp"

namespace subcurv {

class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Where an expected value comes from: quoted from the source text, elementary
/// by inspection, or computed by this code (search, fit, closed-form derivation).
enum class Provenance { kReference, kElementary, kComputed };

std::string provenance_name(Provenance p);

struct Expected {
  std::string quantity;
  std::string value;
  Provenance source = Provenance::kReference;
  std::string note;
};

/// A displayed Gamma_2^(index) formula and whether the engine agrees with it.
struct Display {
  std::size_t index = 0;
  std::string label;
  std::string text;  // jet-form syntax
  bool expected_match = true;
  std::string note;
};

struct ScheduleChoice {
  std::string id;
  std::function<Schedule(double t)> build;
};

/// The gradient lower form and distance used by the Harnack checks at horizon t.
struct HarnackData {
  std::string id;
  std::function<GradientForm(const VerifyContext&, double t)> form;
  DistanceRule distance;
  std::function<double(double t)> c_b;
};

struct CatalogEntry {
  std::string id;
  std::string title;
  int l = 0;
  CurvatureSpec spec;
  std::vector<Display> displays;
  /// Alternative readings of an ambiguous printed field; gamma2 reports Gamma_2 of each.
  std::vector<SquareField> display_variants;
  std::vector<Expected> expected;
  std::vector<ScheduleChoice> schedules;  // the first one is the default
  std::optional<HarnackData> harnack;
  MeasureSampler sampler;                 // invariant measure, if known
  std::vector<TestFunction> battery;
  std::vector<TestFunction> rayleigh_family;
  std::vector<std::vector<double>> starts;
  Backend backend;
  GridSpec grid;
  double lambda_hint = 0.0;  // closed-form Poincare rate when known

  // Grushin only
  double alpha = 0.0, beta = 0.0;
  std::vector<std::string> search_log;
  double c0_fit = 0.0;
  double growth_exponent = 0.0;

  [[nodiscard]] VerifyContext context() const;
  [[nodiscard]] const ScheduleChoice& schedule(const std::string& id = "") const;
  /// psd_sweep and verify_compact_function on the default grids; throws CatalogError on failure.
  void validate() const;
};

/// Known ids: kolmogorov, kolmogorov-stated, grushin (with l), exampleC, exampleA, ou.
CatalogEntry get(const std::string& id, int l = 1);
std::vector<std::string> catalog_ids();

/// Gaussian(0, 1/r0) in x times uniform on the circle in y.
MeasureSampler example_a_measure_sampler(double K, double r0);

/// Test functions built from polynomials over the given coordinates.
TestFunction polynomial_function(std::string name, const Coordinates& c, const std::string& text,
                                 double lower_bound = -std::numeric_limits<double>::infinity());
TestFunction exp_function(std::string name, const Coordinates& c, const std::string& exponent);
/// 1 + g^2 for a polynomial g; bounded below by 1.
TestFunction one_plus_square(std::string name, const Coordinates& c, const std::string& g);

/// Stored constants of the Grushin family per l (search output rounded up).
struct GrushinConstants {
  double alpha;
  double beta;
};
GrushinConstants grushin_constants(int l);

/// theta used for the Kolmogorov gradient and Harnack bounds.
inline constexpr double kKolmogorovTheta = 1.9;

}  // namespace subcurv
