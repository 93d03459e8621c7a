#pragma once

// Batch front end: gamma2, check, schedule, verify, report and export.
//
// Exit status: 0 when every verdict is PASS, SKIPPED or INCONCLUSIVE, 1 on any
// FAIL (the failing cases are listed on stderr), 2 on usage or configuration
// errors.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "subcurv/catalog.hpp"
#include "subcurv/verify.hpp"

namespace subcurv {

struct SuiteOptions {
  std::vector<std::string> ineqs;  // empty: all
  std::vector<double> ts;          // empty: entry default
  std::vector<double> alphas;      // empty: entry default
  std::string schedule;            // empty: the entry's first schedule
  std::uint64_t seed = 1;
  std::size_t paths = 0;  // 0: entry default
  std::size_t steps = 0;
  std::size_t poincare_samples = 200000;
};

inline const std::vector<std::string>& known_inequalities() {
  static const std::vector<std::string> k{"grad-variance", "grad-entropy", "harnack", "log-harnack",
                                          "harnack-sqrt",  "decay",        "poincare"};
  return k;
}

/// Every inequality case for one entry, in a fixed order. Exact backends run
/// the cases in parallel; the result order never depends on the thread layout.
std::vector<InequalityCase> run_verify_suite(const CatalogEntry& e, const SuiteOptions& o,
                                             std::vector<RayleighRow>* rows = nullptr);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace subcurv
