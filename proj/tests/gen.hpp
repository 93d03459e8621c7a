#pragma once

// Small hand-rolled generators for property tests.

#include <random>
#include <vector>

#include "subcurv/expr.hpp"

namespace gen {

using subcurv::Expression;
using subcurv::Monomial;
using subcurv::Rational;

inline Rational small_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-9, 9), den(1, 5);
  return Rational(num(rng), den(rng));
}

/// Random polynomial in `vars` coordinates with up to `terms` terms of degree <= max_deg.
inline Expression polynomial(std::mt19937_64& rng, std::size_t vars, int max_deg, int terms = 5) {
  std::uniform_int_distribution<int> deg(0, max_deg);
  Expression e;
  for (int k = 0; k < terms; ++k) {
    std::vector<int> exps(vars, 0);
    int budget = deg(rng);
    for (int b = 0; b < budget; ++b) exps[std::uniform_int_distribution<std::size_t>(0, vars - 1)(rng)]++;
    Rational c = small_rational(rng);
    c.canonicalize();
    e += Expression::monomial(Monomial(exps), c);
  }
  return e;
}

inline std::vector<double> point(std::mt19937_64& rng, std::size_t vars, double lo = -2, double hi = 2) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> p(vars);
  for (auto& v : p) v = u(rng);
  return p;
}

}  // namespace gen
