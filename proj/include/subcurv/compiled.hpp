#pragma once

// Flattened double-precision evaluators for Expressions and quadratic jet
// forms. The exact objects stay the source of truth; these exist for the
// sweep and simulation inner loops.

#include <span>
#include <vector>

#include "subcurv/expr.hpp"
#include "subcurv/jet.hpp"

namespace subcurv {

class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const Expression& e);

  [[nodiscard]] double operator()(std::span<const double> x) const;
  [[nodiscard]] long double eval_long(std::span<const long double> x) const;
  [[nodiscard]] bool is_zero() const { return coef_.empty(); }
  /// Highest coordinate index referenced plus one.
  [[nodiscard]] std::size_t arity() const { return arity_; }
  [[nodiscard]] bool uses(std::size_t var) const;

 private:
  struct Factor {
    std::uint32_t var;
    std::int32_t exp;
  };
  std::vector<double> coef_;
  std::vector<std::uint32_t> start_;  // factor range of term k: [start_[k], start_[k+1])
  std::vector<Factor> factors_;
  std::size_t arity_ = 0;
};

/// Quadratic form in a fixed jet basis: sum over entries M_pq s_p s_q with
/// polynomial entries (off-diagonal monomials split evenly between M_pq and M_qp).
class QuadraticJetMatrix {
 public:
  struct Entry {
    std::size_t p, q;
    Expression exact;
    CompiledPoly poly;
  };

  QuadraticJetMatrix() = default;
  /// Throws ExprError if the form has a term that is not quadratic in `basis`.
  QuadraticJetMatrix(const JetForm& form, const std::vector<JetSymbol>& basis);

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }
  /// Dense row-major n*n matrix at a point.
  void fill(std::span<const double> point, std::span<double> out) const;
  [[nodiscard]] bool uses(std::size_t var) const;

 private:
  std::size_t n_ = 0;
  std::vector<Entry> entries_;
};

}  // namespace subcurv
