#pragma once

// Exact multivariate polynomials over point coordinates.
//
// Coordinates are addressed by index; a Coordinates table maps indices to
// single-letter names for parsing and printing. Coefficients are exact
// rationals (GMP), so algebraic identities are decided by equality.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace subcurv {

using Rational = mpq_class;

class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered list of single-letter coordinate names, e.g. {"x", "y"}.
class Coordinates {
 public:
  Coordinates() = default;
  explicit Coordinates(std::vector<std::string> names);

  [[nodiscard]] std::size_t size() const { return names_.size(); }
  [[nodiscard]] const std::string& name(std::size_t i) const { return names_.at(i); }
  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }
  /// Index of `name`; throws ExprError if unknown.
  [[nodiscard]] std::size_t index(std::string_view name) const;
  [[nodiscard]] bool contains(std::string_view name) const;

  friend bool operator==(const Coordinates&, const Coordinates&) = default;

 private:
  std::vector<std::string> names_;
};

/// Exponent vector with trailing zeros trimmed, so equal monomials compare equal.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exps);
  static Monomial variable(std::size_t var, int power = 1);

  [[nodiscard]] int exponent(std::size_t var) const {
    return var < exps_.size() ? exps_[var] : 0;
  }
  [[nodiscard]] const std::vector<int>& exponents() const { return exps_; }
  [[nodiscard]] int degree() const;
  [[nodiscard]] bool is_one() const { return exps_.empty(); }

  Monomial operator*(const Monomial& o) const;

  friend auto operator<=>(const Monomial&, const Monomial&) = default;

 private:
  void trim();
  std::vector<int> exps_;
};

/// Checked exponent addition; overflow is an error rather than wraparound.
int checked_add(int a, int b);

class Expression {
 public:
  using TermMap = std::map<Monomial, Rational>;

  Expression() = default;
  Expression(long value);  // NOLINT(google-explicit-constructor)
  Expression(const Rational& value);  // NOLINT(google-explicit-constructor)
  static Expression variable(std::size_t var);
  static Expression monomial(const Monomial& m, const Rational& c);

  [[nodiscard]] const TermMap& terms() const { return terms_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] bool is_constant() const;
  /// Constant term (zero if absent).
  [[nodiscard]] Rational constant() const;
  [[nodiscard]] int degree() const;
  /// Number of coordinates the expression may reference (max index + 1).
  [[nodiscard]] std::size_t arity() const;

  Expression& operator+=(const Expression& o);
  Expression& operator-=(const Expression& o);
  Expression& operator*=(const Expression& o);
  friend Expression operator+(Expression a, const Expression& b) { return a += b; }
  friend Expression operator-(Expression a, const Expression& b) { return a -= b; }
  friend Expression operator*(const Expression& a, const Expression& b);
  Expression operator-() const;
  [[nodiscard]] Expression pow(int n) const;

  friend bool operator==(const Expression&, const Expression&) = default;

  /// Exact partial derivative with respect to coordinate `var`.
  [[nodiscard]] Expression differentiate(std::size_t var) const;
  /// Substitute an exact value for one coordinate.
  [[nodiscard]] Expression substitute(std::size_t var, const Rational& value) const;

  [[nodiscard]] double evaluate(std::span<const double> point) const;
  [[nodiscard]] Rational evaluate_exact(std::span<const Rational> point) const;

  [[nodiscard]] std::string to_string(const Coordinates& coords) const;

 private:
  void add_term(const Monomial& m, const Rational& c);
  TermMap terms_;
};

/// Partial derivative by coordinate name; unknown names raise ExprError.
Expression differentiate(const Expression& e, const Coordinates& coords, std::string_view coord);

/// Parse "x^2*y - 3/2" style infix. Division is allowed by constants only.
Expression parse_expression(std::string_view text, const Coordinates& coords);

std::string rational_to_string(const Rational& q);

/// Vector of expressions, one per coordinate (a vector field's components).
using FieldVector = std::vector<Expression>;

}  // namespace subcurv
