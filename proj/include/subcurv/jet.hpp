#pragma once

// Polynomials in formal jet symbols f_alpha with Expression coefficients.
//
// A jet symbol stands for a partial derivative of the test function f at a
// point. Mixed partials are identified by storing only the multi-index.
// Jet order (|alpha|) is capped at 3.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "subcurv/expr.hpp"

namespace subcurv {

inline constexpr int kMaxJetOrder = 3;

class JetSymbol {
 public:
  JetSymbol() = default;  // the function itself, f
  explicit JetSymbol(std::vector<int> multi_index);
  /// f_{x_a}
  static JetSymbol first(std::size_t a);
  /// f_{x_a x_b}
  static JetSymbol second(std::size_t a, std::size_t b);
  /// Symbol from a name such as "f_xy" (or "f" for order 0).
  static JetSymbol parse(std::string_view name, const Coordinates& coords);

  [[nodiscard]] const std::vector<int>& multi_index() const { return alpha_; }
  [[nodiscard]] int order() const;
  [[nodiscard]] int count(std::size_t var) const {
    return var < alpha_.size() ? alpha_[var] : 0;
  }
  /// f_{alpha + e_var}; throws if the result would exceed kMaxJetOrder.
  [[nodiscard]] JetSymbol raised(std::size_t var) const;
  [[nodiscard]] std::string name(const Coordinates& coords) const;

  friend auto operator<=>(const JetSymbol&, const JetSymbol&) = default;

 private:
  std::vector<int> alpha_;
};

/// Sorted multiset of jet symbols.
class JetMonomial {
 public:
  JetMonomial() = default;
  explicit JetMonomial(std::vector<JetSymbol> symbols);

  [[nodiscard]] const std::vector<JetSymbol>& symbols() const { return symbols_; }
  [[nodiscard]] int degree() const { return static_cast<int>(symbols_.size()); }
  [[nodiscard]] int max_order() const;
  JetMonomial operator*(const JetMonomial& o) const;
  /// Monomial with the k-th symbol replaced by `s` (re-sorted).
  [[nodiscard]] JetMonomial replaced(std::size_t k, const JetSymbol& s) const;

  friend auto operator<=>(const JetMonomial&, const JetMonomial&) = default;

 private:
  std::vector<JetSymbol> symbols_;
};

/// Assignment of numeric values to jet symbols.
using JetValues = std::map<JetSymbol, double>;

class JetForm {
 public:
  using TermMap = std::map<JetMonomial, Expression>;

  JetForm() = default;
  JetForm(const Expression& scalar);  // NOLINT(google-explicit-constructor)
  JetForm(const Rational& scalar) : JetForm(Expression(scalar)) {}  // NOLINT
  static JetForm symbol(const JetSymbol& s);
  static JetForm term(const JetMonomial& m, const Expression& c);

  [[nodiscard]] const TermMap& terms() const { return terms_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] int max_order() const;
  [[nodiscard]] int max_degree() const;
  /// True iff every term has jet degree exactly `d`.
  [[nodiscard]] bool is_homogeneous(int d) const;
  /// Coefficient of a monomial (zero Expression if absent).
  [[nodiscard]] Expression coefficient(const JetMonomial& m) const;
  /// Terms containing at least one symbol of the given order.
  [[nodiscard]] JetForm terms_with_order(int order) const;
  /// Every jet symbol appearing in the form.
  [[nodiscard]] std::vector<JetSymbol> symbols() const;

  JetForm& operator+=(const JetForm& o);
  JetForm& operator-=(const JetForm& o);
  friend JetForm operator+(JetForm a, const JetForm& b) { return a += b; }
  friend JetForm operator-(JetForm a, const JetForm& b) { return a -= b; }
  friend JetForm operator*(const JetForm& a, const JetForm& b);
  JetForm operator-() const;
  [[nodiscard]] JetForm pow(int n) const;
  friend bool operator==(const JetForm&, const JetForm&) = default;

  /// Total derivative d/dx_var: acts on coefficients and maps f_a to f_{a+e_var}.
  [[nodiscard]] JetForm total_derivative(std::size_t var) const;

  [[nodiscard]] double evaluate(std::span<const double> point, const JetValues& jet) const;
  [[nodiscard]] std::string to_string(const Coordinates& coords) const;

 private:
  void add_term(const JetMonomial& m, const Expression& c);
  TermMap terms_;
};

/// Apply the derivation sum_j X_j d/dx_j to a jet polynomial.
/// The target must have jet order <= 2 so that the result stays within order 3.
JetForm apply_field(const FieldVector& field, const JetForm& target);

/// Evaluate a jet form; every symbol and coordinate present must be assigned.
double eval_jetform(const JetForm& q, std::span<const double> point, const JetValues& jet);

/// Parse infix text where identifiers "f_..." are jet symbols and single
/// letters are coordinates, e.g. "f_xx^2 + x^2*f_y^2".
JetForm parse_jetform(std::string_view text, const Coordinates& coords);

/// Canonical ordering of order-1 then order-2 symbols in `dim` coordinates:
/// f_x, f_y, ..., f_xx, f_xy, ..., f_yy, ...
std::vector<JetSymbol> jet_basis(std::size_t dim);

}  // namespace subcurv
