#pragma once

// Real-valued expressions in the curvature parameters r1..rl, used for the
// rate functions K_i(r) and the admissible set Omega.

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace subcurv {

class RExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Infix expression over r1..rl with + - * / ^ and min(a,b), max(a,b), sqrt(a).
/// When l == 1 the bare name "r" is accepted for r1.
class RExpression {
 public:
  RExpression() : RExpression(0.0) {}
  explicit RExpression(double constant);
  static RExpression parse(std::string_view text, std::size_t ell);

  [[nodiscard]] double operator()(std::span<const double> r) const;
  [[nodiscard]] const std::string& text() const { return text_; }
  [[nodiscard]] std::size_t ell() const { return ell_; }
  /// Same expression plus a constant; used for strictness and monotonicity probes.
  [[nodiscard]] RExpression shifted(double c) const;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  std::size_t ell_ = 0;
};

/// One constraint lhs <= rhs of Omega, accepted with margin 1e-12 * max(1, |rhs|).
struct OmegaConstraint {
  RExpression lhs;
  RExpression rhs;
};

/// K_0..K_l together with Omega (implicitly intersected with r_i > 0).
struct KFamily {
  std::size_t ell = 0;
  std::vector<RExpression> K;
  std::vector<OmegaConstraint> omega;

  [[nodiscard]] bool contains(std::span<const double> r) const;
  [[nodiscard]] std::vector<double> evaluate(std::span<const double> r) const;
  [[nodiscard]] std::string omega_text() const;
};

/// Shortest round-trip decimal for embedding numbers in expression text.
std::string format_number(double v);

}  // namespace subcurv
