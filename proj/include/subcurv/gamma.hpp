#pragma once

// Square fields and Bakry-Emery operators of sum-of-squares generators
//   L = sum_i X_i^2 + X_0.

#include <optional>
#include <string>
#include <vector>

#include "subcurv/expr.hpp"
#include "subcurv/jet.hpp"

namespace subcurv {

class GammaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Generator given by vector fields X_1..X_n and a drift X_0 on R^d.
struct OperatorSpec {
  Coordinates coords;
  std::vector<FieldVector> fields;
  FieldVector drift;

  [[nodiscard]] std::size_t dimension() const { return coords.size(); }
  /// Throws GammaError unless every vector has `dimension()` entries.
  void validate() const;

  /// L applied to a jet polynomial (uses apply_field twice per X_i).
  [[nodiscard]] JetForm apply(const JetForm& target) const;
  /// L applied to a concrete polynomial.
  [[nodiscard]] Expression apply(const Expression& g) const;
};

using ExprMatrix = std::vector<std::vector<Expression>>;

/// Symmetric bilinear differential form Gamma(f, g) = sum_ab M_ab f_a g_b.
/// Signed (indefinite) matrices are allowed.
class SquareField {
 public:
  SquareField() = default;
  SquareField(std::string name, ExprMatrix matrix);
  static SquareField zero(std::string name, std::size_t dim);

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] const ExprMatrix& matrix() const { return m_; }
  [[nodiscard]] std::size_t dimension() const { return m_.size(); }
  [[nodiscard]] bool is_zero() const;

  /// Gamma(F, G) for jet polynomials F, G (total derivatives on both).
  [[nodiscard]] JetForm bilinear(const JetForm& f, const JetForm& g) const;
  /// Gamma(u, w) for concrete polynomials.
  [[nodiscard]] Expression bilinear(const Expression& u, const Expression& w) const;
  /// Diagonal Gamma(f) in jet symbols: sum_ab M_ab f_a f_b.
  [[nodiscard]] JetForm diagonal() const;

  /// Same form after permuting coordinates: new index k holds old perm[k].
  [[nodiscard]] SquareField permuted(const std::vector<std::size_t>& perm) const;

 private:
  std::string name_;
  ExprMatrix m_;
};

struct Gamma2Form {
  SquareField base;
  JetForm form;
};

SquareField carre_du_champ(const OperatorSpec& op);

/// 1/2 L Gamma(f) - Gamma(f, Lf). Third-order jets must cancel; otherwise a
/// GammaError names the residual.
Gamma2Form gamma2(const SquareField& sf, const OperatorSpec& op);

struct CommutationResult {
  bool commutes = false;
  JetForm residual;  // Gamma_i(Gamma(f), f) - Gamma(Gamma_i(f), f)
};

CommutationResult check_commutation(const SquareField& sf_i, const SquareField& sf0);

/// Operator with coordinates relabeled: new index k holds old perm[k].
OperatorSpec permuted(const OperatorSpec& op, const std::vector<std::size_t>& perm);
Expression permuted(const Expression& e, const std::vector<std::size_t>& perm);

}  // namespace subcurv
