#include "subcurv/compiled.hpp"

#include <algorithm>

namespace subcurv {

CompiledPoly::CompiledPoly(const Expression& e) {
  start_.push_back(0);
  for (const auto& [m, c] : e.terms()) {
    coef_.push_back(c.get_d());
    const auto& ex = m.exponents();
    for (std::size_t v = 0; v < ex.size(); ++v)
      if (ex[v] != 0) {
        factors_.push_back({static_cast<std::uint32_t>(v), ex[v]});
        arity_ = std::max(arity_, v + 1);
      }
    start_.push_back(static_cast<std::uint32_t>(factors_.size()));
  }
}

namespace {
template <class T>
T ipow(T b, int e) {
  T r = 1;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}
}  // namespace

double CompiledPoly::operator()(std::span<const double> x) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < coef_.size(); ++k) {
    double t = coef_[k];
    for (std::uint32_t j = start_[k]; j < start_[k + 1]; ++j)
      t *= ipow(x[factors_[j].var], factors_[j].exp);
    acc += t;
  }
  return acc;
}

long double CompiledPoly::eval_long(std::span<const long double> x) const {
  long double acc = 0.0L;
  for (std::size_t k = 0; k < coef_.size(); ++k) {
    long double t = coef_[k];
    for (std::uint32_t j = start_[k]; j < start_[k + 1]; ++j)
      t *= ipow(x[factors_[j].var], factors_[j].exp);
    acc += t;
  }
  return acc;
}

bool CompiledPoly::uses(std::size_t var) const {
  return std::any_of(factors_.begin(), factors_.end(),
                     [var](const Factor& f) { return f.var == var; });
}

QuadraticJetMatrix::QuadraticJetMatrix(const JetForm& form, const std::vector<JetSymbol>& basis)
    : n_(basis.size()) {
  auto index_of = [&](const JetSymbol& s) {
    auto it = std::find(basis.begin(), basis.end(), s);
    if (it == basis.end()) throw ExprError("jet symbol outside the matrix basis");
    return static_cast<std::size_t>(it - basis.begin());
  };
  std::vector<std::vector<Expression>> m(n_, std::vector<Expression>(n_));
  for (const auto& [mono, c] : form.terms()) {
    if (mono.degree() != 2) throw ExprError("form is not quadratic in jet symbols");
    std::size_t p = index_of(mono.symbols()[0]), q = index_of(mono.symbols()[1]);
    if (p == q) {
      m[p][p] += c;
    } else {
      Expression half = Expression(Rational(1, 2)) * c;
      m[p][q] += half;
      m[q][p] += half;
    }
  }
  for (std::size_t p = 0; p < n_; ++p)
    for (std::size_t q = 0; q < n_; ++q)
      if (!m[p][q].is_zero()) entries_.push_back({p, q, m[p][q], CompiledPoly(m[p][q])});
}

void QuadraticJetMatrix::fill(std::span<const double> point, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& e : entries_) out[e.p * n_ + e.q] = e.poly(point);
}

bool QuadraticJetMatrix::uses(std::size_t var) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [var](const Entry& e) { return e.poly.uses(var); });
}

}  // namespace subcurv
