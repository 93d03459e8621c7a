#include "subcurv/expr.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <sstream>

#include "subcurv/parse_detail.hpp"

namespace subcurv {

Coordinates::Coordinates(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const auto& n = names_[i];
    if (n.size() != 1 || !std::isalpha(static_cast<unsigned char>(n[0])) || n == "f")
      throw ExprError("coordinate names must be single letters other than 'f': \"" + n + "\"");
    for (std::size_t j = 0; j < i; ++j)
      if (names_[j] == n) throw ExprError("duplicate coordinate name \"" + n + "\"");
  }
}

std::size_t Coordinates::index(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  throw ExprError("unknown coordinate \"" + std::string(name) + "\"");
}

bool Coordinates::contains(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

int checked_add(int a, int b) {
  int out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw ExprError("exponent overflow");
  return out;
}

Monomial::Monomial(std::vector<int> exps) : exps_(std::move(exps)) {
  for (int e : exps_)
    if (e < 0) throw ExprError("negative exponent in monomial");
  trim();
}

Monomial Monomial::variable(std::size_t var, int power) {
  std::vector<int> e(var + 1, 0);
  e[var] = power;
  return Monomial(std::move(e));
}

void Monomial::trim() {
  while (!exps_.empty() && exps_.back() == 0) exps_.pop_back();
}

int Monomial::degree() const {
  int d = 0;
  for (int e : exps_) d = checked_add(d, e);
  return d;
}

Monomial Monomial::operator*(const Monomial& o) const {
  std::vector<int> e(std::max(exps_.size(), o.exps_.size()), 0);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = checked_add(exponent(i), o.exponent(i));
  return Monomial(std::move(e));
}

Expression::Expression(long value) {
  if (value != 0) terms_.emplace(Monomial{}, Rational(value));
}

Expression::Expression(const Rational& value) {
  if (value != 0) terms_.emplace(Monomial{}, value);
}

Expression Expression::variable(std::size_t var) {
  return monomial(Monomial::variable(var), Rational(1));
}

Expression Expression::monomial(const Monomial& m, const Rational& c) {
  Expression e;
  e.add_term(m, c);
  return e;
}

void Expression::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

bool Expression::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

Rational Expression::constant() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

int Expression::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

std::size_t Expression::arity() const {
  std::size_t n = 0;
  for (const auto& [m, c] : terms_) n = std::max(n, m.exponents().size());
  return n;
}

Expression& Expression::operator+=(const Expression& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Expression& Expression::operator-=(const Expression& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Expression operator*(const Expression& a, const Expression& b) {
  Expression out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

Expression& Expression::operator*=(const Expression& o) {
  *this = *this * o;
  return *this;
}

Expression Expression::operator-() const {
  Expression out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
  return out;
}

Expression Expression::pow(int n) const {
  if (n < 0) throw ExprError("negative power of a polynomial");
  Expression result(1L);
  Expression base = *this;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n > 0) base *= base;
  }
  return result;
}

Expression Expression::differentiate(std::size_t var) const {
  Expression out;
  for (const auto& [m, c] : terms_) {
    int e = m.exponent(var);
    if (e == 0) continue;
    std::vector<int> exps = m.exponents();
    exps[var] = e - 1;
    out.add_term(Monomial(std::move(exps)), c * e);
  }
  return out;
}

Expression Expression::substitute(std::size_t var, const Rational& value) const {
  Expression out;
  for (const auto& [m, c] : terms_) {
    int e = m.exponent(var);
    if (e == 0) {
      out.add_term(m, c);
      continue;
    }
    Rational f(1);
    for (int k = 0; k < e; ++k) f *= value;
    std::vector<int> exps = m.exponents();
    exps[var] = 0;
    out.add_term(Monomial(std::move(exps)), c * f);
  }
  return out;
}

double Expression::evaluate(std::span<const double> point) const {
  double acc = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c.get_d();
    const auto& e = m.exponents();
    if (e.size() > point.size()) throw ExprError("evaluation point has too few coordinates");
    for (std::size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) t *= point[i];
    acc += t;
  }
  return acc;
}

Rational Expression::evaluate_exact(std::span<const Rational> point) const {
  Rational acc(0);
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    const auto& e = m.exponents();
    if (e.size() > point.size()) throw ExprError("evaluation point has too few coordinates");
    for (std::size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) t *= point[i];
    acc += t;
  }
  return acc;
}

std::string rational_to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

namespace {

std::string monomial_string(const Monomial& m, const Coordinates& coords) {
  std::string s;
  const auto& e = m.exponents();
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += i < coords.size() ? coords.name(i) : ("v" + std::to_string(i));
    if (e[i] > 1) s += "^" + std::to_string(e[i]);
  }
  return s;
}

}  // namespace

std::string Expression::to_string(const Coordinates& coords) const {
  if (terms_.empty()) return "0";
  std::vector<std::pair<Monomial, Rational>> ordered(terms_.begin(), terms_.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return a.first.degree() > b.first.degree();
  });
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : ordered) {
    Rational mag = abs(c);
    bool neg = c < 0;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    std::string ms = monomial_string(m, coords);
    if (ms.empty()) {
      os << rational_to_string(mag);
    } else if (mag == 1) {
      os << ms;
    } else {
      os << rational_to_string(mag) << "*" << ms;
    }
  }
  return os.str();
}

Expression differentiate(const Expression& e, const Coordinates& coords, std::string_view coord) {
  return e.differentiate(coords.index(coord));
}

Expression parse_expression(std::string_view text, const Coordinates& coords) {
  detail::RingParser<Expression> parser(
      text,
      [&](const std::string& id) { return Expression::variable(coords.index(id)); },
      [](const Expression& e, Rational& q) {
        if (!e.is_constant()) return false;
        q = e.constant();
        return true;
      });
  return parser.parse();
}

}  // namespace subcurv
