#include "subcurv/jet.hpp"

#include <algorithm>
#include <sstream>

#include "subcurv/parse_detail.hpp"

namespace subcurv {

JetSymbol::JetSymbol(std::vector<int> multi_index) : alpha_(std::move(multi_index)) {
  for (int a : alpha_)
    if (a < 0) throw ExprError("negative entry in jet multi-index");
  while (!alpha_.empty() && alpha_.back() == 0) alpha_.pop_back();
  if (order() > kMaxJetOrder) throw ExprError("jet order exceeds 3");
}

JetSymbol JetSymbol::first(std::size_t a) {
  std::vector<int> m(a + 1, 0);
  m[a] = 1;
  return JetSymbol(std::move(m));
}

JetSymbol JetSymbol::second(std::size_t a, std::size_t b) {
  std::vector<int> m(std::max(a, b) + 1, 0);
  m[a] += 1;
  m[b] += 1;
  return JetSymbol(std::move(m));
}

JetSymbol JetSymbol::parse(std::string_view name, const Coordinates& coords) {
  if (name == "f") return JetSymbol{};
  if (name.size() < 3 || name.substr(0, 2) != "f_")
    throw ExprError("not a jet symbol: \"" + std::string(name) + "\"");
  std::vector<int> m(coords.size(), 0);
  for (char c : name.substr(2)) m[coords.index(std::string(1, c))] += 1;
  return JetSymbol(std::move(m));
}

int JetSymbol::order() const {
  int s = 0;
  for (int a : alpha_) s += a;
  return s;
}

JetSymbol JetSymbol::raised(std::size_t var) const {
  std::vector<int> m = alpha_;
  if (m.size() <= var) m.resize(var + 1, 0);
  m[var] += 1;
  int ord = 0;
  for (int a : m) ord += a;
  if (ord > kMaxJetOrder)
    throw ExprError("jet order would exceed 3; restructure the computation");
  return JetSymbol(std::move(m));
}

std::string JetSymbol::name(const Coordinates& coords) const {
  if (alpha_.empty()) return "f";
  std::string s = "f_";
  for (std::size_t i = 0; i < alpha_.size(); ++i)
    for (int k = 0; k < alpha_[i]; ++k) s += i < coords.size() ? coords.name(i) : "?";
  return s;
}

JetMonomial::JetMonomial(std::vector<JetSymbol> symbols) : symbols_(std::move(symbols)) {
  std::sort(symbols_.begin(), symbols_.end());
}

int JetMonomial::max_order() const {
  int m = 0;
  for (const auto& s : symbols_) m = std::max(m, s.order());
  return m;
}

JetMonomial JetMonomial::operator*(const JetMonomial& o) const {
  std::vector<JetSymbol> all = symbols_;
  all.insert(all.end(), o.symbols_.begin(), o.symbols_.end());
  return JetMonomial(std::move(all));
}

JetMonomial JetMonomial::replaced(std::size_t k, const JetSymbol& s) const {
  std::vector<JetSymbol> all = symbols_;
  all.at(k) = s;
  return JetMonomial(std::move(all));
}

JetForm::JetForm(const Expression& scalar) {
  if (!scalar.is_zero()) terms_.emplace(JetMonomial{}, scalar);
}

JetForm JetForm::symbol(const JetSymbol& s) { return term(JetMonomial({s}), Expression(1L)); }

JetForm JetForm::term(const JetMonomial& m, const Expression& c) {
  JetForm f;
  f.add_term(m, c);
  return f;
}

void JetForm::add_term(const JetMonomial& m, const Expression& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

int JetForm::max_order() const {
  int m = 0;
  for (const auto& [mono, c] : terms_) m = std::max(m, mono.max_order());
  return m;
}

int JetForm::max_degree() const {
  int m = 0;
  for (const auto& [mono, c] : terms_) m = std::max(m, mono.degree());
  return m;
}

bool JetForm::is_homogeneous(int d) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [d](const auto& t) { return t.first.degree() == d; });
}

Expression JetForm::coefficient(const JetMonomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Expression{} : it->second;
}

JetForm JetForm::terms_with_order(int order) const {
  JetForm out;
  for (const auto& [mono, c] : terms_) {
    bool hit = std::any_of(mono.symbols().begin(), mono.symbols().end(),
                           [order](const JetSymbol& s) { return s.order() == order; });
    if (hit) out.add_term(mono, c);
  }
  return out;
}

std::vector<JetSymbol> JetForm::symbols() const {
  std::vector<JetSymbol> out;
  for (const auto& [mono, c] : terms_)
    for (const auto& s : mono.symbols())
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  std::sort(out.begin(), out.end());
  return out;
}

JetForm& JetForm::operator+=(const JetForm& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

JetForm& JetForm::operator-=(const JetForm& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

JetForm operator*(const JetForm& a, const JetForm& b) {
  JetForm out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

JetForm JetForm::operator-() const {
  JetForm out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
  return out;
}

JetForm JetForm::pow(int n) const {
  if (n < 0) throw ExprError("negative power of a jet form");
  JetForm r(Expression(1L));
  for (int k = 0; k < n; ++k) r = r * *this;
  return r;
}

JetForm JetForm::total_derivative(std::size_t var) const {
  JetForm out;
  for (const auto& [mono, c] : terms_) {
    out.add_term(mono, c.differentiate(var));
    const auto& syms = mono.symbols();
    for (std::size_t k = 0; k < syms.size(); ++k)
      out.add_term(mono.replaced(k, syms[k].raised(var)), c);
  }
  return out;
}

double JetForm::evaluate(std::span<const double> point, const JetValues& jet) const {
  double acc = 0.0;
  for (const auto& [mono, c] : terms_) {
    double t = c.evaluate(point);
    for (const auto& s : mono.symbols()) {
      auto it = jet.find(s);
      if (it == jet.end()) throw ExprError("jet symbol without an assigned value");
      t *= it->second;
    }
    acc += t;
  }
  return acc;
}

std::string JetForm::to_string(const Coordinates& coords) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mono, c] : terms_) {
    std::string js;
    const auto& syms = mono.symbols();
    for (std::size_t k = 0; k < syms.size();) {
      std::size_t j = k;
      while (j < syms.size() && syms[j] == syms[k]) ++j;
      if (!js.empty()) js += "*";
      js += syms[k].name(coords);
      if (j - k > 1) js += "^" + std::to_string(j - k);
      k = j;
    }
    std::string cs = c.to_string(coords);
    bool single = c.terms().size() == 1;
    bool neg = single && c.terms().begin()->second < 0;
    if (neg) cs = (-c).to_string(coords);
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    if (js.empty()) {
      os << (single ? cs : "(" + cs + ")");
    } else if (cs == "1") {
      os << js;
    } else {
      os << (single ? cs : "(" + cs + ")") << "*" << js;
    }
  }
  return os.str();
}

JetForm apply_field(const FieldVector& field, const JetForm& target) {
  if (target.max_order() > 2)
    throw ExprError("apply_field: target has jet order > 2; the result would exceed order 3");
  JetForm out;
  for (std::size_t j = 0; j < field.size(); ++j) {
    if (field[j].is_zero()) continue;
    out += JetForm(field[j]) * target.total_derivative(j);
  }
  return out;
}

double eval_jetform(const JetForm& q, std::span<const double> point, const JetValues& jet) {
  return q.evaluate(point, jet);
}

JetForm parse_jetform(std::string_view text, const Coordinates& coords) {
  detail::RingParser<JetForm> parser(
      text,
      [&](const std::string& id) -> JetForm {
        if (id == "f" || id.rfind("f_", 0) == 0) return JetForm::symbol(JetSymbol::parse(id, coords));
        return JetForm(Expression::variable(coords.index(id)));
      },
      [](const JetForm& e, Rational& q) {
        if (e.is_zero()) {
          q = 0;
          return true;
        }
        if (e.terms().size() != 1 || e.terms().begin()->first.degree() != 0) return false;
        const Expression& c = e.terms().begin()->second;
        if (!c.is_constant()) return false;
        q = c.constant();
        return true;
      });
  return parser.parse();
}

std::vector<JetSymbol> jet_basis(std::size_t dim) {
  std::vector<JetSymbol> out;
  for (std::size_t a = 0; a < dim; ++a) out.push_back(JetSymbol::first(a));
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = a; b < dim; ++b) out.push_back(JetSymbol::second(a, b));
  return out;
}

}  // namespace subcurv
