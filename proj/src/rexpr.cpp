#include "subcurv/rexpr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace subcurv {

struct RExpression::Node {
  enum class Op { kNum, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg, kMin, kMax, kSqrt } op;
  double value = 0.0;
  std::size_t var = 0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using Node = RExpression::Node;
using NodePtr = std::shared_ptr<const Node>;
using Op = Node::Op;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr number(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::kNum;
  n->value = v;
  return n;
}

double eval(const Node& n, std::span<const double> r) {
  switch (n.op) {
    case Op::kNum: return n.value;
    case Op::kVar: return r[n.var];
    case Op::kAdd: return eval(*n.a, r) + eval(*n.b, r);
    case Op::kSub: return eval(*n.a, r) - eval(*n.b, r);
    case Op::kMul: return eval(*n.a, r) * eval(*n.b, r);
    case Op::kDiv: return eval(*n.a, r) / eval(*n.b, r);
    case Op::kPow: return std::pow(eval(*n.a, r), eval(*n.b, r));
    case Op::kNeg: return -eval(*n.a, r);
    case Op::kMin: return std::min(eval(*n.a, r), eval(*n.b, r));
    case Op::kMax: return std::max(eval(*n.a, r), eval(*n.b, r));
    case Op::kSqrt: return std::sqrt(eval(*n.a, r));
  }
  return 0.0;
}

class Parser {
 public:
  Parser(std::string_view text, std::size_t ell) : s_(text), ell_(ell) {}

  NodePtr parse() {
    NodePtr n = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw RExprError("parse error at column " + std::to_string(pos_ + 1) + ": " + what + " in \"" +
                     std::string(s_) + "\"");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  NodePtr sum() {
    NodePtr acc = prod();
    for (;;) {
      if (eat('+')) acc = make(Op::kAdd, acc, prod());
      else if (eat('-')) acc = make(Op::kSub, acc, prod());
      else return acc;
    }
  }
  NodePtr prod() {
    NodePtr acc = unary();
    for (;;) {
      if (eat('*')) acc = make(Op::kMul, acc, unary());
      else if (eat('/')) acc = make(Op::kDiv, acc, unary());
      else return acc;
    }
  }
  NodePtr unary() {
    if (eat('-')) return make(Op::kNeg, unary());
    if (eat('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return make(Op::kPow, base, unary());
    return base;
  }
  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = sum();
      if (!eat(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0;
      const char* first = s_.data() + pos_;
      auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
      if (ec != std::errc()) fail("malformed number");
      pos_ += static_cast<std::size_t>(ptr - first);
      return number(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string id(s_.substr(start, pos_ - start));
      if (id == "min" || id == "max") {
        if (!eat('(')) fail("expected '(' after " + id);
        NodePtr a = sum();
        if (!eat(',')) fail("expected ',' in " + id);
        NodePtr b = sum();
        if (!eat(')')) fail("expected ')'");
        return make(id == "min" ? Op::kMin : Op::kMax, a, b);
      }
      if (id == "sqrt") {
        if (!eat('(')) fail("expected '(' after sqrt");
        NodePtr a = sum();
        if (!eat(')')) fail("expected ')'");
        return make(Op::kSqrt, a);
      }
      std::size_t index = 0;
      if (id == "r" && ell_ == 1) {
        index = 1;
      } else if (id.size() >= 2 && id[0] == 'r' &&
                 std::all_of(id.begin() + 1, id.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        index = std::stoul(id.substr(1));
      } else {
        pos_ = start;
        fail("unknown identifier \"" + id + "\"");
      }
      if (index < 1 || index > ell_) {
        pos_ = start;
        fail("parameter " + id + " outside r1..r" + std::to_string(ell_));
      }
      auto n = std::make_shared<Node>();
      n->op = Op::kVar;
      n->var = index - 1;
      return n;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view s_;
  std::size_t ell_;
  std::size_t pos_ = 0;
};

}  // namespace

RExpression::RExpression(double constant) : root_(number(constant)), text_(format_number(constant)) {}

RExpression RExpression::parse(std::string_view text, std::size_t ell) {
  RExpression e;
  e.root_ = Parser(text, ell).parse();
  e.text_ = std::string(text);
  e.ell_ = ell;
  return e;
}

double RExpression::operator()(std::span<const double> r) const {
  if (r.size() < ell_) throw RExprError("expected " + std::to_string(ell_) + " parameters");
  return eval(*root_, r);
}

RExpression RExpression::shifted(double c) const {
  RExpression e = *this;
  e.root_ = make(Op::kAdd, root_, number(c));
  e.text_ = "(" + text_ + ") + " + format_number(c);
  return e;
}

bool KFamily::contains(std::span<const double> r) const {
  if (r.size() != ell) return false;
  for (double v : r)
    if (!(v > 0.0) || !std::isfinite(v)) return false;
  for (const auto& c : omega) {
    double rhs = c.rhs(r);
    if (!(c.lhs(r) <= rhs + 1e-12 * std::max(1.0, std::abs(rhs)))) return false;
  }
  return true;
}

std::vector<double> KFamily::evaluate(std::span<const double> r) const {
  std::vector<double> out(K.size());
  for (std::size_t i = 0; i < K.size(); ++i) out[i] = K[i](r);
  return out;
}

std::string KFamily::omega_text() const {
  std::string s;
  for (std::size_t i = 1; i <= ell; ++i) s += (i > 1 ? ", r" : "r") + std::to_string(i) + " > 0";
  for (const auto& c : omega) s += ", " + c.lhs.text() + " <= " + c.rhs.text();
  return s.empty() ? "{}" : s;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (v < 0) s = "(" + s + ")";
  return s;
}

}  // namespace subcurv
