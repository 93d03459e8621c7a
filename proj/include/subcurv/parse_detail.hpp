#pragma once

// Shared recursive-descent parser for the ring-valued infix formats
// (polynomials and jet forms). Not part of the public interface.

#include <cctype>
#include <functional>
#include <string>
#include <string_view>

#include "subcurv/expr.hpp"

namespace subcurv::detail {

/// Parses  sum := prod (('+'|'-') prod)* ;  prod := unary (('*'|'/') unary)* ;
/// unary := ('-'|'+') unary | power ;  power := atom ('^' int)? ;
/// atom := number | identifier | '(' sum ')'.
///
/// `Ring` must support +, -, *, unary -, pow(int) and construction from Rational.
/// Division requires a constant divisor, checked through `as_constant`.
template <class Ring>
class RingParser {
 public:
  using IdentFn = std::function<Ring(const std::string&)>;
  using ConstFn = std::function<bool(const Ring&, Rational&)>;

  RingParser(std::string_view text, IdentFn ident, ConstFn as_constant)
      : text_(text), ident_(std::move(ident)), as_constant_(std::move(as_constant)) {}

  Ring parse() {
    Ring r = sum();
    skip();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExprError("parse error at column " + std::to_string(pos_ + 1) + ": " + what +
                    " in \"" + std::string(text_) + "\"");
  }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Ring sum() {
    Ring acc = prod();
    for (;;) {
      if (eat('+')) {
        acc = acc + prod();
      } else if (eat('-')) {
        acc = acc - prod();
      } else {
        return acc;
      }
    }
  }

  Ring prod() {
    Ring acc = unary();
    for (;;) {
      if (eat('*')) {
        acc = acc * unary();
      } else if (eat('/')) {
        Ring d = unary();
        Rational q;
        if (!as_constant_(d, q)) fail("division by a non-constant");
        if (q == 0) fail("division by zero");
        acc = acc * Ring(Rational(1) / q);
      } else {
        return acc;
      }
    }
  }

  Ring unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  Ring power() {
    Ring base = atom();
    if (eat('^')) {
      skip();
      bool paren = eat('(');
      skip();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a non-negative integer exponent");
      long n = std::stol(std::string(text_.substr(start, pos_ - start)));
      if (paren && !eat(')')) fail("expected ')'");
      if (n > 4096) fail("exponent too large");
      return base.pow(static_cast<int>(n));
    }
    return base;
  }

  Ring atom() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Ring r = sum();
      if (!eat(')')) fail("expected ')'");
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string id(text_.substr(start, pos_ - start));
      try {
        return ident_(id);
      } catch (const ExprError& e) {
        pos_ = start;
        fail(e.what());
      }
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Ring number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string digits(text_.substr(start, pos_ - start));
    Rational value(0);
    if (!digits.empty()) value = Rational(mpz_class(digits));
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      std::size_t fs = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string frac(text_.substr(fs, pos_ - fs));
      if (digits.empty() && frac.empty()) fail("malformed number");
      if (!frac.empty()) {
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
        value += Rational(mpz_class(frac), den);
      }
    }
    value.canonicalize();
    return Ring(value);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  IdentFn ident_;
  ConstFn as_constant_;
};

}  // namespace subcurv::detail
