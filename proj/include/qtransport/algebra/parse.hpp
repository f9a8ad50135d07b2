#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qtransport/algebra/rational_function.hpp"

namespace qtransport::algebra {

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

// expr   := term (('+'|'-') term)*
// term   := unary (('*'|'/') unary)*
// unary  := ('-'|'+') unary | power
// power  := atom ('^' integer)?
// atom   := integer | symbol | 'I' | '(' expr ')'
class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  RationalFunction parse() {
    RationalFunction r = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("cannot parse '" + std::string(text_) + "' at offset " + std::to_string(pos_) + ": " + what);
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

  RationalFunction expr() {
    RationalFunction r = term();
    for (;;) {
      if (eat('+'))
        r += term();
      else if (eat('-'))
        r -= term();
      else
        return r;
    }
  }
  RationalFunction term() {
    RationalFunction r = unary();
    for (;;) {
      if (eat('*'))
        r *= unary();
      else if (eat('/'))
        r /= unary();
      else
        return r;
    }
  }
  RationalFunction unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  RationalFunction power() {
    RationalFunction base = atom();
    if (eat('^')) {
      bool negative = eat('-');
      skip();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
      return pow(base, negative ? -e : e);
    }
    return base;
  }
  RationalFunction atom() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      RationalFunction r = expr();
      if (!eat(')')) fail("expected ')'");
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '.') {
        ++pos_;
        std::size_t frac = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::string digits = std::string(text_.substr(start, frac - 1 - start)) + std::string(text_.substr(frac, pos_ - frac));
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, pos_ - frac);
        return RationalFunction(mpq_class(mpz_class(digits, 10), scale));
      }
      return RationalFunction(mpq_class(mpz_class(std::string(text_.substr(start, pos_ - start)), 10)));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
      std::string_view name = text_.substr(start, pos_ - start);
      if (name == "I" || name == "i") return RationalFunction(GaussianRational::i());
      if (auto s = symbol_from_name(name)) return RationalFunction::variable(*s);
      fail("unknown symbol '" + std::string(name) + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the textual form produced by Polynomial/RationalFunction::to_string
/// (and ordinary arithmetic expressions over the known symbols).
inline RationalFunction parse_rational_function(std::string_view text) {
  return detail::ExpressionParser(text).parse();
}

}  // namespace qtransport::algebra
