#include <cctype>
#include <limits>

#include "ssos/polynomial.hpp"

namespace ssos {

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " at position " + std::to_string(position)),
      position_(position) {}

namespace {

bool is_ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c >= 0x80;
}

bool is_ident_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

// Recursive descent over
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := ('+'|'-') unary | power
//   power   := primary ('^' integer)?
//   primary := number | identifier | '(' expr ')'
class Parser {
 public:
  Parser(const std::string& text, std::span<const std::string> varnames)
      : text_(text), names_(varnames) {}

  Polynomial run() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    Polynomial p = expr();
    skip_space();
    if (pos_ != text_.size()) {
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'",
                       pos_);
    }
    return p;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial p = term();
    while (true) {
      if (accept('+')) {
        p = p + term();
      } else if (accept('-')) {
        p = p - term();
      } else {
        return p;
      }
    }
  }

  Polynomial term() {
    Polynomial p = unary();
    while (true) {
      if (accept('*')) {
        p = p * unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Polynomial d = unary();
        if (!d.is_constant() || d.is_zero()) {
          throw ParseError("division only by nonzero constants", at);
        }
        p = scale(p, 1 / d.constant_term());
      } else {
        return p;
      }
    }
  }

  Polynomial unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = primary();
    if (accept('^')) {
      skip_space();
      const std::size_t at = pos_;
      std::size_t end = pos_;
      while (end < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[end]))) {
        ++end;
      }
      if (end == pos_) {
        throw ParseError("exponent must be a non-negative integer literal", at);
      }
      const std::string digits = text_.substr(pos_, end - pos_);
      pos_ = end;
      if (digits.size() > 9) throw ParseError("exponent too large", at);
      return pow(base, static_cast<unsigned>(std::stoul(digits)));
    }
    return base;
  }

  Polynomial primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const auto c = static_cast<unsigned char>(text_[pos_]);
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return p;
    }
    if (std::isdigit(c) || c == '.') return number();
    if (is_ident_start(c)) return identifier();
    throw ParseError(std::string("unexpected character '") + text_[pos_] + "'",
                     pos_);
  }

  Polynomial number() {
    const std::size_t start = pos_;
    std::string int_part, frac_part;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      int_part += text_[pos_++];
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        frac_part += text_[pos_++];
      }
    }
    if (int_part.empty() && frac_part.empty()) {
      throw ParseError("malformed number", start);
    }
    BigInt numerator(int_part.empty() ? std::string("0") : int_part + frac_part,
                     10);
    if (int_part.empty()) numerator = BigInt(frac_part, 10);
    BigInt denominator = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) denominator *= 10;
    Rational value(numerator, denominator);
    value.canonicalize();
    return Polynomial::constant(names_.size(), value);
  }

  Polynomial identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           is_ident_char(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    const std::string name = text_.substr(start, pos_ - start);
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return Polynomial::variable(names_.size(), i);
    }
    throw ParseError("unknown variable '" + name + "'", start);
  }

  const std::string& text_;
  std::span<const std::string> names_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse(const std::string& text,
                 std::span<const std::string> varnames) {
  return Parser(text, varnames).run();
}

}  // namespace ssos
