#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace ssos {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Exponent vector x^α = x_1^α_1 ⋯ x_n^α_n.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::size_t nvars) : exponents_(nvars, 0) {}
  explicit Monomial(std::vector<std::uint32_t> exponents)
      : exponents_(std::move(exponents)) {}

  static Monomial variable(std::size_t nvars, std::size_t index);

  std::size_t nvars() const { return exponents_.size(); }
  std::uint32_t operator[](std::size_t i) const { return exponents_[i]; }
  std::uint32_t& operator[](std::size_t i) { return exponents_[i]; }
  const std::vector<std::uint32_t>& exponents() const { return exponents_; }
  unsigned degree() const;
  bool is_constant() const { return degree() == 0; }

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<std::uint32_t> exponents_;
};

/// Graded lexicographic order with x1 > x2 > ... > xn.  Returns true when
/// a precedes b in *descending* order, i.e. a >_grlex b.
struct GrlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// -1, 0, 1 for a <, =, > b under grlex.
int grlex_compare(const Monomial& a, const Monomial& b);

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept;
};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in descending graded-lex order and zero coefficients are
/// never stored.  deg(0) is defined as 0.  Values are immutable once built;
/// every arithmetic operation returns a fresh polynomial.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Rational, GrlexGreater>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const Rational& c);
  static Polynomial variable(std::size_t nvars, std::size_t index);
  static Polynomial term(const Monomial& m, const Rational& c);

  std::size_t nvars() const { return nvars_; }
  unsigned degree() const;
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::size_t size() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }
  Rational coefficient(const Monomial& m) const;
  Rational constant_term() const;
  /// Largest |coefficient|; 0 for the zero polynomial.
  Rational max_abs_coefficient() const;

  Polynomial operator-() const;
  friend Polynomial operator+(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator-(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(const Rational& c, const Polynomial& p);
  friend bool operator==(const Polynomial& p, const Polynomial& q);

  // Adds c·m in place; used by builders only before a value is shared.
  void add_term(const Monomial& m, const Rational& c);

 private:
  std::size_t nvars_ = 0;
  TermMap terms_;
};

Polynomial add(const Polynomial& p, const Polynomial& q);
Polynomial mul(const Polynomial& p, const Polynomial& q);
Polynomial scale(const Polynomial& p, const Rational& c);
Polynomial pow(const Polynomial& p, unsigned k);

/// Exact partial derivative ∂p/∂x_{var_index}.
Polynomial differentiate(const Polynomial& p, std::size_t var_index);

/// Substitution p(φ_1(y), ..., φ_n(y)).  All components of phi must share
/// one ring; the result lives in that ring.
Polynomial compose(const Polynomial& p, std::span<const Polynomial> phi);

Rational evaluate(const Polynomial& p, std::span<const Rational> point);
double evaluate(const Polynomial& p, std::span<const double> point);

/// Embeds p into a ring with new_nvars variables, sending x_i to
/// x_{i + offset}.
Polynomial extend_ring(const Polynomial& p, std::size_t new_nvars,
                       std::size_t offset = 0);

/// Exact division by a single divisor.  Returns the quotient when the
/// remainder of the grlex division algorithm is zero, i.e. when divisor
/// divides p.
struct DivisionResult {
  Polynomial quotient;
  Polynomial remainder;
};
DivisionResult divide(const Polynomial& p, const Polynomial& divisor);

/// Canonical text: terms in descending grlex, explicit '^' and '*'.
std::string to_string(const Polynomial& p,
                      std::span<const std::string> varnames);
std::string to_string(const Monomial& m,
                      std::span<const std::string> varnames);

/// x1, ..., xn.
std::vector<std::string> default_varnames(std::size_t n,
                                          const std::string& stem = "x");

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses an arithmetic expression over varnames with integer, decimal or
/// rational literals and +, -, *, /, ^ (non-negative integer powers).
/// Division is only allowed by nonzero constants.
Polynomial parse(const std::string& text,
                 std::span<const std::string> varnames);

/// Shortest decimal-or-fraction text of a rational, e.g. "3/2".
std::string to_string(const Rational& r);

/// Converts a double to the exact rational with that binary value.
Rational exact_rational(double value);

/// Best rational approximation with denominator at most max_denominator.
Rational rationalize(double value, const BigInt& max_denominator);

}  // namespace ssos
