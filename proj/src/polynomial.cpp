#include "ssos/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ssos {

Monomial Monomial::variable(std::size_t nvars, std::size_t index) {
  if (index >= nvars) {
    throw std::out_of_range("variable index out of range");
  }
  Monomial m(nvars);
  m.exponents_[index] = 1;
  return m;
}

unsigned Monomial::degree() const {
  unsigned d = 0;
  for (auto e : exponents_) d += e;
  return d;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  if (a.nvars() != b.nvars()) {
    throw std::invalid_argument("monomial ring mismatch");
  }
  Monomial m(a.nvars());
  for (std::size_t i = 0; i < a.nvars(); ++i) m[i] = a[i] + b[i];
  return m;
}

int grlex_compare(const Monomial& a, const Monomial& b) {
  const unsigned da = a.degree();
  const unsigned db = b.degree();
  if (da != db) return da < db ? -1 : 1;
  const std::size_t n = std::min(a.nvars(), b.nvars());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  if (a.nvars() != b.nvars()) return a.nvars() < b.nvars() ? -1 : 1;
  return 0;
}

bool GrlexGreater::operator()(const Monomial& a, const Monomial& b) const {
  return grlex_compare(a, b) > 0;
}

std::size_t MonomialHash::operator()(const Monomial& m) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (auto e : m.exponents()) {
    h ^= e + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

// ---------------------------------------------------------------------------

Polynomial Polynomial::constant(std::size_t nvars, const Rational& c) {
  Polynomial p(nvars);
  p.add_term(Monomial(nvars), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t index) {
  Polynomial p(nvars);
  p.add_term(Monomial::variable(nvars, index), 1);
  return p;
}

Polynomial Polynomial::term(const Monomial& m, const Rational& c) {
  Polynomial p(m.nvars());
  p.add_term(m, c);
  return p;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (m.nvars() != nvars_) {
    throw std::invalid_argument("monomial does not belong to this ring");
  }
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (inserted) {
    it->second.canonicalize();
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

unsigned Polynomial::degree() const {
  // Descending grlex: the first term has the largest total degree.
  return terms_.empty() ? 0 : terms_.begin()->first.degree();
}

bool Polynomial::is_constant() const {
  return terms_.empty() ||
         (terms_.size() == 1 && terms_.begin()->first.is_constant());
}

Rational Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational Polynomial::constant_term() const {
  return coefficient(Monomial(nvars_));
}

Rational Polynomial::max_abs_coefficient() const {
  Rational best = 0;
  for (const auto& [m, c] : terms_) {
    Rational a = abs(c);
    if (a > best) best = a;
  }
  return best;
}

namespace {
void require_same_ring(const Polynomial& p, const Polynomial& q) {
  if (p.nvars() != q.nvars()) {
    throw std::invalid_argument("polynomial ring mismatch: " +
                                std::to_string(p.nvars()) + " vs " +
                                std::to_string(q.nvars()) + " variables");
  }
}
}  // namespace

Polynomial Polynomial::operator-() const { return scale(*this, -1); }

Polynomial operator+(const Polynomial& p, const Polynomial& q) {
  require_same_ring(p, q);
  Polynomial r = p;
  for (const auto& [m, c] : q.terms_) r.add_term(m, c);
  return r;
}

Polynomial operator-(const Polynomial& p, const Polynomial& q) {
  require_same_ring(p, q);
  Polynomial r = p;
  for (const auto& [m, c] : q.terms_) r.add_term(m, -c);
  return r;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  require_same_ring(p, q);
  Polynomial r(p.nvars());
  for (const auto& [mp, cp] : p.terms_) {
    for (const auto& [mq, cq] : q.terms_) r.add_term(mp * mq, cp * cq);
  }
  return r;
}

Polynomial operator*(const Rational& c, const Polynomial& p) {
  return scale(p, c);
}

bool operator==(const Polynomial& p, const Polynomial& q) {
  return p.nvars_ == q.nvars_ && p.terms_ == q.terms_;
}

Polynomial add(const Polynomial& p, const Polynomial& q) { return p + q; }
Polynomial mul(const Polynomial& p, const Polynomial& q) { return p * q; }

Polynomial scale(const Polynomial& p, const Rational& c) {
  Polynomial r(p.nvars());
  if (c == 0) return r;
  for (const auto& [m, a] : p.terms()) r.add_term(m, a * c);
  return r;
}

Polynomial pow(const Polynomial& p, unsigned k) {
  Polynomial result = Polynomial::constant(p.nvars(), 1);
  Polynomial base = p;
  while (k > 0) {
    if (k & 1U) result = result * base;
    k >>= 1U;
    if (k > 0) base = base * base;
  }
  return result;
}

Polynomial differentiate(const Polynomial& p, std::size_t var_index) {
  if (var_index >= p.nvars()) {
    throw std::out_of_range("differentiation index " +
                            std::to_string(var_index) + " out of range");
  }
  Polynomial r(p.nvars());
  for (const auto& [m, c] : p.terms()) {
    const auto e = m[var_index];
    if (e == 0) continue;
    Monomial dm = m;
    dm[var_index] = e - 1;
    r.add_term(dm, c * e);
  }
  return r;
}

Polynomial compose(const Polynomial& p, std::span<const Polynomial> phi) {
  if (phi.size() != p.nvars()) {
    throw std::invalid_argument("compose: expected " +
                                std::to_string(p.nvars()) +
                                " components, got " +
                                std::to_string(phi.size()));
  }
  if (phi.empty()) {
    // Constant p in zero variables maps to a constant in zero variables.
    return p;
  }
  const std::size_t t = phi.front().nvars();
  for (const auto& c : phi) {
    if (c.nvars() != t) {
      throw std::invalid_argument("compose: components live in different rings");
    }
  }
  // powers[i][e] = phi_i^e, filled lazily.
  std::vector<std::vector<Polynomial>> powers(phi.size());
  auto power_of = [&](std::size_t i, unsigned e) -> const Polynomial& {
    auto& cache = powers[i];
    if (cache.empty()) cache.push_back(Polynomial::constant(t, 1));
    while (cache.size() <= e) cache.push_back(cache.back() * phi[i]);
    return cache[e];
  };
  Polynomial result(t);
  for (const auto& [m, c] : p.terms()) {
    Polynomial term = Polynomial::constant(t, c);
    for (std::size_t i = 0; i < m.nvars(); ++i) {
      if (m[i] > 0) term = term * power_of(i, m[i]);
    }
    result = result + term;
  }
  return result;
}

Rational evaluate(const Polynomial& p, std::span<const Rational> point) {
  if (point.size() != p.nvars()) {
    throw std::invalid_argument("evaluate: point has dimension " +
                                std::to_string(point.size()) + ", ring has " +
                                std::to_string(p.nvars()));
  }
  Rational sum = 0;
  for (const auto& [m, c] : p.terms()) {
    Rational v = c;
    for (std::size_t i = 0; i < m.nvars(); ++i) {
      for (std::uint32_t e = 0; e < m[i]; ++e) v *= point[i];
    }
    sum += v;
  }
  return sum;
}

double evaluate(const Polynomial& p, std::span<const double> point) {
  if (point.size() != p.nvars()) {
    throw std::invalid_argument("evaluate: point has dimension " +
                                std::to_string(point.size()) + ", ring has " +
                                std::to_string(p.nvars()));
  }
  double sum = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double v = c.get_d();
    for (std::size_t i = 0; i < m.nvars(); ++i) {
      for (std::uint32_t e = 0; e < m[i]; ++e) v *= point[i];
    }
    sum += v;
  }
  return sum;
}

Polynomial extend_ring(const Polynomial& p, std::size_t new_nvars,
                       std::size_t offset) {
  if (new_nvars < p.nvars() + offset) {
    throw std::invalid_argument("extend_ring: target ring too small");
  }
  Polynomial r(new_nvars);
  for (const auto& [m, c] : p.terms()) {
    Monomial e(new_nvars);
    for (std::size_t i = 0; i < m.nvars(); ++i) e[i + offset] = m[i];
    r.add_term(e, c);
  }
  return r;
}

DivisionResult divide(const Polynomial& p, const Polynomial& divisor) {
  require_same_ring(p, divisor);
  if (divisor.is_zero()) throw std::domain_error("division by zero polynomial");
  const auto& [lead_m, lead_c] = *divisor.terms().begin();
  Polynomial quotient(p.nvars());
  Polynomial remainder(p.nvars());
  Polynomial rest = p;
  while (!rest.is_zero()) {
    const auto [m, c] = *rest.terms().begin();
    bool divisible = true;
    Monomial shift(p.nvars());
    for (std::size_t i = 0; i < m.nvars(); ++i) {
      if (m[i] < lead_m[i]) {
        divisible = false;
        break;
      }
      shift[i] = m[i] - lead_m[i];
    }
    if (divisible) {
      const Rational factor = c / lead_c;
      quotient.add_term(shift, factor);
      rest = rest - Polynomial::term(shift, factor) * divisor;
    } else {
      remainder.add_term(m, c);
      rest.add_term(m, -c);
    }
  }
  return {quotient, remainder};
}

// ---------------------------------------------------------------------------

std::string to_string(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  return c.get_str();
}

std::string to_string(const Monomial& m,
                      std::span<const std::string> varnames) {
  if (varnames.size() < m.nvars()) {
    throw std::invalid_argument("not enough variable names to print");
  }
  std::string out;
  for (std::size_t i = 0; i < m.nvars(); ++i) {
    if (m[i] == 0) continue;
    if (!out.empty()) out += '*';
    out += varnames[i];
    if (m[i] > 1) out += '^' + std::to_string(m[i]);
  }
  return out.empty() ? "1" : out;
}

std::string to_string(const Polynomial& p,
                      std::span<const std::string> varnames) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    const bool negative = c < 0;
    const Rational a = abs(c);
    std::string body;
    if (m.is_constant()) {
      body = to_string(a);
    } else if (a == 1) {
      body = to_string(m, varnames);
    } else {
      body = to_string(a) + "*" + to_string(m, varnames);
    }
    if (first) {
      out = negative ? "-" + body : body;
      first = false;
    } else {
      out += negative ? " - " : " + ";
      out += body;
    }
  }
  return out;
}

std::vector<std::string> default_varnames(std::size_t n,
                                          const std::string& stem) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back(stem + std::to_string(i + 1));
  return names;
}

Rational exact_rational(double value) {
  if (!std::isfinite(value)) {
    throw std::domain_error("cannot convert non-finite value to a rational");
  }
  Rational r(value);
  r.canonicalize();
  return r;
}

Rational rationalize(double value, const BigInt& max_denominator) {
  if (max_denominator < 1) {
    throw std::invalid_argument("rationalize: denominator cap must be >= 1");
  }
  Rational x = exact_rational(value);
  if (x.get_den() <= max_denominator) return x;
  // Continued fraction convergents p/q, then the best semiconvergent.
  BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Rational rest = x;
  while (true) {
    BigInt a;
    mpz_fdiv_q(a.get_mpz_t(), rest.get_num_mpz_t(), rest.get_den_mpz_t());
    const BigInt q2 = q0 + a * q1;
    if (q2 > max_denominator) break;
    const BigInt p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const Rational frac = rest - Rational(a);
    if (frac == 0) break;
    rest = 1 / frac;
  }
  const BigInt k = (max_denominator - q0) / q1;
  const Rational convergent(p1, q1);
  const Rational semi(p0 + k * p1, q0 + k * q1);
  Rational best = abs(semi - x) < abs(convergent - x) ? semi : convergent;
  best.canonicalize();
  return best;
}

}  // namespace ssos
