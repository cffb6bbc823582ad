#include "ssos/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ssos {

namespace {

std::size_t bitlen(const BigInt& v) {
  return v == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2);
}

bool is_power_of_two(const BigInt& v) {
  return v > 0 && mpz_popcount(v.get_mpz_t()) == 1;
}

BigInt power_of_two(const BigInt& e) {
  BigInt r = 1;
  mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), e.get_ui());
  return r;
}

// Sign of 2^a - b for a >= 0.
int cmp_pow2(const BigInt& a, const BigInt& b) {
  if (b <= 0) return 1;
  const BigInt len = static_cast<unsigned long>(bitlen(b));
  if (a >= len) return 1;
  if (a < len - 1) return -1;
  return is_power_of_two(b) ? 0 : -1;
}

int sign(int v) { return (v > 0) - (v < 0); }

// Exact comparison of values of the form N, 2^E or 2^(2^E).
int compare_exact_forms(int ha, const BigInt& a, int hb, const BigInt& b) {
  if (ha < hb) return -compare_exact_forms(hb, b, ha, a);
  if (ha == hb) return sign(cmp(a, b));
  if (ha == 1) return cmp_pow2(a, b);  // hb == 0
  if (hb == 1) return cmp_pow2(a, b);  // 2^(2^a) vs 2^b
  // 2^(2^a) vs N.
  if (b <= 0) return 1;
  const BigInt len_minus_one = static_cast<unsigned long>(bitlen(b) - 1);
  const int c = cmp_pow2(a, len_minus_one);
  if (c != 0) return c;
  return is_power_of_two(b) ? 0 : -1;
}

// Enclosure of log2 iterated `level` times.
struct Enc {
  int level = 0;
  double lo = 0.0;
  double hi = 0.0;
};

constexpr double kBig = 1e300;
constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_log2(double v) { return v > 0 ? std::log2(v) : -kInf; }

Enc widen(Enc e) {
  if (std::isfinite(e.lo)) e.lo -= 1e-9 * std::max(1.0, std::abs(e.lo));
  if (std::isfinite(e.hi)) e.hi += 1e-9 * std::max(1.0, std::abs(e.hi));
  return e;
}

// Moves to the lowest level whose bounds still fit comfortably in a double.
Enc lower(Enc e) {
  while (e.level > 0 && e.hi <= 1000.0) {
    e.lo = std::exp2(e.lo);
    e.hi = std::exp2(e.hi);
    --e.level;
    e = widen(e);
  }
  return e;
}

Enc lift(Enc e, int level) {
  while (e.level < level) {
    e.lo = safe_log2(e.lo);
    e.hi = safe_log2(e.hi);
    ++e.level;
    e = widen(e);
  }
  return e;
}

Enc enclose_integer(const BigInt& v) {
  if (bitlen(v) <= 1000) {
    const double d = v.get_d();
    return widen({0, d, d});
  }
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  const double l = static_cast<double>(exp) + std::log2(mant);
  return widen({1, l, l});
}

Enc shift_up(Enc e, int by) {
  e.level += by;
  return lower(e);
}

// log2 of the enclosed value.
Enc log2_of(Enc e) {
  if (e.level > 0) {
    --e.level;
    return e;
  }
  return widen({0, safe_log2(e.lo), safe_log2(e.hi)});
}

Enc enc_add(Enc a, Enc b) {
  const int k = std::max(a.level, b.level);
  a = lift(a, k);
  b = lift(b, k);
  if (k == 0 && a.hi + b.hi < kBig) return lower(widen({0, a.lo + b.lo, a.hi + b.hi}));
  if (k == 0) return enc_add(lift(a, 1), lift(b, 1));
  return lower(widen({k, std::max(a.lo, b.lo), std::max(a.hi, b.hi) + 1.0}));
}

Enc enc_mul(Enc a, Enc b) {
  const int k = std::max(a.level, b.level);
  a = lift(a, k);
  b = lift(b, k);
  if (k == 0) {
    const double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    const double lo = *std::min_element(c, c + 4);
    const double hi = *std::max_element(c, c + 4);
    if (std::abs(hi) < kBig && std::abs(lo) < kBig) return lower(widen({0, lo, hi}));
    return enc_mul(lift(a, 1), lift(b, 1));
  }
  if (k == 1) return lower(widen({1, a.lo + b.lo, a.hi + b.hi}));
  return lower(widen({k, std::max(a.lo, b.lo), std::max(a.hi, b.hi) + 1.0}));
}

Enc enc_half(Enc a) {
  if (a.level == 0) return widen({0, a.lo / 2, (a.hi + 1) / 2});
  return lower(widen({a.level, a.lo - 1.0, a.hi}));
}

Enc enc_max(Enc a, Enc b) {
  const int k = std::max(a.level, b.level);
  a = lift(a, k);
  b = lift(b, k);
  return lower({k, std::max(a.lo, b.lo), std::max(a.hi, b.hi)});
}

Enc enc_bit(Enc a) {
  Enc l = log2_of(a);
  if (l.level == 0) {
    l.lo = std::max(l.lo, 1.0);
    l.hi = std::max(l.hi, 0.0) + 1.0;
    return widen(l);
  }
  l.hi += 1.0;
  return lower(widen(l));
}

Enc enclose(const BoundValue& v);

Enc enclose_expr(const BoundValue& v) {
  const auto& ch = v.children();
  switch (v.op()) {
    case BoundValue::Op::Add:
      return enc_add(enclose(ch[0]), enclose(ch[1]));
    case BoundValue::Op::Mul:
      return enc_mul(enclose(ch[0]), enclose(ch[1]));
    case BoundValue::Op::Half:
      return enc_half(enclose(ch[0]));
    case BoundValue::Op::Max:
      return enc_max(enclose(ch[0]), enclose(ch[1]));
    case BoundValue::Op::Pow2:
      return shift_up(enclose(ch[0]), 1);
    case BoundValue::Op::Pow:
      return shift_up(enc_mul(enclose(ch[1]), log2_of(enclose(ch[0]))), 1);
    case BoundValue::Op::Bit:
      return enc_bit(enclose(ch[0]));
  }
  throw std::logic_error("unknown bound operation");
}

Enc enclose(const BoundValue& v) {
  switch (v.kind()) {
    case BoundValue::Kind::Exact:
      return lower(enclose_integer(v.value()));
    case BoundValue::Kind::Tower:
      return shift_up(enclose_integer(v.top()), v.height());
    case BoundValue::Kind::Expr:
      return enclose_expr(v);
  }
  throw std::logic_error("unknown bound kind");
}

}  // namespace

// ---------------------------------------------------------------------------

BoundValue BoundValue::exact(const BigInt& v) {
  if (v < 0) throw std::domain_error("bound values are non-negative");
  BoundValue b;
  b.kind_ = Kind::Exact;
  b.number_ = v;
  return b;
}

BoundValue BoundValue::tower(int height, const BigInt& top, bool normalize) {
  if (height != 1 && height != 2) {
    throw std::invalid_argument("tower height must be 1 or 2");
  }
  if (top < 0) throw std::domain_error("tower exponent must be non-negative");
  if (normalize) {
    if (height == 1 && top < kExactBitCap) return exact(power_of_two(top));
    if (height == 2 && bitlen(top) < 21 && power_of_two(top) < kExactBitCap) {
      return exact(power_of_two(power_of_two(top)));
    }
  }
  BoundValue b;
  b.kind_ = Kind::Tower;
  b.height_ = height;
  b.number_ = top;
  return b;
}

BoundValue BoundValue::make_expr(Op op, std::vector<BoundValue> children) {
  BoundValue b;
  b.kind_ = Kind::Expr;
  b.node_ = std::make_shared<const Node>(Node{op, std::move(children)});
  return b;
}

const BigInt& BoundValue::value() const {
  if (kind_ != Kind::Exact) throw std::logic_error("bound value is not exact");
  return number_;
}

int BoundValue::height() const {
  if (kind_ != Kind::Tower) throw std::logic_error("bound value is not a tower");
  return height_;
}

const BigInt& BoundValue::top() const {
  if (kind_ != Kind::Tower) throw std::logic_error("bound value is not a tower");
  return number_;
}

BoundValue::Op BoundValue::op() const {
  if (kind_ != Kind::Expr) throw std::logic_error("bound value is not symbolic");
  return node_->op;
}

const std::vector<BoundValue>& BoundValue::children() const {
  if (kind_ != Kind::Expr) throw std::logic_error("bound value is not symbolic");
  return node_->children;
}

BoundValue BoundValue::add(const BoundValue& a, const BoundValue& b) {
  if (a.is_exact() && a.value() == 0) return b;
  if (b.is_exact() && b.value() == 0) return a;
  if (a.is_exact() && b.is_exact()) {
    BigInt s = a.value() + b.value();
    if (bitlen(s) <= kExactBitCap) return exact(s);
  }
  return make_expr(Op::Add, {a, b});
}

BoundValue BoundValue::mul(const BoundValue& a, const BoundValue& b) {
  if (a.is_exact() && a.value() == 0) return a;
  if (b.is_exact() && b.value() == 0) return b;
  if (a.is_exact() && a.value() == 1) return b;
  if (b.is_exact() && b.value() == 1) return a;
  if (a.is_exact() && b.is_exact() &&
      bitlen(a.value()) + bitlen(b.value()) <= kExactBitCap) {
    return exact(a.value() * b.value());
  }
  auto as_power = [](const BoundValue& v) -> std::optional<BigInt> {
    if (v.kind() == Kind::Tower && v.height() == 1) return v.top();
    if (v.is_exact() && is_power_of_two(v.value())) {
      return BigInt(static_cast<unsigned long>(bitlen(v.value()) - 1));
    }
    return std::nullopt;
  };
  const auto pa = as_power(a), pb = as_power(b);
  if (pa && pb) return tower(1, *pa + *pb);
  return make_expr(Op::Mul, {a, b});
}

BoundValue BoundValue::half(const BoundValue& a) {
  if (a.is_exact()) {
    BigInt q;
    mpz_cdiv_q_2exp(q.get_mpz_t(), a.value().get_mpz_t(), 1);
    return exact(q);
  }
  if (a.kind() == Kind::Tower && a.height() == 1 && a.top() >= 1) {
    return tower(1, a.top() - 1);
  }
  if (a.kind() == Kind::Tower && a.height() == 2 && a.top() <= kExactBitCap) {
    return tower(1, power_of_two(a.top()) - 1);
  }
  return make_expr(Op::Half, {a});
}

BoundValue BoundValue::max(const BoundValue& a, const BoundValue& b) {
  try {
    return compare(a, b) >= 0 ? a : b;
  } catch (const std::domain_error&) {
    return make_expr(Op::Max, {a, b});
  }
}

BoundValue BoundValue::pow2(const BoundValue& a) {
  if (a.is_exact()) return tower(1, a.value());
  if (a.kind() == Kind::Tower && a.height() == 1) return tower(2, a.top());
  return make_expr(Op::Pow2, {a});
}

BoundValue BoundValue::pow(const BoundValue& base, const BoundValue& exponent) {
  if (exponent.is_exact() && exponent.value() == 0) return exact(1);
  if (exponent.is_exact() && exponent.value() == 1) return base;
  if (base.is_exact() && base.value() <= 1) return base;
  if (base.is_exact() && exponent.is_exact()) {
    const BigInt& b = base.value();
    const BigInt& e = exponent.value();
    if (is_power_of_two(b)) {
      return pow2(exact(BigInt(static_cast<unsigned long>(bitlen(b) - 1)) * e));
    }
    if (e.fits_ulong_p()) {
      const double bits = e.get_d() * std::log2(b.get_d());
      if (bits <= static_cast<double>(kExactBitCap)) {
        BigInt r;
        mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e.get_ui());
        return exact(r);
      }
    }
  }
  return make_expr(Op::Pow, {base, exponent});
}

BoundValue BoundValue::bit(const BoundValue& a) {
  if (a.is_exact()) return exact(BigInt(ssos::bit(a.value())));
  if (a.kind() == Kind::Tower && a.height() == 1) return exact(a.top() + 1);
  if (a.kind() == Kind::Tower && a.height() == 2 && a.top() < kExactBitCap) {
    return exact(power_of_two(a.top()) + 1);
  }
  return make_expr(Op::Bit, {a});
}

std::string BoundValue::to_string() const {
  auto exponent_text = [](const BigInt& e) {
    if (bitlen(e) > kExactBitCap) {
      return "(" + std::to_string(bitlen(e)) + "-bit integer)";
    }
    return e.get_str();
  };
  switch (kind_) {
    case Kind::Exact:
      return number_.get_str();
    case Kind::Tower:
      return (height_ == 1 ? "2^" : "2^2^") + exponent_text(number_);
    case Kind::Expr:
      break;
  }
  const auto& ch = node_->children;
  switch (node_->op) {
    case Op::Add:
      return "(" + ch[0].to_string() + " + " + ch[1].to_string() + ")";
    case Op::Mul:
      return "(" + ch[0].to_string() + " * " + ch[1].to_string() + ")";
    case Op::Half:
      return "(" + ch[0].to_string() + ")/2";
    case Op::Max:
      return "max(" + ch[0].to_string() + ", " + ch[1].to_string() + ")";
    case Op::Pow2:
      return "2^(" + ch[0].to_string() + ")";
    case Op::Pow:
      return "(" + ch[0].to_string() + ")^(" + ch[1].to_string() + ")";
    case Op::Bit:
      return "bit(" + ch[0].to_string() + ")";
  }
  return "?";
}

bool BoundValue::structurally_equal(const BoundValue& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == Kind::Exact) return number_ == other.number_;
  if (kind_ == Kind::Tower) {
    return height_ == other.height_ && number_ == other.number_;
  }
  if (node_ == other.node_) return true;
  if (node_->op != other.node_->op ||
      node_->children.size() != other.node_->children.size()) {
    return false;
  }
  for (std::size_t i = 0; i < node_->children.size(); ++i) {
    if (!node_->children[i].structurally_equal(other.node_->children[i])) {
      return false;
    }
  }
  return true;
}

namespace {

bool is_op(const BoundValue& v, BoundValue::Op op) {
  return v.kind() == BoundValue::Kind::Expr && v.op() == op;
}

// Sound shortcuts for shapes that enclosures cannot separate.
std::optional<int> structural_compare(const BoundValue& a, const BoundValue& b) {
  if (is_op(a, BoundValue::Op::Half) && a.children()[0].structurally_equal(b)) {
    return compare(b, BoundValue::exact(0)) == 0 ? 0 : -1;
  }
  if (is_op(a, BoundValue::Op::Add)) {
    const auto& ch = a.children();
    for (int i = 0; i < 2; ++i) {
      if (ch[i].structurally_equal(b)) return compare(ch[1 - i], BoundValue::exact(0));
    }
    if (is_op(b, BoundValue::Op::Add)) {
      const auto& dh = b.children();
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          if (ch[i].structurally_equal(dh[j])) return compare(ch[1 - i], dh[1 - j]);
        }
      }
    }
  }
  if (is_op(a, BoundValue::Op::Pow2) && is_op(b, BoundValue::Op::Pow2)) {
    return compare(a.children()[0], b.children()[0]);
  }
  return std::nullopt;
}

}  // namespace

int compare(const BoundValue& a, const BoundValue& b) {
  if (a.kind() != BoundValue::Kind::Expr && b.kind() != BoundValue::Kind::Expr) {
    const int ha = a.is_exact() ? 0 : a.height();
    const int hb = b.is_exact() ? 0 : b.height();
    return compare_exact_forms(ha, a.is_exact() ? a.value() : a.top(), hb,
                               b.is_exact() ? b.value() : b.top());
  }
  if (a.structurally_equal(b)) return 0;
  if (auto s = structural_compare(a, b)) return *s;
  if (auto s = structural_compare(b, a)) return -*s;
  Enc ea = enclose(a), eb = enclose(b);
  const int k = std::max(ea.level, eb.level);
  ea = lift(ea, k);
  eb = lift(eb, k);
  if (ea.hi < eb.lo) return -1;
  if (eb.hi < ea.lo) return 1;
  throw std::domain_error("cannot order " + a.to_string() + " and " +
                          b.to_string() + " with the available precision");
}

// ---------------------------------------------------------------------------

unsigned long bit(const BigInt& d) {
  if (d < 0) throw std::domain_error("bit: negative argument");
  return d == 0 ? 1 : bitlen(d);
}

BigInt c_bound(unsigned long n, const BigInt& d, unsigned long s) {
  if (d < 1) throw std::domain_error("c(n, d, s) requires d >= 1");
  if (n + s == 0) {
    if (d == 1) return 1;
    throw std::domain_error("c(n, d, s) is not an integer for n = s = 0");
  }
  BigInt r;
  const BigInt base = 2 * d - 1;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), n + s - 1);
  return d * r;
}

std::optional<BigInt> b_exponent(unsigned long n, const BigInt& d,
                                 unsigned long s) {
  const BigInt D = d < 2 ? BigInt(2) : d;
  if (n > 10) return std::nullopt;  // 4^n > 10^6 already.
  const unsigned long four_n = 1UL << (2 * n);
  BigInt P = 1;
  for (unsigned long i = 0; i < four_n; ++i) {
    P *= D;
    if (P > 1000000) return std::nullopt;
  }
  BigInt E = power_of_two(P);
  BigInt s_term, d_term;
  mpz_ui_pow_ui(s_term.get_mpz_t(), s, 1UL << n);
  mpz_pow_ui(d_term.get_mpz_t(), D.get_mpz_t(), (1UL << (4 * n)) * bit(d));
  E += s_term * d_term;
  return E;
}

BoundValue b_bound(unsigned long n, const BigInt& d, unsigned long s) {
  if (d < 0) throw std::domain_error("b(n, d, s) requires d >= 0");
  if (auto E = b_exponent(n, d, s)) return BoundValue::tower(2, *E);
  return b_bound(n, BoundValue::exact(d), s);
}

BoundValue b_bound(unsigned long n, const BoundValue& d, unsigned long s) {
  if (d.is_exact()) {
    if (auto E = b_exponent(n, d.value(), s)) return BoundValue::tower(2, *E);
  }
  using B = BoundValue;
  const B two = B::exact(2);
  const B D = B::max(two, d);
  const B n_big = B::exact(BigInt(n));
  const B P = B::pow(D, B::pow2(B::mul(two, n_big)));
  const B term1 = B::pow2(P);
  const B s_pow = B::pow(B::exact(BigInt(s)), B::pow2(n_big));
  const B d_pow =
      B::pow(D, B::mul(B::pow2(B::mul(B::exact(4), n_big)), B::bit(d)));
  const B E = B::add(term1, B::mul(s_pow, d_pow));
  return B::pow2(B::pow2(E));
}

WBound w_bound(unsigned long n, unsigned long d, unsigned long l) {
  if (d < 2) throw std::domain_error("w requires d >= 2");
  WBound w;
  const BigInt dd(d);
  w.c_branch = BoundValue::exact(dd * (c_bound(n + l, dd, n + l) - 1));
  w.b_branch = BoundValue::add(BoundValue::half(b_bound(n + l, dd, l + n + 1)),
                               BoundValue::exact(dd));
  w.value = BoundValue::max(w.c_branch, w.b_branch);
  return w;
}

BoundValue r_bound(unsigned long t, unsigned long d_gen, unsigned long l,
                   const BoundValue& w) {
  const BoundValue two_w = BoundValue::mul(BoundValue::exact(2), w);
  const BoundValue b = two_w.is_exact()
                           ? b_bound(t + l, two_w.value(), l + t + 1)
                           : b_bound(t + l, two_w, l + t + 1);
  return BoundValue::add(BoundValue::half(b), BoundValue::exact(BigInt(d_gen)));
}

BigInt cardinality_bound(unsigned long n, unsigned long d, unsigned long l) {
  if (d < 2) throw std::domain_error("cardinality bound requires d >= 2");
  return c_bound(n + l, BigInt(d + 1), n + l);
}

}  // namespace ssos
