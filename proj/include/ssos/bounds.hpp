#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ssos/polynomial.hpp"

namespace ssos {

/// A non-negative integer that may be far too large to store.
///
/// Exact holds the integer itself.  Tower(1, E) is 2^E and Tower(2, E) is
/// 2^(2^E).  Expr is a symbolic node over other values.  Exact is used
/// whenever the value has at most kExactBitCap bits.
///
/// Comparisons between Exact and Tower values are exact.  Expr values are
/// compared through rigorous interval enclosures of iterated base-2
/// logarithms; when enclosures overlap and the trees differ the comparison
/// throws std::domain_error instead of guessing.
class BoundValue {
 public:
  static constexpr std::size_t kExactBitCap = 1000000;

  enum class Kind { Exact, Tower, Expr };
  enum class Op { Add, Mul, Half, Max, Pow2, Pow, Bit };

  BoundValue() = default;

  static BoundValue exact(const BigInt& v);
  /// height 1 or 2.  normalize = false keeps the tower form even when the
  /// value fits under the cap.
  static BoundValue tower(int height, const BigInt& top, bool normalize = true);

  static BoundValue add(const BoundValue& a, const BoundValue& b);
  static BoundValue mul(const BoundValue& a, const BoundValue& b);
  /// a / 2, rounding an odd exact value up.
  static BoundValue half(const BoundValue& a);
  static BoundValue max(const BoundValue& a, const BoundValue& b);
  static BoundValue pow2(const BoundValue& a);
  static BoundValue pow(const BoundValue& base, const BoundValue& exponent);
  static BoundValue bit(const BoundValue& a);

  Kind kind() const { return kind_; }
  bool is_exact() const { return kind_ == Kind::Exact; }
  const BigInt& value() const;
  int height() const;
  const BigInt& top() const;
  Op op() const;
  const std::vector<BoundValue>& children() const;

  /// Decimal for Exact, "2^E" / "2^2^E" for towers (E replaced by its bit
  /// length when E itself exceeds the cap), functional notation for Expr.
  std::string to_string() const;

  bool structurally_equal(const BoundValue& other) const;

  friend int compare(const BoundValue& a, const BoundValue& b);
  friend bool operator<(const BoundValue& a, const BoundValue& b) {
    return compare(a, b) < 0;
  }
  friend bool operator>(const BoundValue& a, const BoundValue& b) {
    return compare(a, b) > 0;
  }
  friend bool operator<=(const BoundValue& a, const BoundValue& b) {
    return compare(a, b) <= 0;
  }
  friend bool operator==(const BoundValue& a, const BoundValue& b) {
    return compare(a, b) == 0;
  }

 private:
  struct Node {
    Op op;
    std::vector<BoundValue> children;
  };

  Kind kind_ = Kind::Exact;
  BigInt number_;  // Exact value or tower top exponent.
  int height_ = 0;
  std::shared_ptr<const Node> node_;

  static BoundValue make_expr(Op op, std::vector<BoundValue> children);
};

int compare(const BoundValue& a, const BoundValue& b);

/// 1 for d = 0, otherwise the k with 2^(k-1) <= d < 2^k.
unsigned long bit(const BigInt& d);

/// d (2d - 1)^(n + s - 1).
BigInt c_bound(unsigned long n, const BigInt& d, unsigned long s);

/// 2^(2^E) with E = 2^(D^(4^n)) + s^(2^n) D^(16^n bit(d)), D = max(2, d).
/// E is exact whenever D^(4^n) <= 10^6.
BoundValue b_bound(unsigned long n, const BigInt& d, unsigned long s);
BoundValue b_bound(unsigned long n, const BoundValue& d, unsigned long s);

/// Inner exponent E of b_bound when it is computed exactly.
std::optional<BigInt> b_exponent(unsigned long n, const BigInt& d,
                                 unsigned long s);

struct WBound {
  BoundValue c_branch;
  BoundValue b_branch;
  BoundValue value;
};

/// max{d (c(n+l, d, n+l) - 1), b(n+l, d, l+n+1)/2 + d}; requires d >= 2.
WBound w_bound(unsigned long n, unsigned long d, unsigned long l);

/// b(t+l, 2w, l+t+1)/2 + d_gen.
BoundValue r_bound(unsigned long t, unsigned long d_gen, unsigned long l,
                   const BoundValue& w);

/// c(n+l, d+1, n+l); requires d >= 2.
BigInt cardinality_bound(unsigned long n, unsigned long d, unsigned long l);

}  // namespace ssos
