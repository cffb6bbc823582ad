#pragma once

#include <string>
#include <vector>

#include "ssos/polynomial.hpp"

namespace ssos {

/// h_KKT = (h, grad h0 - sum_j lambda_j grad h_j) over R[x, lambda], with
/// the multipliers appended after x.
struct KKTSystem {
  std::size_t n = 0;
  std::size_t l = 0;
  /// First the l embedded generators, then the n stationarity polynomials.
  std::vector<Polynomial> polynomials;
  /// h0 embedded into R[x, lambda].
  Polynomial objective;

  std::size_t nvars() const { return n + l; }
  /// x names followed by λ1..λl.
  std::vector<std::string> varnames(const std::vector<std::string>& xnames) const;
};

/// l = 0 gives the gradient system grad h0 = 0.
KKTSystem build_kkt(const Polynomial& h0, const std::vector<Polynomial>& h);

/// max |p(x, lambda)| over the system polynomials.
double kkt_residual(const KKTSystem& sys, std::span<const double> x,
                    std::span<const double> lambda);

struct SlackProblem {
  Polynomial h0;
  std::vector<Polynomial> h;
};

/// Rewrites min f s.t. g >= 0 as min f s.t. g_j - z_j^2 = 0 over (y, z).
SlackProblem slack_transform(const Polynomial& f, const std::vector<Polynomial>& g);

}  // namespace ssos
