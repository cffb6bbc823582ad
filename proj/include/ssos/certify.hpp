#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssos/moment.hpp"
#include "ssos/polynomial.hpp"
#include "ssos/variety.hpp"

namespace ssos {

/// h0 - xi = v^T G v + sum_t h_t (u_t^T w_t) with v = basis and
/// w_t = multiplier_bases[t].
struct SOSCertificate {
  double xi = 0.0;
  MonomialBasis basis;
  Eigen::MatrixXd gram;
  std::vector<MonomialBasis> multiplier_bases;
  std::vector<Eigen::VectorXd> multipliers;
  /// Optional explicit squares q_i with sum q_i^2 close to v^T G v.
  std::optional<std::vector<Polynomial>> squares;
};

/// The same data with exact coefficients.
struct RationalCertificate {
  Rational xi = 0;
  MonomialBasis basis;
  /// Row-major, basis.size() x basis.size().
  std::vector<std::vector<Rational>> gram;
  std::vector<MonomialBasis> multiplier_bases;
  std::vector<std::vector<Rational>> multipliers;
};

/// Certificate built from an Optimal dual solution.
SOSCertificate make_certificate(const DualSolution& dual);

/// Eigendecomposition of G with eigenvalues below zero clipped;
/// q_i = sqrt(lambda_i) (e_i^T v).  Throws std::invalid_argument when the
/// smallest eigenvalue is below -tol or G is not symmetric.
std::vector<Polynomial> gram_to_squares(const Eigen::MatrixXd& G, const MonomialBasis& basis,
                                        double tol);

/// v^T G v with exact coefficients.
Polynomial gram_polynomial(const std::vector<std::vector<Rational>>& G,
                           const MonomialBasis& basis);

struct VerificationReport {
  Polynomial residual;
  Rational max_residual = 0;
  double max_residual_value = 0.0;
  double gram_min_eigenvalue = 0.0;
  bool pass = false;
};

inline constexpr long kRationalizeDenominator = 1000000000;

/// Rationalizes every entry with denominator at most 1e9.
RationalCertificate rationalize(const SOSCertificate& cert);

/// Exact re-expansion of h0 - xi - v^T G v - sum_t h_t (u_t^T w_t).  Passes
/// iff the largest residual coefficient and -lambda_min(G) are both <= tol.
VerificationReport verify_certificate(const RationalCertificate& cert, const Polynomial& h0,
                                      const std::vector<Polynomial>& h, double tol = 1e-7);
VerificationReport verify_certificate(const SOSCertificate& cert, const Polynomial& h0,
                                      const std::vector<Polynomial>& h, double tol = 1e-7);

struct VanishingReport {
  int samples = 0;
  double max_abs = 0.0;
  bool pass = false;
};

using PointSampler = std::function<std::optional<std::vector<double>>(std::mt19937_64&)>;

/// max |p| over sampled points of the system.  Draws count times from
/// sampler; a draw returning nullopt is skipped.  Throws when sampler is
/// empty or no draw succeeds.
VanishingReport vanishing_check(const Polynomial& p, const VarietySpec& system,
                                const PointSampler& sampler, int count, std::uint64_t seed,
                                double tol);

/// Newton projection from the box [-2, 2]^n onto V(system).
PointSampler projection_sampler(const VarietySpec& system);

/// Certificate JSON: xi, variables, basis (monomial text), gram (lower
/// triangle, row-major), multipliers (per generator: basis degree and
/// coefficients) and residual_norm.
std::string certificate_to_json(const SOSCertificate& cert,
                                 const std::vector<std::string>& varnames,
                                 std::optional<double> residual_norm = std::nullopt);

/// Numbers may be JSON numbers or exact strings such as "1/3".  Throws
/// std::invalid_argument with the offending JSON pointer.
RationalCertificate certificate_from_json(const std::string& text,
                                          const std::vector<std::string>& varnames);

}  // namespace ssos
