#include "ssos/certify.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

#include "ssos/sdp.hpp"

namespace ssos {

namespace {

using nlohmann::json;

Rational to_rational(double v) { return rationalize(v, BigInt(kRationalizeDenominator)); }

Eigen::MatrixXd to_double(const std::vector<std::vector<Rational>>& G) {
  const auto N = static_cast<Eigen::Index>(G.size());
  Eigen::MatrixXd out(N, N);
  for (Eigen::Index a = 0; a < N; ++a)
    for (Eigen::Index b = 0; b < N; ++b) out(a, b) = G[a][b].get_d();
  return out;
}

void check_shapes(const RationalCertificate& c, const std::vector<Polynomial>& h) {
  const std::size_t N = c.basis.size();
  if (c.gram.size() != N) throw std::invalid_argument("certificate: gram has wrong size");
  for (const auto& row : c.gram)
    if (row.size() != N) throw std::invalid_argument("certificate: gram is not square");
  if (c.multipliers.size() != h.size() || c.multiplier_bases.size() != h.size())
    throw std::invalid_argument("certificate: " + std::to_string(c.multipliers.size()) +
                                " multipliers for " + std::to_string(h.size()) + " generators");
  for (std::size_t t = 0; t < h.size(); ++t)
    if (c.multipliers[t].size() != c.multiplier_bases[t].size())
      throw std::invalid_argument("certificate: multiplier " + std::to_string(t) +
                                  " does not match its basis");
}

}  // namespace

SOSCertificate make_certificate(const DualSolution& dual) {
  if (dual.status != RelaxationStatus::Optimal)
    throw std::invalid_argument("make_certificate: dual status is " + to_string(dual.status));
  SOSCertificate c;
  c.xi = dual.xi;
  c.basis = dual.basis;
  c.gram = 0.5 * (dual.gram + dual.gram.transpose());
  c.multiplier_bases = dual.multiplier_bases;
  c.multipliers = dual.multipliers;
  return c;
}

std::vector<Polynomial> gram_to_squares(const Eigen::MatrixXd& G, const MonomialBasis& basis,
                                        double tol) {
  if (G.rows() != G.cols() || static_cast<std::size_t>(G.rows()) != basis.size())
    throw std::invalid_argument("gram_to_squares: gram does not match the basis");
  if (G.size() > 0 && (G - G.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1 + G.norm()))
    throw std::invalid_argument("gram_to_squares: gram is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
  const auto& lambda = eig.eigenvalues();
  if (G.rows() > 0 && lambda(0) < -tol)
    throw std::invalid_argument("gram_to_squares: eigenvalue " + std::to_string(lambda(0)) +
                                " below -tol");
  std::vector<Polynomial> out;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) <= 0) continue;
    const double s = std::sqrt(lambda(i));
    Polynomial q(basis.n);
    for (std::size_t a = 0; a < basis.size(); ++a) {
      const double c = s * eig.eigenvectors()(static_cast<Eigen::Index>(a), i);
      if (c != 0) q.add_term(basis.monomials[a], exact_rational(c));
    }
    if (!q.is_zero()) out.push_back(std::move(q));
  }
  return out;
}

Polynomial gram_polynomial(const std::vector<std::vector<Rational>>& G,
                           const MonomialBasis& basis) {
  Polynomial out(basis.n);
  for (std::size_t a = 0; a < basis.size(); ++a)
    for (std::size_t b = 0; b < basis.size(); ++b)
      if (G[a][b] != 0) out.add_term(basis.monomials[a] * basis.monomials[b], G[a][b]);
  return out;
}

RationalCertificate rationalize(const SOSCertificate& cert) {
  RationalCertificate r;
  r.xi = to_rational(cert.xi);
  r.basis = cert.basis;
  const auto N = cert.gram.rows();
  r.gram.assign(N, std::vector<Rational>(N));
  // Round the upper triangle and mirror it so the result stays symmetric.
  for (Eigen::Index a = 0; a < N; ++a)
    for (Eigen::Index b = a; b < N; ++b)
      r.gram[a][b] = r.gram[b][a] = to_rational(cert.gram(a, b));
  r.multiplier_bases = cert.multiplier_bases;
  for (const auto& u : cert.multipliers) {
    std::vector<Rational> q(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) q[i] = to_rational(u(i));
    r.multipliers.push_back(std::move(q));
  }
  return r;
}

VerificationReport verify_certificate(const RationalCertificate& cert, const Polynomial& h0,
                                      const std::vector<Polynomial>& h, double tol) {
  check_shapes(cert, h);
  const std::size_t n = h0.nvars();
  if (cert.basis.n != n) throw std::invalid_argument("certificate: basis is in another ring");
  for (const auto& g : h)
    if (g.nvars() != n) throw std::invalid_argument("certificate: generator in another ring");

  Polynomial res = h0 - Polynomial::constant(n, cert.xi) - gram_polynomial(cert.gram, cert.basis);
  for (std::size_t t = 0; t < h.size(); ++t) {
    Polynomial u(n);
    for (std::size_t i = 0; i < cert.multipliers[t].size(); ++i)
      if (cert.multipliers[t][i] != 0)
        u.add_term(cert.multiplier_bases[t].monomials[i], cert.multipliers[t][i]);
    res = res - h[t] * u;
  }
  VerificationReport rep;
  rep.max_residual = res.max_abs_coefficient();
  rep.max_residual_value = rep.max_residual.get_d();
  rep.residual = std::move(res);
  rep.gram_min_eigenvalue = cert.basis.size() == 0 ? 0.0 : min_eigenvalue(to_double(cert.gram));
  rep.pass = rep.max_residual_value <= tol && rep.gram_min_eigenvalue >= -tol;
  return rep;
}

VerificationReport verify_certificate(const SOSCertificate& cert, const Polynomial& h0,
                                      const std::vector<Polynomial>& h, double tol) {
  if (cert.gram.rows() != cert.gram.cols() ||
      static_cast<std::size_t>(cert.gram.rows()) != cert.basis.size())
    throw std::invalid_argument("certificate: gram does not match the basis");
  if (cert.multipliers.size() != cert.multiplier_bases.size())
    throw std::invalid_argument("certificate: multiplier count mismatch");
  for (std::size_t t = 0; t < cert.multipliers.size(); ++t)
    if (static_cast<std::size_t>(cert.multipliers[t].size()) != cert.multiplier_bases[t].size())
      throw std::invalid_argument("certificate: multiplier " + std::to_string(t) +
                                  " does not match its basis");
  return verify_certificate(rationalize(cert), h0, h, tol);
}

VanishingReport vanishing_check(const Polynomial& p, const VarietySpec& system,
                                const PointSampler& sampler, int count, std::uint64_t seed,
                                double tol) {
  if (!sampler) throw std::invalid_argument("vanishing_check: no sampler");
  if (p.nvars() != system.nvars)
    throw std::invalid_argument("vanishing_check: polynomial not over the system variables");
  VanishingReport rep;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    const auto z = sampler(rng);
    if (!z) continue;
    rep.max_abs = std::max(rep.max_abs, std::abs(evaluate(p, std::span<const double>(*z))));
    ++rep.samples;
  }
  if (rep.samples == 0) throw std::runtime_error("vanishing_check: no sample succeeded");
  rep.pass = rep.max_abs <= tol;
  return rep;
}

PointSampler projection_sampler(const VarietySpec& system) {
  system.validate();
  return [system, J = jacobian(system)](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    std::vector<double> x(system.nvars);
    for (auto& v : x) v = box(rng);
    return newton_project(system, J, std::move(x));
  };
}

// ---------------------------------------------------------------------------

std::string certificate_to_json(const SOSCertificate& cert,
                                const std::vector<std::string>& varnames,
                                std::optional<double> residual_norm) {
  json j;
  j["xi"] = cert.xi;
  j["variables"] = varnames;
  json basis = json::array();
  for (const auto& m : cert.basis.monomials) basis.push_back(to_string(m, varnames));
  j["basis"] = basis;
  json gram = json::array();
  for (Eigen::Index a = 0; a < cert.gram.rows(); ++a)
    for (Eigen::Index b = 0; b <= a; ++b) gram.push_back(cert.gram(a, b));
  j["gram"] = gram;
  json mult = json::array();
  for (std::size_t t = 0; t < cert.multipliers.size(); ++t) {
    json u;
    u["degree"] = cert.multiplier_bases[t].k;
    u["coefficients"] = std::vector<double>(cert.multipliers[t].data(),
                                            cert.multipliers[t].data() + cert.multipliers[t].size());
    mult.push_back(u);
  }
  j["multipliers"] = mult;
  j["residual_norm"] = residual_norm ? json(*residual_norm) : json(nullptr);
  return j.dump(2);
}

namespace {

Rational read_number(const json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (v.is_number()) return exact_rational(v.get<double>());
  if (v.is_string()) {
    try {
      Rational r(v.get<std::string>());
      r.canonicalize();
      return r;
    } catch (const std::invalid_argument&) {
    }
  }
  throw std::invalid_argument(where + ": expected a number or a rational string");
}

const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw std::invalid_argument(where + "/" + key + ": missing");
  return j.at(key);
}

}  // namespace

RationalCertificate certificate_from_json(const std::string& text,
                                          const std::vector<std::string>& varnames) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("certificate: ") + e.what());
  }
  RationalCertificate c;
  c.xi = read_number(field(j, "xi", ""), "/xi");

  const json& basis = field(j, "basis", "");
  if (!basis.is_array()) throw std::invalid_argument("/basis: expected an array");
  c.basis.n = varnames.size();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const std::string where = "/basis/" + std::to_string(i);
    if (!basis[i].is_string()) throw std::invalid_argument(where + ": expected monomial text");
    Polynomial p;
    try {
      p = parse(basis[i].get<std::string>(), varnames);
    } catch (const std::exception& e) {
      throw std::invalid_argument(where + ": " + e.what());
    }
    if (p.size() != 1 || p.terms().begin()->second != 1)
      throw std::invalid_argument(where + ": not a monomial");
    const Monomial& m = p.terms().begin()->first;
    if (c.basis.index.count(m)) throw std::invalid_argument(where + ": repeated monomial");
    c.basis.index[m] = c.basis.monomials.size();
    c.basis.monomials.push_back(m);
    c.basis.k = std::max(c.basis.k, m.degree());
  }

  const std::size_t N = c.basis.size();
  const json& gram = field(j, "gram", "");
  if (!gram.is_array() || gram.size() != N * (N + 1) / 2)
    throw std::invalid_argument("/gram: expected " + std::to_string(N * (N + 1) / 2) +
                                " lower-triangle entries");
  c.gram.assign(N, std::vector<Rational>(N));
  std::size_t pos = 0;
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b <= a; ++b, ++pos)
      c.gram[a][b] = c.gram[b][a] = read_number(gram[pos], "/gram/" + std::to_string(pos));

  const json& mult = field(j, "multipliers", "");
  if (!mult.is_array()) throw std::invalid_argument("/multipliers: expected an array");
  for (std::size_t t = 0; t < mult.size(); ++t) {
    const std::string where = "/multipliers/" + std::to_string(t);
    const json& deg = field(mult[t], "degree", where);
    if (!deg.is_number_unsigned()) throw std::invalid_argument(where + "/degree: expected a count");
    MonomialBasis B = monomial_basis(varnames.size(), deg.get<unsigned>());
    const json& coeffs = field(mult[t], "coefficients", where);
    if (!coeffs.is_array() || coeffs.size() != B.size())
      throw std::invalid_argument(where + "/coefficients: expected " + std::to_string(B.size()) +
                                  " entries");
    std::vector<Rational> u;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      u.push_back(read_number(coeffs[i], where + "/coefficients/" + std::to_string(i)));
    c.multiplier_bases.push_back(std::move(B));
    c.multipliers.push_back(std::move(u));
  }
  return c;
}

}  // namespace ssos
