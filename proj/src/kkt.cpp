#include "ssos/kkt.hpp"

#include <cmath>

namespace ssos {

std::vector<std::string> KKTSystem::varnames(
    const std::vector<std::string>& xnames) const {
  if (xnames.size() != n) {
    throw std::invalid_argument("expected " + std::to_string(n) + " x names");
  }
  std::vector<std::string> names = xnames;
  for (std::size_t j = 0; j < l; ++j) names.push_back("λ" + std::to_string(j + 1));
  return names;
}

KKTSystem build_kkt(const Polynomial& h0, const std::vector<Polynomial>& h) {
  const std::size_t n = h0.nvars();
  for (const auto& hj : h) {
    if (hj.nvars() != n) {
      throw std::invalid_argument("build_kkt: generator ring has " +
                                  std::to_string(hj.nvars()) +
                                  " variables, objective has " +
                                  std::to_string(n));
    }
  }
  KKTSystem sys;
  sys.n = n;
  sys.l = h.size();
  const std::size_t total = sys.nvars();
  sys.objective = extend_ring(h0, total);
  for (const auto& hj : h) sys.polynomials.push_back(extend_ring(hj, total));
  for (std::size_t t = 0; t < n; ++t) {
    Polynomial stationarity = extend_ring(differentiate(h0, t), total);
    for (std::size_t j = 0; j < h.size(); ++j) {
      const Polynomial lambda = Polynomial::variable(total, n + j);
      stationarity =
          stationarity - lambda * extend_ring(differentiate(h[j], t), total);
    }
    sys.polynomials.push_back(std::move(stationarity));
  }
  return sys;
}

double kkt_residual(const KKTSystem& sys, std::span<const double> x,
                    std::span<const double> lambda) {
  if (x.size() != sys.n || lambda.size() != sys.l) {
    throw std::invalid_argument("kkt_residual: dimension mismatch");
  }
  std::vector<double> point(x.begin(), x.end());
  point.insert(point.end(), lambda.begin(), lambda.end());
  double r = 0.0;
  for (const auto& p : sys.polynomials) r = std::max(r, std::abs(evaluate(p, point)));
  return r;
}

SlackProblem slack_transform(const Polynomial& f, const std::vector<Polynomial>& g) {
  if (g.empty()) throw std::invalid_argument("slack_transform: empty g");
  const std::size_t r = f.nvars();
  const std::size_t m = g.size();
  SlackProblem out;
  out.h0 = extend_ring(f, r + m);
  for (std::size_t j = 0; j < m; ++j) {
    if (g[j].nvars() != r) {
      throw std::invalid_argument("slack_transform: ring mismatch in g");
    }
    const Polynomial z = Polynomial::variable(r + m, r + j);
    out.h.push_back(extend_ring(g[j], r + m) - z * z);
  }
  return out;
}

}  // namespace ssos
