#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ssos/variety.hpp"

namespace ssos::fixtures {

inline VarietySpec make_variety(const std::vector<std::string>& names,
                                const std::vector<std::string>& gens,
                                std::optional<unsigned> dim) {
  VarietySpec V;
  V.nvars = names.size();
  V.varnames = names;
  for (const auto& g : gens) V.generators.push_back(parse(g, names));
  V.dimension = dim;
  return V;
}

inline const std::vector<std::string> kX2 = {"x1", "x2"};
inline const std::vector<std::string> kX3 = {"x1", "x2", "x3"};

inline VarietySpec whitney() { return make_variety(kX3, {"x1^2 - x2^2*x3"}, 2); }
inline VarietySpec cartan() {
  return make_variety(kX3, {"x3*(x1^2 + x2^2) - x1^3"}, 2);
}
inline VarietySpec cusp() { return make_variety(kX2, {"x1^3 - x2^2"}, 1); }
inline VarietySpec lorentz_cone() {
  return make_variety(kX3, {"x1^2 + x2^2 - x3^2"}, 2);
}
inline VarietySpec modified_umbrella() {
  return make_variety(kX3, {"x1^2 - x3^2*(x3 + x2^2)"}, 2);
}

// Regular points by explicit parameterization.
inline std::vector<double> whitney_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double a = 0, b = 0;
  while (std::abs(a) < 0.05 || std::abs(b) < 0.05) {
    a = u(rng);
    b = u(rng);
  }
  return {a * b, a, b * b};
}

inline std::vector<double> cartan_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double a = 0, b = 0;
  while (std::abs(a) < 0.05 || std::abs(b) < 0.05) {
    a = u(rng);
    b = u(rng);
  }
  return {a, b, a * a * a / (a * a + b * b)};
}

inline std::vector<double> cusp_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double s = 0;
  while (std::abs(s) < 0.05) s = u(rng);
  return {s * s, s * s * s};
}

}  // namespace ssos::fixtures
