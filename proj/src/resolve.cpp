#include "ssos/resolve.hpp"

#include <cmath>
#include <numbers>

namespace ssos {

void ResolutionMorphism::validate() const {
  source.validate();
  target.validate();
  if (components.size() != target.nvars) {
    throw std::invalid_argument("morphism has " +
                                std::to_string(components.size()) +
                                " components, target has " +
                                std::to_string(target.nvars) + " variables");
  }
  for (const auto& c : components) {
    if (c.nvars() != source.nvars) {
      throw std::invalid_argument("morphism component not over source variables");
    }
  }
}

namespace {

VarietySpec variety(const std::vector<std::string>& names,
                    const std::vector<std::string>& gens, unsigned dim) {
  VarietySpec V;
  V.nvars = names.size();
  V.varnames = names;
  V.dimension = dim;
  for (const auto& g : gens) V.generators.push_back(parse(g, names));
  return V;
}

}  // namespace

std::vector<std::string> catalog_names() { return {"cusp", "lorentz-cylinder"}; }

ResolutionMorphism catalog(const std::string& name) {
  ResolutionMorphism phi;
  phi.name = name;
  if (name == "cusp") {
    const std::vector<std::string> y = {"y1", "y2"};
    phi.source = variety(y, {"y1 - y2^2"}, 1);
    phi.target = variety({"x1", "x2"}, {"x1^3 - x2^2"}, 1);
    phi.components = {parse("y1", y), parse("y1*y2", y)};
    phi.sampler = "cusp";
  } else if (name == "lorentz-cylinder") {
    const std::vector<std::string> y = {"y1", "y2", "y3"};
    phi.source = variety(y, {"y1^2 + y2^2 - 1"}, 2);
    phi.target = variety({"x1", "x2", "x3"}, {"x1^2 + x2^2 - x3^2"}, 2);
    phi.components = {parse("y1*y3", y), parse("y2*y3", y), parse("y3", y)};
    phi.sampler = "lorentz-cylinder";
  } else {
    throw std::invalid_argument("unknown morphism '" + name + "'");
  }
  return phi;
}

Polynomial pullback(const Polynomial& f, const ResolutionMorphism& phi) {
  if (f.nvars() != phi.target.nvars) {
    throw std::invalid_argument("pullback: objective has " +
                                std::to_string(f.nvars()) +
                                " variables, target has " +
                                std::to_string(phi.target.nvars));
  }
  return compose(f, phi.components);
}

std::optional<std::vector<double>> sample_source(const ResolutionMorphism& phi,
                                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  if (phi.sampler == "cusp") {
    const double r = box(rng);
    return std::vector<double>{r * r, r};
  }
  if (phi.sampler == "lorentz-cylinder") {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double theta = angle(rng);
    const double s = box(rng);
    return std::vector<double>{std::cos(theta), std::sin(theta), s};
  }
  if (phi.sampler == "box") {
    if (phi.source.generators.empty()) {
      std::vector<double> x(phi.source.nvars);
      for (auto& v : x) v = box(rng);
      return x;
    }
    std::vector<double> x(phi.source.nvars);
    for (auto& v : x) v = box(rng);
    return newton_project(phi.source, jacobian(phi.source), std::move(x));
  }
  throw std::invalid_argument("no sampler for morphism '" + phi.name + "'");
}

namespace {

void symbolic_check(const ResolutionMorphism& phi, WellDefinedReport& report) {
  if (phi.target.generators.size() != 1) return;
  report.symbolic_attempted = true;
  const Polynomial pulled = compose(phi.target.generators[0], phi.components);
  for (std::size_t s = 0; s < phi.source.generators.size(); ++s) {
    const Polynomial& g = phi.source.generators[s];
    if (g.is_zero()) continue;
    auto [q, r] = divide(pulled, g);
    if (r.is_zero()) {
      report.certificate = DivisionCertificate{0, s, std::move(q)};
      return;
    }
  }
}

}  // namespace

WellDefinedReport check_welldefined(const ResolutionMorphism& phi,
                                    const std::vector<std::vector<double>>& points,
                                    double tol) {
  phi.validate();
  WellDefinedReport report;
  report.samples_requested = static_cast<int>(points.size());
  for (const auto& w : points) {
    if (w.size() != phi.source.nvars) {
      throw std::invalid_argument("check_welldefined: sample dimension mismatch");
    }
    std::vector<double> image;
    for (const auto& c : phi.components) image.push_back(evaluate(c, w));
    for (const auto& p : phi.target.generators) {
      report.max_violation = std::max(report.max_violation, std::abs(evaluate(p, image)));
    }
    ++report.samples_used;
  }
  report.pass = report.samples_used > 0 && report.max_violation <= tol;
  symbolic_check(phi, report);
  return report;
}

WellDefinedReport check_welldefined(const ResolutionMorphism& phi, int samples,
                                    std::uint64_t seed, double tol) {
  phi.validate();
  if (phi.sampler.empty()) {
    throw std::invalid_argument("check_welldefined: morphism has no sampler");
  }
  if (phi.sampler != "cusp" && phi.sampler != "lorentz-cylinder" &&
      phi.sampler != "box") {
    throw std::invalid_argument("unknown sampler '" + phi.sampler + "'");
  }
  std::vector<std::optional<std::vector<double>>> drawn(samples);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < samples; ++i) {
    std::mt19937_64 rng(substream_seed(seed, static_cast<std::uint64_t>(i)));
    drawn[i] = sample_source(phi, rng);
  }
  std::vector<std::vector<double>> points;
  for (auto& d : drawn) {
    if (d) points.push_back(std::move(*d));
  }
  WellDefinedReport report = check_welldefined(phi, points, tol);
  report.samples_requested = samples;
  return report;
}

}  // namespace ssos
