#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ssos/variety.hpp"

namespace ssos {

/// A polynomial map phi: W -> V given by its components over the source
/// variables.  Morphisms are data; nothing here constructs resolutions.
struct ResolutionMorphism {
  std::string name;
  VarietySpec source;
  VarietySpec target;
  std::vector<Polynomial> components;
  /// "cusp", "lorentz-cylinder", "box" or empty for none.
  std::string sampler;

  void validate() const;
};

/// Known entries: "cusp" and "lorentz-cylinder".
ResolutionMorphism catalog(const std::string& name);
std::vector<std::string> catalog_names();

/// f o phi over the source variables.
Polynomial pullback(const Polynomial& f, const ResolutionMorphism& phi);

/// One source point.  Parameterized samplers are exact on W; "box" draws
/// uniformly from [-2, 2]^t and Newton-projects, returning nullopt when the
/// projection fails.
std::optional<std::vector<double>> sample_source(const ResolutionMorphism& phi,
                                                 std::mt19937_64& rng);

struct DivisionCertificate {
  std::size_t target_generator = 0;
  std::size_t source_generator = 0;
  /// p o phi = quotient * h_W[source_generator].
  Polynomial quotient;
};

struct WellDefinedReport {
  int samples_requested = 0;
  int samples_used = 0;
  double max_violation = 0.0;
  bool pass = false;
  /// Attempted only when the target has a single generator.
  bool symbolic_attempted = false;
  std::optional<DivisionCertificate> certificate;
};

/// Checks phi(W) in V on sampled points of W and, for single-generator
/// targets, by exact division of p o phi by each source generator.
WellDefinedReport check_welldefined(const ResolutionMorphism& phi, int samples,
                                    std::uint64_t seed, double tol);

/// Variant with caller-supplied source points.
WellDefinedReport check_welldefined(const ResolutionMorphism& phi,
                                    const std::vector<std::vector<double>>& points,
                                    double tol);

}  // namespace ssos
