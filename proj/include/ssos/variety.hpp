#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssos/polynomial.hpp"

namespace ssos {

/// V(h) = {x in R^n : h_1(x) = ... = h_l(x) = 0} with an optional declared
/// real dimension d.  The dimension is an input; it is never computed.
struct VarietySpec {
  std::size_t nvars = 0;
  std::vector<Polynomial> generators;
  std::optional<unsigned> dimension;
  /// Names used for text I/O; defaults to x1..xn when empty.
  std::vector<std::string> varnames;

  /// Throws std::invalid_argument when generators live in another ring or
  /// the dimension exceeds nvars.
  void validate() const;
  std::vector<std::string> names() const;
};

/// Entry (t, j) is dh_j/dx_t, so rows index variables and columns index
/// generators.
using JacobianMatrix = std::vector<std::vector<Polynomial>>;

JacobianMatrix jacobian(const VarietySpec& V);

struct MinorVector {
  unsigned order = 0;
  std::vector<Polynomial> minors;
};

/// All t x t minors of J(h), row subsets outer and column subsets inner,
/// both in lexicographic order.
MinorVector minor_vector(const VarietySpec& V, unsigned t);

/// Determinant of a square polynomial matrix by cofactor expansion.
Polynomial determinant(const std::vector<std::vector<Polynomial>>& m);

struct SingularSystem {
  VarietySpec system;
  unsigned order = 0;
  /// True when n - d > min(n, l): no minors exist and the system is h alone.
  bool minors_empty = false;
};

/// Generators (h, m_{n-d}(h)).  Requires V.dimension with d < n.
SingularSystem singular_system(const VarietySpec& V);

Eigen::MatrixXd evaluate_jacobian(const JacobianMatrix& J,
                                  std::span<const double> point);

/// Number of singular values above tol * max(sigma_max, 1).
int numeric_rank(const JacobianMatrix& J, std::span<const double> point,
                 double tol);

/// Exact rank of J(point) by rational Gaussian elimination.
int exact_rank(const JacobianMatrix& J, std::span<const Rational> point);

enum class PointClass { Regular, Singular, NotOnVariety };
std::string to_string(PointClass c);

/// NotOnVariety when max_j |h_j(point)| > tol, otherwise Regular iff the
/// numeric rank of J(h)(point) equals n - d.
PointClass classify_point(const VarietySpec& V, std::span<const double> point,
                          double tol, double rank_tol = 1e-8);

struct ProjectionOptions {
  int max_iterations = 50;
  double residual_tol = 1e-12;
};

/// Gauss-Newton projection onto V(h) using pseudo-inverse steps.  Returns
/// nullopt when the residual does not reach residual_tol.
std::optional<std::vector<double>> newton_project(
    const VarietySpec& V, const JacobianMatrix& J, std::vector<double> x,
    const ProjectionOptions& opts = {});

struct SearchOptions {
  ProjectionOptions projection;
  double classify_tol = 1e-10;
  double rank_tol = 1e-8;
  /// Absolute floor on the (n-d)-th singular value of J at the projected
  /// point; Newton limits on the singular locus fall below it.
  double min_singular_value = 1e-4;
  int batch = 64;
};

struct SearchResult {
  std::vector<double> point;
  long trial = -1;
};

/// Samples uniformly in the ball, projects onto V and classifies.  Trial i
/// draws from a substream derived from (seed, i); the lowest successful
/// trial index wins, so results do not depend on thread count.
std::optional<SearchResult> regular_point_search(
    const VarietySpec& V, std::span<const double> center, double radius,
    long trials, std::uint64_t seed, const SearchOptions& opts = {});

/// Single-threaded reference implementation of regular_point_search.
std::optional<SearchResult> regular_point_search_serial(
    const VarietySpec& V, std::span<const double> center, double radius,
    long trials, std::uint64_t seed, const SearchOptions& opts = {});

/// splitmix64 finalizer used to derive per-trial substreams.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace ssos
