#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "ssos/bounds.hpp"
#include "ssos/kkt.hpp"
#include "ssos/polynomial.hpp"
#include "ssos/resolve.hpp"
#include "ssos/sdp.hpp"

namespace ssos {

/// All monomials of total degree <= k in n variables, ascending by degree
/// and descending lexicographically within a degree: 1, x1, x2, x1^2, ...
struct MonomialBasis {
  std::size_t n = 0;
  unsigned k = 0;
  std::vector<Monomial> monomials;
  std::unordered_map<Monomial, std::size_t, MonomialHash> index;

  std::size_t size() const { return monomials.size(); }
  /// Throws std::out_of_range for monomials outside the basis.
  std::size_t position(const Monomial& m) const;
};

MonomialBasis monomial_basis(std::size_t n, unsigned k);

/// L_y(p) = sum_alpha p_alpha y_alpha with y indexed by `basis`.
double riesz(const MonomialBasis& basis, const Eigen::VectorXd& y, const Polynomial& p);
Rational riesz(const MonomialBasis& basis, const std::vector<Rational>& y,
               const Polynomial& p);

/// Moment vector y_alpha = z^alpha of a point.
std::vector<Rational> point_moments(const MonomialBasis& basis,
                                    std::span<const Rational> z);

/// sum_j coeffs[j] * x_j = rhs with exact coefficients.
struct LinearEquation {
  std::map<std::size_t, Rational> coeffs;
  Rational rhs = 0;
};

/// Affine solution set {particular + basis * u} of a linear system.  basis
/// has orthonormal columns and particular is orthogonal to them.
struct AffineSolution {
  bool consistent = true;
  std::size_t rank = 0;
  Eigen::VectorXd particular;
  Eigen::MatrixXd basis;
};

/// Exact rational reduced row echelon form, then floating orthonormalization
/// of the nullspace.
AffineSolution solve_affine(std::size_t nvars, const std::vector<LinearEquation>& eqs);

/// Thrown when the order is below the smallest admissible order.
class OrderTooSmall : public std::invalid_argument {
 public:
  OrderTooSmall(unsigned requested, unsigned minimal);
  unsigned requested() const { return requested_; }
  unsigned minimal() const { return minimal_; }

 private:
  unsigned requested_, minimal_;
};

/// Smallest k with 2k >= deg h0 and k >= ceil(deg h_t / 2) for all t.
unsigned minimal_order(const Polynomial& h0, const std::vector<Polynomial>& h);

/// Order-k moment relaxation
///   inf L_y(h0)  s.t.  M_k(y) >= 0,  M_{k-r_t}(h_t y) = 0,  y_0 = 1.
struct MomentRelaxation {
  unsigned k = 0;
  Polynomial h0;
  std::vector<Polynomial> h;
  /// Degree 2k basis indexing y.
  MonomialBasis ybasis;
  /// Degree k basis indexing rows and columns of M_k(y).
  MonomialBasis mbasis;
  /// moment_index[a][b] is the y position of mbasis[a] * mbasis[b].
  std::vector<std::vector<std::size_t>> moment_index;
  std::vector<unsigned> r;
  /// One list per generator, one equation per entry (a <= b) of
  /// M_{k-r_t}; equations of a zero generator are dropped.
  std::vector<std::vector<LinearEquation>> localizing;
  /// Coefficients of h0 over ybasis.
  Eigen::VectorXd objective;

  std::size_t nvars() const { return ybasis.n; }
  std::size_t equation_count() const;
  /// Localizing equations followed by the normalization y_0 = 1.
  std::vector<LinearEquation> equations() const;
  Eigen::MatrixXd moment_matrix(const Eigen::VectorXd& y) const;
};

MomentRelaxation build_relaxation(const Polynomial& h0, const std::vector<Polynomial>& h,
                                  unsigned k);

enum class RelaxationStatus { Optimal, Infeasible, Unbounded, Stalled, IterationLimit, NotBuilt };
std::string to_string(RelaxationStatus s);
RelaxationStatus from_solver(SolveStatus s);

/// Reduced LMI of a relaxation: y = particular + basis * u and the LMI
/// block is face^T M_k(y) face.  The columns of face span the orthogonal
/// complement of the candidate vectors (see FaceCandidates) that every feasible
/// M_k(y) annihilates; the equations M_k(y) v = 0 they imply are part of
/// the affine set.  consistent is false when those equations, or a forced
/// negative v^T M_k(y) v, rule out every y.
struct ReducedRelaxation {
  bool consistent = true;
  LMIProblem lmi;
  AffineSolution affine;
  Eigen::MatrixXd face;
};

/// IdealMultiples tries only the vectors h_t x^gamma; the implied
/// equations are then ideal members and an exact SOS identity can exist.
/// Monomial kernel vectors also come from forced zero moments, whose
/// equations are not ideal members, so the recovered SOS data is only a
/// limit certificate.
enum class FaceCandidates { IdealMultiples, IdealMultiplesAndMonomials };

ReducedRelaxation reduce(const MomentRelaxation& rel,
                         FaceCandidates which = FaceCandidates::IdealMultiples);

/// Raw SOS data  h0 - xi = v_k^T G v_k + sum_t h_t (u_t^T v_{2k - deg h_t}).
struct DualSolution {
  RelaxationStatus status = RelaxationStatus::NotBuilt;
  double xi = 0.0;
  MonomialBasis basis;
  Eigen::MatrixXd gram;
  std::vector<MonomialBasis> multiplier_bases;
  std::vector<Eigen::VectorXd> multipliers;
};

struct PrimalSolution {
  RelaxationStatus status = RelaxationStatus::NotBuilt;
  double tau = 0.0;
  Eigen::VectorXd y;
  /// Filled from the multipliers of the reduced problem when Optimal.
  DualSolution dual;
  /// The solve used monomial kernel vectors (see FaceCandidates).
  bool monomial_face = false;
  SolveResult solver;
  std::string detail;
};

/// Solves on the ideal-multiple face and retries on the wider face when
/// that is not Optimal.
PrimalSolution solve_primal(const MomentRelaxation& rel, const SolverOptions& opts = {});

enum class DualMode { FromPrimal, Direct };

/// FromPrimal recovers the SOS data from the primal solve; Direct solves
/// the SOS program as its own LMI.
DualSolution solve_dual(const Polynomial& h0, const std::vector<Polynomial>& h, unsigned k,
                        const SolverOptions& opts = {}, DualMode mode = DualMode::FromPrimal);

/// Least-squares ideal multipliers u_t with
/// target = sum_t h_t (u_t^T v_{bases[t]}), target given over ybasis.
std::vector<Eigen::VectorXd> fit_multipliers(const Eigen::VectorXd& target,
                                             const std::vector<Polynomial>& h,
                                             const std::vector<MonomialBasis>& bases,
                                             const MonomialBasis& ybasis);

struct OrderRecord {
  unsigned k = 0;
  RelaxationStatus tau_status = RelaxationStatus::NotBuilt;
  RelaxationStatus rho_status = RelaxationStatus::NotBuilt;
  double tau = 0.0;
  double rho = 0.0;
  double seconds = 0.0;
  std::size_t moment_size = 0;
  std::size_t reduced_variables = 0;
  std::size_t equations = 0;
  std::string detail;
  DualSolution dual;
};

struct HierarchyOptions {
  SolverOptions solver;
  double gap_tol = 1e-6;
  double stabilization_tol = 1e-6;
  /// 0 reads SINGULAR_SOS_THREADS, falling back to the OpenMP default.
  int threads = 0;
};

struct HierarchyResult {
  std::vector<OrderRecord> orders;
  bool converged = false;
  /// First order of the agreeing pair.
  std::optional<unsigned> converged_order;
  std::optional<double> value;
  bool any_infeasible() const;
};

HierarchyResult run_hierarchy(const Polynomial& h0, const std::vector<Polynomial>& h,
                              unsigned k_min, unsigned k_max,
                              const HierarchyOptions& opts = {});

/// sigma = sum_i t_i p_i^2 with p_j = prod_{i != j} (h0 - t_i) / (t_j - t_i).
Polynomial lagrange_sigma(const Polynomial& h0, const std::vector<Rational>& values);

struct BoundSummary {
  std::size_t n = 0;
  unsigned d = 0;
  std::size_t l = 0;
  WBound w;
  BoundValue r;
  /// Bound on the number of values h0 takes on the KKT variety.
  BigInt cardinality;
};

/// w and r for a problem with n variables, l generators and objective h0.
BoundSummary degree_bounds(const Polynomial& h0, const std::vector<Polynomial>& h);

struct PipelineOptions {
  HierarchyOptions hierarchy;
  unsigned k_min = 1;
  unsigned k_max = 3;
  /// Feasible points sampled to bound the true infimum from above.
  int samples = 500;
  std::uint64_t seed = 0;
};

struct PipelineReport {
  /// Empty for the direct path without a morphism.
  std::string morphism;
  std::vector<std::string> varnames;
  /// Objective and generators the KKT system is built from.
  Polynomial h0;
  std::vector<Polynomial> generators;
  KKTSystem kkt;
  std::vector<std::string> kkt_varnames;
  HierarchyResult hierarchy;
  BoundSummary bounds;
  /// Hypotheses the pipeline relies on but does not verify.
  std::vector<std::string> assumptions;
  /// Smallest objective value seen on sampled feasible points.
  std::optional<double> sampled_minimum;
  int samples_used = 0;
  /// The hierarchy value exceeds a sampled objective value, so the
  /// relaxation does not reach the infimum.
  bool exceeds_sampled = false;
};

/// Pullback through phi, KKT system over the source generators, hierarchy.
PipelineReport solve_singular(const VarietySpec& V, const Polynomial& f,
                              const ResolutionMorphism& phi,
                              const PipelineOptions& opts = {});

/// KKT hierarchy for f directly on V(h).
PipelineReport solve_direct(const VarietySpec& V, const Polynomial& f,
                            const PipelineOptions& opts = {});

}  // namespace ssos
