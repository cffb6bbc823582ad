#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ssos {

/// Symmetric block-diagonal matrix, one dense block per entry.
using BlockMatrix = std::vector<Eigen::MatrixXd>;

/// minimize c^T u + offset  subject to  F(u) = F0 + sum_i u_i F_i >= 0.
///
/// The dual is  maximize offset - <F0, Z>  subject to  <F_i, Z> = c_i,
/// Z >= 0.
struct LMIProblem {
  std::vector<int> block_sizes;
  BlockMatrix F0;
  std::vector<BlockMatrix> F;
  Eigen::VectorXd c;
  double offset = 0.0;

  int m() const { return static_cast<int>(F.size()); }
  int total_size() const;
  /// Throws std::invalid_argument on inconsistent shapes or asymmetry.
  void validate() const;
  BlockMatrix evaluate(const Eigen::VectorXd& u) const;
};

enum class SolveStatus {
  Optimal,
  PrimalInfeasible,
  DualInfeasibleOrUnbounded,
  Stalled,
  IterationLimit
};
std::string to_string(SolveStatus s);

struct SolverOptions {
  double tol_gap = 1e-10;
  double tol_feas = 1e-10;
  int max_iter = 200;
  /// Unused by the deterministic solver; accepted for interface symmetry.
  std::uint64_t seed = 0;
  bool parallel = true;
};

struct SolveResult {
  SolveStatus status = SolveStatus::IterationLimit;
  Eigen::VectorXd u;
  BlockMatrix Z;
  /// c^T u + offset and offset - <F0, Z>.
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
};

SolveResult solve(const LMIProblem& problem, const SolverOptions& opts = {});

double inner(const BlockMatrix& a, const BlockMatrix& b);

/// M_ij = <F_i, W F_j W> for blockwise symmetric W.
Eigen::MatrixXd schur_complement_serial(const std::vector<BlockMatrix>& F,
                                        const BlockMatrix& W);
/// OpenMP version of schur_complement_serial with identical results.
Eigen::MatrixXd schur_complement_parallel(const std::vector<BlockMatrix>& F,
                                          const BlockMatrix& W);

/// Smallest eigenvalue; rejects asymmetric input.
double min_eigenvalue(const Eigen::MatrixXd& A);
double min_eigenvalue(const BlockMatrix& A);

/// Lower Cholesky factor of A + shift I, or nullopt when that matrix is
/// not numerically positive definite.
std::optional<Eigen::MatrixXd> cholesky_psd(const Eigen::MatrixXd& A,
                                            double shift);

/// SDPA sparse format (.dat-s).  The SDPA primal is
/// min c^T u s.t. sum u_i F_i - F0' >= 0, so matrix 0 carries -F0.  The
/// objective offset travels in a "* offset" comment line.
void write_sdpa(std::ostream& out, const LMIProblem& problem);
LMIProblem read_sdpa(std::istream& in);

}  // namespace ssos
