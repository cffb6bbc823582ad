#include "ssos/moment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>

#include <omp.h>

namespace ssos {

namespace {

void enumerate_degree(std::size_t n, unsigned d, std::size_t pos,
                      std::vector<std::uint32_t>& cur, std::vector<Monomial>& out) {
  if (pos + 1 == n) {
    cur[pos] = d;
    out.emplace_back(cur);
    return;
  }
  for (int e = static_cast<int>(d); e >= 0; --e) {
    cur[pos] = static_cast<std::uint32_t>(e);
    enumerate_degree(n, d - e, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

std::size_t check_nvars(const Polynomial& h0, const std::vector<Polynomial>& h) {
  const std::size_t n = h0.nvars();
  if (n == 0) throw std::invalid_argument("objective lives in a ring with no variables");
  for (const auto& g : h) {
    if (g.nvars() != n) {
      throw std::invalid_argument("generator has " + std::to_string(g.nvars()) +
                                  " variables, objective has " + std::to_string(n));
    }
  }
  return n;
}

unsigned half_up(unsigned d) { return (d + 1) / 2; }

// Symmetric matrix with entry (a, b) = v[index[a][b]].
Eigen::MatrixXd gather(const std::vector<std::vector<std::size_t>>& index,
                       const Eigen::VectorXd& v) {
  const auto N = static_cast<Eigen::Index>(index.size());
  Eigen::MatrixXd M(N, N);
  for (Eigen::Index a = 0; a < N; ++a)
    for (Eigen::Index b = 0; b < N; ++b) M(a, b) = v(index[a][b]);
  return M;
}

// Coefficients of h * x^gamma over ybasis.
Eigen::VectorXd shifted_coefficients(const Polynomial& h, const Monomial& gamma,
                                     const MonomialBasis& ybasis) {
  Eigen::VectorXd col = Eigen::VectorXd::Zero(ybasis.size());
  for (const auto& [m, c] : h.terms()) col(ybasis.position(m * gamma)) += c.get_d();
  return col;
}

// Adjoint of the moment map: coefficients of v^T Z v over ybasis.
Eigen::VectorXd moment_adjoint(const MomentRelaxation& rel, const Eigen::MatrixXd& Z) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(rel.ybasis.size());
  for (std::size_t a = 0; a < rel.mbasis.size(); ++a)
    for (std::size_t b = 0; b < rel.mbasis.size(); ++b)
      out(rel.moment_index[a][b]) += Z(a, b);
  return out;
}

std::vector<MonomialBasis> multiplier_bases(const MomentRelaxation& rel) {
  std::vector<MonomialBasis> out;
  // deg(h_t u_t) <= 2k, which also covers the rows added by facial reduction.
  for (const auto& g : rel.h) out.push_back(monomial_basis(rel.nvars(), 2 * rel.k - g.degree()));
  return out;
}

}  // namespace

std::size_t MonomialBasis::position(const Monomial& m) const {
  const auto it = index.find(m);
  if (it == index.end()) {
    throw std::out_of_range("monomial of degree " + std::to_string(m.degree()) +
                            " is outside the degree-" + std::to_string(k) + " basis");
  }
  return it->second;
}

MonomialBasis monomial_basis(std::size_t n, unsigned k) {
  if (n == 0) throw std::invalid_argument("monomial_basis: n must be >= 1");
  MonomialBasis B;
  B.n = n;
  B.k = k;
  std::vector<std::uint32_t> cur(n, 0);
  for (unsigned d = 0; d <= k; ++d) enumerate_degree(n, d, 0, cur, B.monomials);
  for (std::size_t i = 0; i < B.monomials.size(); ++i) B.index.emplace(B.monomials[i], i);
  return B;
}

double riesz(const MonomialBasis& basis, const Eigen::VectorXd& y, const Polynomial& p) {
  if (static_cast<std::size_t>(y.size()) != basis.size())
    throw std::invalid_argument("riesz: y has wrong length");
  if (p.degree() > basis.k) throw std::invalid_argument("riesz: degree exceeds basis");
  double s = 0.0;
  for (const auto& [m, c] : p.terms()) s += c.get_d() * y(basis.position(m));
  return s;
}

Rational riesz(const MonomialBasis& basis, const std::vector<Rational>& y,
               const Polynomial& p) {
  if (y.size() != basis.size()) throw std::invalid_argument("riesz: y has wrong length");
  if (p.degree() > basis.k) throw std::invalid_argument("riesz: degree exceeds basis");
  Rational s = 0;
  for (const auto& [m, c] : p.terms()) s += c * y[basis.position(m)];
  return s;
}

std::vector<Rational> point_moments(const MonomialBasis& basis,
                                    std::span<const Rational> z) {
  if (z.size() != basis.n) throw std::invalid_argument("point_moments: dimension mismatch");
  std::vector<Rational> y;
  y.reserve(basis.size());
  for (const auto& m : basis.monomials) {
    Rational v = 1;
    for (std::size_t i = 0; i < basis.n; ++i)
      for (std::uint32_t e = 0; e < m[i]; ++e) v *= z[i];
    y.push_back(v);
  }
  return y;
}

// ---------------------------------------------------------------------------

namespace {

// Rows kept in reduced echelon form: each pivot column appears only in its
// own row, with coefficient 1.
class Echelon {
 public:
  explicit Echelon(std::size_t nvars) : nvars_(nvars), row_of_(nvars, -1) {}

  bool consistent() const { return consistent_; }

  // eq minus its projection onto the pivot rows.
  LinearEquation residual(const LinearEquation& eq) const {
    LinearEquation row;
    row.rhs = eq.rhs;
    for (const auto& [j, c] : eq.coeffs) {
      if (j >= nvars_) throw std::out_of_range("solve_affine: variable index out of range");
      if (c != 0) row.coeffs[j] += c;
    }
    std::vector<std::pair<std::size_t, Rational>> hits;
    for (const auto& [j, c] : row.coeffs)
      if (row_of_[j] >= 0 && c != 0) hits.emplace_back(j, c);
    for (const auto& [j, c] : hits) {
      const LinearEquation& p = rows_[row_of_[j]];
      for (const auto& [jj, cc] : p.coeffs) {
        Rational& slot = row.coeffs[jj];
        slot -= c * cc;
      }
      row.rhs -= c * p.rhs;
    }
    std::erase_if(row.coeffs, [](const auto& kv) { return kv.second == 0; });
    return row;
  }

  // Returns true when the equation raised the rank.
  bool add(const LinearEquation& eq) {
    LinearEquation row = residual(eq);
    if (row.coeffs.empty()) {
      if (row.rhs != 0) consistent_ = false;
      return false;
    }
    // Highest-index pivot keeps low-degree moments free.
    const auto last = std::prev(row.coeffs.end());
    const std::size_t col = last->first;
    const Rational inv = 1 / last->second;
    for (auto& [j, c] : row.coeffs) c *= inv;
    row.rhs *= inv;
    for (auto& other : rows_) {
      const auto it = other.coeffs.find(col);
      if (it == other.coeffs.end()) continue;
      const Rational f = it->second;
      for (const auto& [jj, cc] : row.coeffs) {
        Rational& slot = other.coeffs[jj];
        slot -= f * cc;
        if (slot == 0) other.coeffs.erase(jj);
      }
      other.rhs -= f * row.rhs;
    }
    row_of_[col] = static_cast<long>(rows_.size());
    pivot_col_.push_back(col);
    rows_.push_back(std::move(row));
    return true;
  }

  AffineSolution solution() const {
    AffineSolution out;
    out.consistent = consistent_;
    out.rank = rows_.size();
    out.particular = Eigen::VectorXd::Zero(nvars_);
    if (!consistent_) {
      out.basis = Eigen::MatrixXd(nvars_, 0);
      return out;
    }
    std::vector<std::size_t> free_cols;
    for (std::size_t j = 0; j < nvars_; ++j)
      if (row_of_[j] < 0) free_cols.push_back(j);
    for (std::size_t r = 0; r < rows_.size(); ++r)
      out.particular(pivot_col_[r]) = rows_[r].rhs.get_d();
    if (free_cols.empty()) {
      out.basis = Eigen::MatrixXd(nvars_, 0);
      return out;
    }
    Eigen::MatrixXd N = Eigen::MatrixXd::Zero(nvars_, free_cols.size());
    std::vector<long> free_pos(nvars_, -1);
    for (std::size_t f = 0; f < free_cols.size(); ++f) {
      free_pos[free_cols[f]] = static_cast<long>(f);
      N(free_cols[f], f) = 1.0;
    }
    for (std::size_t r = 0; r < rows_.size(); ++r)
      for (const auto& [j, c] : rows_[r].coeffs)
        if (j != pivot_col_[r]) N(pivot_col_[r], free_pos[j]) = -c.get_d();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(N);
    out.basis = qr.householderQ() * Eigen::MatrixXd::Identity(nvars_, free_cols.size());
    out.particular -= out.basis * (out.basis.transpose() * out.particular);
    return out;
  }

 private:
  std::size_t nvars_;
  bool consistent_ = true;
  std::vector<LinearEquation> rows_;
  std::vector<std::size_t> pivot_col_;
  std::vector<long> row_of_;
};

}  // namespace

AffineSolution solve_affine(std::size_t nvars, const std::vector<LinearEquation>& eqs) {
  Echelon ech(nvars);
  for (const auto& eq : eqs) ech.add(eq);
  return ech.solution();
}

// ---------------------------------------------------------------------------

OrderTooSmall::OrderTooSmall(unsigned requested, unsigned minimal)
    : std::invalid_argument("relaxation order " + std::to_string(requested) +
                            " is too small; minimal order is " + std::to_string(minimal)),
      requested_(requested),
      minimal_(minimal) {}

unsigned minimal_order(const Polynomial& h0, const std::vector<Polynomial>& h) {
  unsigned k = half_up(h0.degree());
  for (const auto& g : h) k = std::max(k, half_up(g.degree()));
  return k;
}

std::size_t MomentRelaxation::equation_count() const {
  std::size_t n = 1;
  for (const auto& eqs : localizing) n += eqs.size();
  return n;
}

std::vector<LinearEquation> MomentRelaxation::equations() const {
  std::vector<LinearEquation> out;
  for (const auto& eqs : localizing) out.insert(out.end(), eqs.begin(), eqs.end());
  LinearEquation norm;
  norm.coeffs[0] = 1;
  norm.rhs = 1;
  out.push_back(norm);
  return out;
}

Eigen::MatrixXd MomentRelaxation::moment_matrix(const Eigen::VectorXd& y) const {
  if (static_cast<std::size_t>(y.size()) != ybasis.size())
    throw std::invalid_argument("moment_matrix: y has wrong length");
  return gather(moment_index, y);
}

MomentRelaxation build_relaxation(const Polynomial& h0, const std::vector<Polynomial>& h,
                                  unsigned k) {
  const std::size_t n = check_nvars(h0, h);
  const unsigned kmin = minimal_order(h0, h);
  if (k < kmin) throw OrderTooSmall(k, kmin);

  MomentRelaxation rel;
  rel.k = k;
  rel.h0 = h0;
  rel.h = h;
  rel.ybasis = monomial_basis(n, 2 * k);
  rel.mbasis = monomial_basis(n, k);
  const std::size_t N = rel.mbasis.size();
  rel.moment_index.assign(N, std::vector<std::size_t>(N));
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b)
      rel.moment_index[a][b] = rel.ybasis.position(rel.mbasis.monomials[a] * rel.mbasis.monomials[b]);

  for (const auto& g : h) {
    const unsigned rt = half_up(g.degree());
    rel.r.push_back(rt);
    std::vector<LinearEquation> eqs;
    if (!g.is_zero()) {
      const MonomialBasis B = monomial_basis(n, k - rt);
      for (std::size_t a = 0; a < B.size(); ++a) {
        for (std::size_t b = a; b < B.size(); ++b) {
          const Monomial shift = B.monomials[a] * B.monomials[b];
          LinearEquation eq;
          for (const auto& [m, c] : g.terms()) eq.coeffs[rel.ybasis.position(m * shift)] += c;
          eqs.push_back(std::move(eq));
        }
      }
    }
    rel.localizing.push_back(std::move(eqs));
  }

  rel.objective = Eigen::VectorXd::Zero(rel.ybasis.size());
  for (const auto& [m, c] : h0.terms()) rel.objective(rel.ybasis.position(m)) = c.get_d();
  return rel;
}

std::string to_string(RelaxationStatus s) {
  switch (s) {
    case RelaxationStatus::Optimal:
      return "Optimal";
    case RelaxationStatus::Infeasible:
      return "Infeasible";
    case RelaxationStatus::Unbounded:
      return "Unbounded";
    case RelaxationStatus::Stalled:
      return "Stalled";
    case RelaxationStatus::IterationLimit:
      return "IterationLimit";
    case RelaxationStatus::NotBuilt:
      return "NotBuilt";
  }
  return "?";
}

RelaxationStatus from_solver(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return RelaxationStatus::Optimal;
    case SolveStatus::PrimalInfeasible:
      return RelaxationStatus::Infeasible;
    case SolveStatus::DualInfeasibleOrUnbounded:
      return RelaxationStatus::Unbounded;
    case SolveStatus::Stalled:
      return RelaxationStatus::Stalled;
    case SolveStatus::IterationLimit:
      return RelaxationStatus::IterationLimit;
  }
  return RelaxationStatus::Stalled;
}

namespace {

// Exact vectors v over mbasis, sparse.
using SparseVec = std::map<std::size_t, Rational>;

std::vector<SparseVec> face_candidates(const MomentRelaxation& rel, FaceCandidates which) {
  std::vector<SparseVec> out;
  for (const auto& g : rel.h) {
    if (g.is_zero() || g.degree() > rel.k) continue;
    const MonomialBasis shifts = monomial_basis(rel.nvars(), rel.k - g.degree());
    for (const auto& gamma : shifts.monomials) {
      SparseVec v;
      for (const auto& [m, c] : g.terms()) v[rel.mbasis.position(m * gamma)] = c;
      out.push_back(std::move(v));
    }
  }
  if (which == FaceCandidates::IdealMultiplesAndMonomials)
    for (std::size_t a = 0; a < rel.mbasis.size(); ++a) out.push_back(SparseVec{{a, Rational(1)}});
  return out;
}

}  // namespace

ReducedRelaxation reduce(const MomentRelaxation& rel, FaceCandidates which) {
  ReducedRelaxation red;
  const std::size_t N = rel.mbasis.size();
  Echelon ech(rel.ybasis.size());
  for (const auto& eq : rel.equations()) ech.add(eq);

  // A candidate v with v^T M_k(y) v identically zero on the affine set lies
  // in the kernel of every feasible M_k(y), which adds the equations
  // M_k(y) v = 0.  Repeat until nothing new is found.
  std::vector<SparseVec> cand = face_candidates(rel, which);
  std::vector<bool> used(cand.size(), false);
  std::vector<SparseVec> kept;
  bool changed = ech.consistent();
  while (changed && ech.consistent()) {
    changed = false;
    for (std::size_t i = 0; i < cand.size() && ech.consistent(); ++i) {
      if (used[i]) continue;
      LinearEquation quad;
      for (const auto& [a, va] : cand[i])
        for (const auto& [b, vb] : cand[i]) quad.coeffs[rel.moment_index[a][b]] += va * vb;
      const LinearEquation res = ech.residual(quad);
      if (!res.coeffs.empty()) continue;
      if (res.rhs > 0) {
        // v^T M v = -rhs < 0 on the whole affine set: no PSD point exists.
        ech.add(quad);
        break;
      }
      if (res.rhs != 0) continue;
      used[i] = true;
      kept.push_back(cand[i]);
      for (std::size_t a = 0; a < N; ++a) {
        LinearEquation row;
        for (const auto& [b, vb] : cand[i]) row.coeffs[rel.moment_index[a][b]] += vb;
        if (ech.add(row)) changed = true;
      }
    }
  }
  red.affine = ech.solution();
  red.consistent = red.affine.consistent;
  if (!red.consistent) return red;

  if (kept.empty()) {
    red.face = Eigen::MatrixXd::Identity(N, N);
  } else {
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N, kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (const auto& [a, c] : kept[i]) K(a, i) = c.get_d();
    // Orthogonal complement of range(K).
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > 1e-10 * s(0)) ++rank;
    red.face = svd.matrixU().rightCols(static_cast<Eigen::Index>(N) - rank);
  }
  const Eigen::MatrixXd& P = red.face;
  auto block = [&](const Eigen::VectorXd& y) {
    Eigen::MatrixXd B = P.transpose() * gather(rel.moment_index, y) * P;
    return Eigen::MatrixXd(0.5 * (B + B.transpose()));
  };
  const auto& Q = red.affine.basis;
  LMIProblem& lmi = red.lmi;
  lmi.block_sizes = {static_cast<int>(P.cols())};
  lmi.F0 = {block(red.affine.particular)};
  lmi.c = Q.transpose() * rel.objective;
  lmi.offset = rel.objective.dot(red.affine.particular);
  for (Eigen::Index i = 0; i < Q.cols(); ++i) lmi.F.push_back({block(Q.col(i))});
  return red;
}

std::vector<Eigen::VectorXd> fit_multipliers(const Eigen::VectorXd& target,
                                             const std::vector<Polynomial>& h,
                                             const std::vector<MonomialBasis>& bases,
                                             const MonomialBasis& ybasis) {
  if (h.size() != bases.size()) throw std::invalid_argument("fit_multipliers: size mismatch");
  std::size_t cols = 0;
  for (const auto& B : bases) cols += B.size();
  Eigen::MatrixXd A(ybasis.size(), cols);
  std::size_t c = 0;
  for (std::size_t t = 0; t < h.size(); ++t)
    for (const auto& gamma : bases[t].monomials) A.col(c++) = shifted_coefficients(h[t], gamma, ybasis);
  std::vector<Eigen::VectorXd> out;
  if (cols == 0) {
    for (const auto& B : bases) out.emplace_back(Eigen::VectorXd::Zero(B.size()));
    return out;
  }
  const Eigen::VectorXd u = A.completeOrthogonalDecomposition().solve(target);
  c = 0;
  for (const auto& B : bases) {
    out.emplace_back(u.segment(c, B.size()));
    c += B.size();
  }
  return out;
}

namespace {

PrimalSolution solve_reduced(const MomentRelaxation& rel, const ReducedRelaxation& red,
                             const SolverOptions& opts) {
  PrimalSolution sol;
  if (!red.consistent) {
    sol.status = RelaxationStatus::Infeasible;
    sol.detail = "the localizing equalities, y_0 = 1 and M_k(y) >= 0 have no common solution";
    return sol;
  }
  sol.solver = solve(red.lmi, opts);
  sol.status = from_solver(sol.solver.status);
  if (sol.status != RelaxationStatus::Optimal) {
    sol.detail = "solver status " + to_string(sol.solver.status);
    return sol;
  }
  sol.y = red.affine.particular + red.affine.basis * sol.solver.u;
  sol.tau = sol.solver.primal_objective;

  DualSolution& d = sol.dual;
  d.status = RelaxationStatus::Optimal;
  d.xi = sol.solver.dual_objective;
  d.basis = rel.mbasis;
  d.gram = red.face * sol.solver.Z[0] * red.face.transpose();
  d.multiplier_bases = multiplier_bases(rel);
  Eigen::VectorXd target = rel.objective - moment_adjoint(rel, d.gram);
  target(0) -= d.xi;
  d.multipliers = fit_multipliers(target, rel.h, d.multiplier_bases, rel.ybasis);
  return sol;
}

}  // namespace

PrimalSolution solve_primal(const MomentRelaxation& rel, const SolverOptions& opts) {
  PrimalSolution first = solve_reduced(rel, reduce(rel, FaceCandidates::IdealMultiples), opts);
  if (first.status == RelaxationStatus::Optimal) return first;
  const ReducedRelaxation wide = reduce(rel, FaceCandidates::IdealMultiplesAndMonomials);
  PrimalSolution second = solve_reduced(rel, wide, opts);
  if (!wide.consistent || second.status == RelaxationStatus::Optimal) {
    second.monomial_face = true;
    if (second.status == RelaxationStatus::Optimal)
      second.detail = "solved on the face with monomial kernel vectors";
    return second;
  }
  return first;
}

namespace {

// h0 - xi = v^T G v + sum_t h_t u_t^T v_t solved as an LMI in (xi, G).
DualSolution solve_dual_direct(const MomentRelaxation& rel, const SolverOptions& opts) {
  DualSolution d;
  d.basis = rel.mbasis;
  d.multiplier_bases = multiplier_bases(rel);
  const std::size_t N = rel.mbasis.size();
  const std::size_t ng = N * (N + 1) / 2;
  std::vector<std::vector<std::size_t>> gidx(N, std::vector<std::size_t>(N));
  std::size_t v = 1;
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a; b < N; ++b) gidx[a][b] = gidx[b][a] = v++;
  std::size_t nvars = 1 + ng;
  for (const auto& B : d.multiplier_bases) nvars += B.size();

  std::vector<LinearEquation> eqs(rel.ybasis.size());
  eqs[0].coeffs[0] = 1;
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a; b < N; ++b)
      eqs[rel.moment_index[a][b]].coeffs[gidx[a][b]] += (a == b ? 1 : 2);
  std::size_t col = 1 + ng;
  for (std::size_t t = 0; t < rel.h.size(); ++t) {
    for (const auto& gamma : d.multiplier_bases[t].monomials) {
      for (const auto& [m, c] : rel.h[t].terms())
        eqs[rel.ybasis.position(m * gamma)].coeffs[col] += c;
      ++col;
    }
  }
  for (const auto& [m, c] : rel.h0.terms()) eqs[rel.ybasis.position(m)].rhs = c;

  const AffineSolution aff = solve_affine(nvars, eqs);
  if (!aff.consistent) {
    d.status = RelaxationStatus::Infeasible;
    return d;
  }
  // Only xi and G enter the LMI; restrict the affine set to those coordinates.
  const Eigen::MatrixXd A = aff.basis.topRows(1 + ng);
  const Eigen::VectorXd p = aff.particular.head(1 + ng);
  Eigen::MatrixXd U(1 + ng, 0);
  if (A.cols() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > 1e-10 * std::max(1.0, s(0))) ++rank;
    U = svd.matrixU().leftCols(rank);
  }
  auto gram_of = [&](const Eigen::VectorXd& x) {
    Eigen::MatrixXd G(N, N);
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b) G(a, b) = x(gidx[a][b]);
    return G;
  };
  LMIProblem lmi;
  lmi.block_sizes = {static_cast<int>(N)};
  lmi.F0 = {gram_of(p)};
  lmi.c = -U.row(0).transpose();
  lmi.offset = -p(0);
  for (Eigen::Index i = 0; i < U.cols(); ++i) lmi.F.push_back({gram_of(U.col(i))});
  // The moment side of this LMI has no interior point whenever V(h) is
  // nonempty, which limits attainable accuracy to about 1e-8.
  SolverOptions loose = opts;
  loose.tol_gap = std::max(loose.tol_gap, 1e-8);
  loose.tol_feas = std::max(loose.tol_feas, 1e-8);
  const SolveResult res = solve(lmi, loose);
  d.status = from_solver(res.status);
  if (d.status != RelaxationStatus::Optimal) return d;
  const Eigen::VectorXd x = p + U * res.u;
  d.xi = x(0);
  d.gram = gram_of(x);
  Eigen::VectorXd target = rel.objective - moment_adjoint(rel, d.gram);
  target(0) -= d.xi;
  d.multipliers = fit_multipliers(target, rel.h, d.multiplier_bases, rel.ybasis);
  return d;
}

}  // namespace

DualSolution solve_dual(const Polynomial& h0, const std::vector<Polynomial>& h, unsigned k,
                        const SolverOptions& opts, DualMode mode) {
  const MomentRelaxation rel = build_relaxation(h0, h, k);
  if (mode == DualMode::Direct) return solve_dual_direct(rel, opts);
  PrimalSolution p = solve_primal(rel, opts);
  if (p.status != RelaxationStatus::Optimal) {
    DualSolution d;
    d.status = p.status;
    return d;
  }
  return p.dual;
}

// ---------------------------------------------------------------------------

bool HierarchyResult::any_infeasible() const {
  return std::any_of(orders.begin(), orders.end(), [](const OrderRecord& r) {
    return r.tau_status == RelaxationStatus::Infeasible;
  });
}

namespace {

int hierarchy_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SINGULAR_SOS_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return omp_get_max_threads();
}

OrderRecord solve_order(const Polynomial& h0, const std::vector<Polynomial>& h, unsigned k,
                        unsigned kmin, const SolverOptions& opts) {
  OrderRecord rec;
  rec.k = k;
  const auto start = std::chrono::steady_clock::now();
  if (k < kmin) {
    rec.detail = "below the minimal order " + std::to_string(kmin);
    return rec;
  }
  const MomentRelaxation rel = build_relaxation(h0, h, k);
  rec.moment_size = rel.mbasis.size();
  rec.equations = rel.equation_count();
  const PrimalSolution sol = solve_primal(rel, opts);
  rec.tau_status = rec.rho_status = sol.status;
  rec.detail = sol.detail;
  rec.reduced_variables = sol.solver.u.size();
  if (sol.status == RelaxationStatus::Optimal) {
    rec.tau = sol.tau;
    rec.rho = sol.dual.xi;
    rec.dual = sol.dual;
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace

HierarchyResult run_hierarchy(const Polynomial& h0, const std::vector<Polynomial>& h,
                              unsigned k_min, unsigned k_max, const HierarchyOptions& opts) {
  if (k_min > k_max) throw std::invalid_argument("run_hierarchy: k_min > k_max");
  check_nvars(h0, h);
  const unsigned kmin = minimal_order(h0, h);
  const int count = static_cast<int>(k_max - k_min + 1);
  HierarchyResult result;
  result.orders.resize(count);
  const int threads = std::min(hierarchy_threads(opts.threads), count);
  SolverOptions solver = opts.solver;
  if (threads > 1) solver.parallel = false;

  std::vector<std::string> errors(count);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
  for (int i = 0; i < count; ++i) {
    // Higher orders are more expensive; start them first.
    const unsigned k = k_max - static_cast<unsigned>(i);
    try {
      result.orders[k - k_min] = solve_order(h0, h, k, kmin, solver);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error(e);

  auto good = [&](const OrderRecord& r) {
    return r.tau_status == RelaxationStatus::Optimal &&
           std::abs(r.tau - r.rho) <= opts.gap_tol * (1 + std::abs(r.tau));
  };
  for (const auto& r : result.orders)
    if (r.tau_status == RelaxationStatus::Optimal) result.value = r.tau;
  for (std::size_t i = 0; i + 1 < result.orders.size(); ++i) {
    const auto& a = result.orders[i];
    const auto& b = result.orders[i + 1];
    if (good(a) && good(b) &&
        std::abs(a.tau - b.tau) <= opts.stabilization_tol * (1 + std::abs(b.tau))) {
      result.converged = true;
      result.converged_order = a.k;
      result.value = b.tau;
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

Polynomial lagrange_sigma(const Polynomial& h0, const std::vector<Rational>& values) {
  if (values.empty()) throw std::invalid_argument("lagrange_sigma: no values");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0) throw std::invalid_argument("lagrange_sigma: negative value");
    for (std::size_t j = 0; j < i; ++j)
      if (values[i] == values[j]) throw std::invalid_argument("lagrange_sigma: duplicate value");
  }
  const std::size_t n = h0.nvars();
  Polynomial sigma(n);
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] == 0) continue;
    Polynomial p = Polynomial::constant(n, 1);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i == j) continue;
      const Rational inv = 1 / Rational(values[j] - values[i]);
      p = p * (inv * (h0 - Polynomial::constant(n, values[i])));
    }
    sigma = sigma + values[j] * (p * p);
  }
  return sigma;
}

BoundSummary degree_bounds(const Polynomial& h0, const std::vector<Polynomial>& h) {
  BoundSummary s;
  s.n = h0.nvars();
  s.l = h.size();
  s.d = std::max(2u, h0.degree());
  for (const auto& g : h) s.d = std::max(s.d, g.degree());
  s.w = w_bound(s.n, s.d, s.l);
  s.r = r_bound(s.n, s.d, s.l, s.w.value);
  s.cardinality = cardinality_bound(s.n, s.d, s.l);
  return s;
}

namespace {

std::vector<std::string> morphism_assumptions() {
  return {
      "the regular locus of V is dense in V",
      "the pulled-back objective attains its infimum on W",
      "the supplied generators of W generate its vanishing ideal",
  };
}

void finish_report(PipelineReport& rep, const PipelineOptions& opts,
                   const std::vector<std::vector<double>>& samples) {
  rep.kkt = build_kkt(rep.h0, rep.generators);
  rep.kkt_varnames = rep.kkt.varnames(rep.varnames);
  rep.hierarchy = run_hierarchy(rep.kkt.objective, rep.kkt.polynomials, opts.k_min,
                                opts.k_max, opts.hierarchy);
  rep.bounds = degree_bounds(rep.h0, rep.generators);
  for (const auto& z : samples) {
    const double v = evaluate(rep.h0, std::span<const double>(z));
    if (!rep.sampled_minimum || v < *rep.sampled_minimum) rep.sampled_minimum = v;
  }
  rep.samples_used = static_cast<int>(samples.size());
  if (rep.hierarchy.value && rep.sampled_minimum) {
    const double v = *rep.hierarchy.value;
    rep.exceeds_sampled = *rep.sampled_minimum < v - 1e-6 * (1 + std::abs(v));
  }
}

}  // namespace

PipelineReport solve_singular(const VarietySpec& V, const Polynomial& f,
                              const ResolutionMorphism& phi, const PipelineOptions& opts) {
  V.validate();
  phi.validate();
  if (V.nvars != phi.target.nvars)
    throw std::invalid_argument("morphism target has " + std::to_string(phi.target.nvars) +
                                " variables, variety has " + std::to_string(V.nvars));
  PipelineReport rep;
  rep.morphism = phi.name;
  rep.varnames = phi.source.names();
  rep.h0 = pullback(f, phi);
  rep.generators = phi.source.generators;
  rep.assumptions = morphism_assumptions();
  std::vector<std::vector<double>> samples;
  if (!phi.sampler.empty()) {
    std::mt19937_64 rng(opts.seed);
    for (int i = 0; i < opts.samples; ++i)
      if (auto z = sample_source(phi, rng)) samples.push_back(std::move(*z));
  }
  finish_report(rep, opts, samples);
  return rep;
}

PipelineReport solve_direct(const VarietySpec& V, const Polynomial& f,
                            const PipelineOptions& opts) {
  V.validate();
  if (f.nvars() != V.nvars)
    throw std::invalid_argument("objective has " + std::to_string(f.nvars()) +
                                " variables, variety has " + std::to_string(V.nvars));
  PipelineReport rep;
  rep.varnames = V.names();
  rep.h0 = f;
  rep.generators = V.generators;
  rep.assumptions = {"the infimum is attained at a point where the KKT conditions hold"};

  const bool unconstrained = std::all_of(V.generators.begin(), V.generators.end(),
                                         [](const Polynomial& g) { return g.is_zero(); });
  std::mt19937_64 rng(opts.seed);
  std::vector<std::vector<double>> samples;
  const JacobianMatrix J = unconstrained ? JacobianMatrix{} : jacobian(V);
  const double radius = unconstrained ? 10.0 : 2.0;
  std::uniform_real_distribution<double> box(-radius, radius);
  for (int i = 0; i < opts.samples; ++i) {
    std::vector<double> x(V.nvars);
    for (auto& xi : x) xi = box(rng);
    if (unconstrained) {
      samples.push_back(std::move(x));
    } else if (auto z = newton_project(V, J, std::move(x))) {
      samples.push_back(std::move(*z));
    }
  }
  finish_report(rep, opts, samples);
  return rep;
}

}  // namespace ssos
