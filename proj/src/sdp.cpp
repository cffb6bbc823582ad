#include "ssos/sdp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace ssos {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::PrimalInfeasible:
      return "PrimalInfeasible";
    case SolveStatus::DualInfeasibleOrUnbounded:
      return "DualInfeasibleOrUnbounded";
    case SolveStatus::Stalled:
      return "Stalled";
    case SolveStatus::IterationLimit:
      return "IterationLimit";
  }
  return "?";
}

int LMIProblem::total_size() const {
  int n = 0;
  for (int s : block_sizes) n += s;
  return n;
}

namespace {

void check_blocks(const BlockMatrix& M, const std::vector<int>& sizes,
                  const std::string& what) {
  if (M.size() != sizes.size()) {
    throw std::invalid_argument(what + ": wrong number of blocks");
  }
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    if (M[b].rows() != sizes[b] || M[b].cols() != sizes[b]) {
      throw std::invalid_argument(what + ": block " + std::to_string(b) +
                                  " has wrong shape");
    }
    const double scale = 1.0 + M[b].cwiseAbs().maxCoeff();
    if ((M[b] - M[b].transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw std::invalid_argument(what + ": block " + std::to_string(b) +
                                  " is not symmetric");
    }
  }
}

BlockMatrix zeros(const std::vector<int>& sizes) {
  BlockMatrix Z;
  for (int s : sizes) Z.push_back(Mat::Zero(s, s));
  return Z;
}

BlockMatrix identity(const std::vector<int>& sizes, double scale) {
  BlockMatrix Z;
  for (int s : sizes) Z.push_back(scale * Mat::Identity(s, s));
  return Z;
}

double frobenius(const BlockMatrix& A) {
  double s = 0.0;
  for (const auto& b : A) s += b.squaredNorm();
  return std::sqrt(s);
}

void axpy(double a, const BlockMatrix& X, BlockMatrix& Y) {
  for (std::size_t b = 0; b < X.size(); ++b) Y[b].noalias() += a * X[b];
}

void symmetrize(BlockMatrix& A) {
  for (auto& b : A) b = 0.5 * (b + b.transpose()).eval();
}

// Standard-form constraint map with A_i = -F_i.
Vec apply_A(const std::vector<BlockMatrix>& F, const BlockMatrix& X) {
  Vec out(F.size());
  for (std::size_t i = 0; i < F.size(); ++i) out(i) = -inner(F[i], X);
  return out;
}

BlockMatrix apply_At(const std::vector<BlockMatrix>& F, const Vec& y,
                     const std::vector<int>& sizes) {
  BlockMatrix out = zeros(sizes);
  for (std::size_t i = 0; i < F.size(); ++i) axpy(-y(i), F[i], out);
  return out;
}

struct Scaling {
  BlockMatrix G, Ginv, W;
  std::vector<Vec> d;
};

// Nesterov-Todd scaling: G^T S G = G^{-1} X G^{-T} = diag(d).
bool nt_scaling(const BlockMatrix& X, const BlockMatrix& S, Scaling& out) {
  out = Scaling{};
  for (std::size_t b = 0; b < X.size(); ++b) {
    Eigen::LLT<Mat> lx(X[b]), ls(S[b]);
    if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) return false;
    const Mat L = lx.matrixL();
    const Mat R = ls.matrixL();
    Eigen::JacobiSVD<Mat> svd(R.transpose() * L, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec d = svd.singularValues();
    if ((d.array() <= 0).any()) return false;
    const Mat& V = svd.matrixV();
    const Mat G = L * V * d.cwiseSqrt().cwiseInverse().asDiagonal();
    const Mat Linv = L.triangularView<Eigen::Lower>().solve(
        Mat::Identity(L.rows(), L.cols()));
    out.G.push_back(G);
    out.Ginv.push_back(d.cwiseSqrt().asDiagonal() * V.transpose() * Linv);
    out.W.push_back(G * G.transpose());
    out.d.push_back(d);
  }
  return true;
}

// Largest alpha with X + alpha dX >= 0 (infinity when unbounded).
double max_step(const BlockMatrix& X, const BlockMatrix& dX) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < X.size(); ++b) {
    Eigen::LLT<Mat> llt(X[b]);
    if (llt.info() != Eigen::Success) return 0.0;
    const Mat L = llt.matrixL();
    const Mat T1 = L.triangularView<Eigen::Lower>().solve(dX[b]);
    const Mat T = L.triangularView<Eigen::Lower>().solve(T1.transpose());
    const double lmin =
        Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (T + T.transpose()), Eigen::EigenvaluesOnly)
            .eigenvalues()
            .minCoeff();
    if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

BlockMatrix congruence(const BlockMatrix& P, const BlockMatrix& M) {
  BlockMatrix out;
  for (std::size_t b = 0; b < P.size(); ++b) {
    out.push_back(P[b] * M[b] * P[b].transpose());
  }
  return out;
}

struct Direction {
  BlockMatrix dX, dS;
  Vec dy;
};

}  // namespace

void LMIProblem::validate() const {
  for (int s : block_sizes) {
    if (s < 1) throw std::invalid_argument("block sizes must be >= 1");
  }
  check_blocks(F0, block_sizes, "F0");
  for (std::size_t i = 0; i < F.size(); ++i) {
    check_blocks(F[i], block_sizes, "F" + std::to_string(i + 1));
  }
  if (c.size() != static_cast<Eigen::Index>(F.size())) {
    throw std::invalid_argument("objective length does not match variable count");
  }
}

BlockMatrix LMIProblem::evaluate(const Eigen::VectorXd& u) const {
  if (u.size() != m()) throw std::invalid_argument("evaluate: wrong u length");
  BlockMatrix out = F0;
  for (int i = 0; i < m(); ++i) axpy(u(i), F[i], out);
  return out;
}

double inner(const BlockMatrix& a, const BlockMatrix& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

Eigen::MatrixXd schur_complement_serial(const std::vector<BlockMatrix>& F,
                                        const BlockMatrix& W) {
  const int m = static_cast<int>(F.size());
  std::vector<BlockMatrix> P(m);
  for (int j = 0; j < m; ++j) P[j] = congruence(W, F[j]);
  Mat M(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      M(i, j) = inner(F[i], P[j]);
      M(j, i) = M(i, j);
    }
  }
  return M;
}

Eigen::MatrixXd schur_complement_parallel(const std::vector<BlockMatrix>& F,
                                          const BlockMatrix& W) {
  const int m = static_cast<int>(F.size());
  std::vector<BlockMatrix> P(m);
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < m; ++j) P[j] = congruence(W, F[j]);
  Mat M(m, m);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      M(i, j) = inner(F[i], P[j]);
      M(j, i) = M(i, j);
    }
  }
  return M;
}

SolveResult solve(const LMIProblem& problem, const SolverOptions& opts) {
  problem.validate();
  const auto& sizes = problem.block_sizes;
  const auto& F = problem.F;
  const int m = problem.m();
  const double n = problem.total_size();
  SolveResult result;

  if (m == 0) {
    result.u = Vec();
    result.Z = zeros(sizes);
    result.primal_objective = result.dual_objective = problem.offset;
    result.status = min_eigenvalue(problem.F0) >= -opts.tol_feas
                        ? SolveStatus::Optimal
                        : SolveStatus::PrimalInfeasible;
    return result;
  }

  const BlockMatrix& C = problem.F0;
  const Vec b = -problem.c;
  const double normC = frobenius(C);
  const double normb = b.norm();

  double max_normA = 0.0, xi = std::max(10.0, std::sqrt(n));
  for (int i = 0; i < m; ++i) {
    const double nA = frobenius(F[i]);
    max_normA = std::max(max_normA, nA);
    xi = std::max(xi, std::sqrt(n) * (1.0 + std::abs(b(i))) / (1.0 + nA));
  }
  const double eta = std::max({10.0, std::sqrt(n), max_normA, normC});

  BlockMatrix X = identity(sizes, xi);
  BlockMatrix S = identity(sizes, eta);
  Vec y = Vec::Zero(m);

  auto finish = [&](SolveStatus status, int iter) {
    result.status = status;
    result.iterations = iter;
    result.u = y;
    result.Z = X;
    result.primal_objective = problem.c.dot(y) + problem.offset;
    result.dual_objective = problem.offset - inner(C, X);
    return result;
  };

  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    const Vec AX = apply_A(F, X);
    const Vec Rp = b - AX;
    BlockMatrix Rd = C;
    axpy(-1.0, S, Rd);
    axpy(-1.0, apply_At(F, y, sizes), Rd);
    const double pobj = inner(C, X);
    const double dobj = b.dot(y);
    const double xs = inner(X, S);
    const double mu = xs / n;
    result.relative_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    result.primal_infeasibility = Rp.norm() / (1.0 + normb);
    result.dual_infeasibility = frobenius(Rd) / (1.0 + normC);

    if (result.relative_gap <= opts.tol_gap &&
        result.primal_infeasibility <= opts.tol_feas &&
        result.dual_infeasibility <= opts.tol_feas) {
      return finish(SolveStatus::Optimal, iter);
    }

    // Farkas-type certificates, normalized by the objective they improve.
    const double normX = frobenius(X);
    if (pobj < 0) {
      const double ratio = AX.norm() / -pobj;
      if (ratio <= opts.tol_feas || (normX > 1e10 && ratio <= 1e-3)) {
        return finish(SolveStatus::PrimalInfeasible, iter);
      }
    }
    if (dobj > 0) {
      BlockMatrix CmRd = C;
      axpy(-1.0, Rd, CmRd);
      const double ratio = frobenius(CmRd) / dobj;
      if (ratio <= opts.tol_feas || (y.norm() > 1e10 && ratio <= 1e-3)) {
        return finish(SolveStatus::DualInfeasibleOrUnbounded, iter);
      }
    }
    if (iter == opts.max_iter) break;

    Scaling sc;
    if (!nt_scaling(X, S, sc)) return finish(SolveStatus::Stalled, iter);
    // M = B B^T with rows of B the symmetric vectorizations of G^T F_i G;
    // a QR factorization of B^T avoids squaring its condition number.
    int nsv = 0;
    for (int s : sizes) nsv += s * (s + 1) / 2;
    Mat Bt(nsv, m);
    for (int i = 0; i < m; ++i) {
      int r = 0;
      for (std::size_t k = 0; k < sizes.size(); ++k) {
        const Mat Ft = sc.G[k].transpose() * F[i][k] * sc.G[k];
        for (int a = 0; a < sizes[k]; ++a) {
          Bt(r++, i) = Ft(a, a);
          for (int b = a + 1; b < sizes[k]; ++b) Bt(r++, i) = std::sqrt(2.0) * Ft(a, b);
        }
      }
    }
    Eigen::ColPivHouseholderQR<Mat> qr(Bt.rows(), Bt.cols());
    qr.setThreshold(1e-14);
    qr.compute(Bt);
    std::optional<Eigen::CompleteOrthogonalDecomposition<Mat>> cod;
    if (qr.rank() < m) cod.emplace(Mat(Bt.transpose() * Bt));
    auto solve_schur = [&](const Vec& rhs) -> Vec {
      if (cod) return cod->solve(rhs);
      const auto R = qr.matrixR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
      Vec z = qr.colsPermutation().transpose() * rhs;
      z = R.transpose().solve(z);
      z = R.solve(z);
      return qr.colsPermutation() * z;
    };
    const BlockMatrix WRdW = congruence(sc.W, Rd);

    auto direction = [&](const BlockMatrix& Rc) {
      Direction dir;
      BlockMatrix T = Rc;
      axpy(-1.0, WRdW, T);
      const Vec rhs = Rp - apply_A(F, T);
      dir.dy = solve_schur(rhs);
      for (int refine = 0;; ++refine) {
        dir.dS = Rd;
        axpy(-1.0, apply_At(F, dir.dy, sizes), dir.dS);
        dir.dX = Rc;
        axpy(-1.0, congruence(sc.W, dir.dS), dir.dX);
        symmetrize(dir.dX);
        symmetrize(dir.dS);
        // Iterative refinement on the primal equations A(dX) = Rp.
        const Vec e = Rp - apply_A(F, dir.dX);
        if (refine == 2 || e.norm() <= 1e-14 * (1 + Rp.norm())) break;
        dir.dy += solve_schur(e);
      }
      return dir;
    };

    // Predictor.
    BlockMatrix Rc = X;
    for (auto& blk : Rc) blk = -blk;
    const Direction pred = direction(Rc);
    const double ap = std::min(1.0, max_step(X, pred.dX));
    const double bp = std::min(1.0, max_step(S, pred.dS));
    BlockMatrix Xp = X, Sp = S;
    axpy(ap, pred.dX, Xp);
    axpy(bp, pred.dS, Sp);
    const double ratio = std::max(0.0, inner(Xp, Sp)) / xs;
    const double sigma = std::min(1.0, std::pow(ratio, 3.0));

    // Corrector in the scaled space where X and S both equal diag(d).
    const BlockMatrix dXt = congruence(sc.Ginv, pred.dX);
    BlockMatrix dSt;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      dSt.push_back(sc.G[k].transpose() * pred.dS[k] * sc.G[k]);
    }
    BlockMatrix Rc2;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      const Vec& d = sc.d[k];
      const Mat H0 = dXt[k] * dSt[k];
      const Mat H = 0.5 * (H0 + H0.transpose());
      Mat E(sizes[k], sizes[k]);
      for (int i = 0; i < sizes[k]; ++i) {
        for (int j = 0; j < sizes[k]; ++j) {
          const double target = (i == j ? sigma * mu - d(i) * d(i) : 0.0) - H(i, j);
          E(i, j) = 2.0 * target / (d(i) + d(j));
        }
      }
      Rc2.push_back(sc.G[k] * E * sc.G[k].transpose());
    }
    const Direction corr = direction(Rc2);

    const double gamma = 0.9 + 0.09 * std::min(ap, bp);
    const double alpha = std::min(1.0, gamma * max_step(X, corr.dX));
    const double beta = std::min(1.0, gamma * max_step(S, corr.dS));
    if (alpha < 1e-14 && beta < 1e-14) return finish(SolveStatus::Stalled, iter);
    if (!corr.dy.allFinite()) return finish(SolveStatus::Stalled, iter);
    axpy(alpha, corr.dX, X);
    y += beta * corr.dy;
    axpy(beta, corr.dS, S);
  }
  return finish(SolveStatus::IterationLimit, opts.max_iter);
}

double min_eigenvalue(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("matrix is not square");
  if (A.size() == 0) return std::numeric_limits<double>::infinity();
  const double scale = 1.0 + A.cwiseAbs().maxCoeff();
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("matrix is not symmetric");
  }
  return Eigen::SelfAdjointEigenSolver<Mat>(A, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

double min_eigenvalue(const BlockMatrix& A) {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& b : A) v = std::min(v, min_eigenvalue(b));
  return v;
}

std::optional<Eigen::MatrixXd> cholesky_psd(const Eigen::MatrixXd& A,
                                            double shift) {
  min_eigenvalue(A);  // symmetry check
  const Mat B = A + shift * Mat::Identity(A.rows(), A.cols());
  Eigen::LLT<Mat> llt(B);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Mat L = llt.matrixL();
  if ((L.diagonal().array() <= 0).any() || !L.allFinite()) return std::nullopt;
  return L;
}

// ---------------------------------------------------------------------------

void write_sdpa(std::ostream& out, const LMIProblem& p) {
  p.validate();
  out.precision(17);
  out << "* sparse SDPA problem: min c^T u s.t. sum u_i F_i - F0 >= 0\n";
  out << "* offset " << p.offset << "\n";
  out << p.m() << "\n" << p.block_sizes.size() << "\n";
  for (std::size_t b = 0; b < p.block_sizes.size(); ++b) {
    out << (b ? " " : "") << p.block_sizes[b];
  }
  out << "\n";
  for (int i = 0; i < p.m(); ++i) out << (i ? " " : "") << p.c(i);
  out << "\n";
  auto emit = [&](int matno, const BlockMatrix& M, double sign) {
    for (std::size_t b = 0; b < M.size(); ++b) {
      for (int i = 0; i < M[b].rows(); ++i) {
        for (int j = i; j < M[b].cols(); ++j) {
          const double v = sign * M[b](i, j);
          if (v != 0.0) {
            out << matno << " " << b + 1 << " " << i + 1 << " " << j + 1 << " "
                << v << "\n";
          }
        }
      }
    }
  };
  emit(0, p.F0, -1.0);
  for (int i = 0; i < p.m(); ++i) emit(i + 1, p.F[i], 1.0);
}

LMIProblem read_sdpa(std::istream& in) {
  LMIProblem p;
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && (line[0] == '*' || line[0] == '"')) {
      std::istringstream c(line.substr(1));
      std::string key;
      double v = 0;
      if (c >> key && key == "offset" && c >> v) p.offset = v;
      continue;
    }
    for (char& ch : line) {
      if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
    }
    std::istringstream ls(line);
    std::string t;
    // Header lines may carry trailing annotations such as "=mDIM".
    while (ls >> t) {
      const char c0 = t[0];
      if (std::isdigit(static_cast<unsigned char>(c0)) || c0 == '-' || c0 == '+' ||
          c0 == '.') {
        tokens.push_back(t);
      }
    }
  }
  std::size_t pos = 0;
  auto next = [&]() -> const std::string& {
    if (pos >= tokens.size()) throw std::invalid_argument("SDPA: unexpected end of input");
    return tokens[pos++];
  };
  try {
    const int m = std::stoi(next());
    const int nblocks = std::stoi(next());
    if (m < 0 || nblocks < 1) throw std::invalid_argument("SDPA: bad header");
    for (int b = 0; b < nblocks; ++b) p.block_sizes.push_back(std::abs(std::stoi(next())));
    p.c.resize(m);
    for (int i = 0; i < m; ++i) p.c(i) = std::stod(next());
    p.F0 = zeros(p.block_sizes);
    p.F.assign(m, zeros(p.block_sizes));
    while (pos < tokens.size()) {
      const int matno = std::stoi(next());
      const int blk = std::stoi(next()) - 1;
      const int i = std::stoi(next()) - 1;
      const int j = std::stoi(next()) - 1;
      const double v = std::stod(next());
      if (matno < 0 || matno > m || blk < 0 || blk >= nblocks || i < 0 || j < 0 ||
          i >= p.block_sizes[blk] || j >= p.block_sizes[blk]) {
        throw std::invalid_argument("SDPA: entry out of range");
      }
      Mat& M = matno == 0 ? p.F0[blk] : p.F[matno - 1][blk];
      const double value = matno == 0 ? -v : v;
      M(i, j) = value;
      M(j, i) = value;
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const std::invalid_argument*>(&e) &&
        std::string(e.what()).rfind("SDPA", 0) == 0) {
      throw;
    }
    throw std::invalid_argument(std::string("SDPA: malformed number: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace ssos
