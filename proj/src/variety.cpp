#include "ssos/variety.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ssos {

void VarietySpec::validate() const {
  for (const auto& h : generators) {
    if (h.nvars() != nvars) {
      throw std::invalid_argument("generator ring has " +
                                  std::to_string(h.nvars()) +
                                  " variables, variety has " +
                                  std::to_string(nvars));
    }
  }
  if (dimension && *dimension > nvars) {
    throw std::invalid_argument("dimension exceeds number of variables");
  }
  if (!varnames.empty() && varnames.size() != nvars) {
    throw std::invalid_argument("variable name count does not match nvars");
  }
}

std::vector<std::string> VarietySpec::names() const {
  return varnames.empty() ? default_varnames(nvars) : varnames;
}

JacobianMatrix jacobian(const VarietySpec& V) {
  V.validate();
  if (V.generators.empty()) {
    throw std::invalid_argument("jacobian: empty generator list");
  }
  JacobianMatrix J(V.nvars);
  for (std::size_t t = 0; t < V.nvars; ++t) {
    for (const auto& h : V.generators) J[t].push_back(differentiate(h, t));
  }
  return J;
}

Polynomial determinant(const std::vector<std::vector<Polynomial>>& m) {
  const std::size_t size = m.size();
  if (size == 0) throw std::invalid_argument("determinant of empty matrix");
  if (size == 1) return m[0][0];
  if (size == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  Polynomial det(m[0][0].nvars());
  for (std::size_t col = 0; col < size; ++col) {
    if (m[0][col].is_zero()) continue;
    std::vector<std::vector<Polynomial>> sub;
    for (std::size_t r = 1; r < size; ++r) {
      std::vector<Polynomial> row;
      for (std::size_t c = 0; c < size; ++c) {
        if (c != col) row.push_back(m[r][c]);
      }
      sub.push_back(std::move(row));
    }
    const Polynomial term = m[0][col] * determinant(sub);
    det = (col % 2 == 0) ? det + term : det - term;
  }
  return det;
}

namespace {

// All size-t subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t t) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(t);
  for (std::size_t i = 0; i < t; ++i) cur[i] = i;
  if (t > n) return out;
  while (true) {
    out.push_back(cur);
    std::size_t i = t;
    while (i > 0 && cur[i - 1] == n - t + i - 1) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < t; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

}  // namespace

MinorVector minor_vector(const VarietySpec& V, unsigned t) {
  const JacobianMatrix J = jacobian(V);
  const std::size_t n = V.nvars;
  const std::size_t l = V.generators.size();
  if (t == 0 || t > std::min(n, l)) {
    throw std::out_of_range("minor order " + std::to_string(t) +
                            " outside [1, " +
                            std::to_string(std::min(n, l)) + "]");
  }
  MinorVector out;
  out.order = t;
  const auto rows = subsets(n, t);
  const auto cols = subsets(l, t);
  for (const auto& rs : rows) {
    for (const auto& cs : cols) {
      std::vector<std::vector<Polynomial>> sub(t);
      for (std::size_t a = 0; a < t; ++a) {
        for (std::size_t b = 0; b < t; ++b) sub[a].push_back(J[rs[a]][cs[b]]);
      }
      out.minors.push_back(determinant(sub));
    }
  }
  return out;
}

SingularSystem singular_system(const VarietySpec& V) {
  V.validate();
  if (!V.dimension) {
    throw std::invalid_argument("singular_system: variety dimension missing");
  }
  if (*V.dimension >= V.nvars) {
    throw std::invalid_argument(
        "singular_system: codimension n - d must be positive");
  }
  const unsigned t = static_cast<unsigned>(V.nvars - *V.dimension);
  SingularSystem out;
  out.order = t;
  out.system = V;
  out.system.dimension.reset();
  if (t > std::min(V.nvars, V.generators.size())) {
    out.minors_empty = true;
    return out;
  }
  for (auto& m : minor_vector(V, t).minors) {
    out.system.generators.push_back(std::move(m));
  }
  return out;
}

Eigen::MatrixXd evaluate_jacobian(const JacobianMatrix& J,
                                  std::span<const double> point) {
  const std::size_t n = J.size();
  const std::size_t l = n == 0 ? 0 : J[0].size();
  if (point.size() != n) {
    throw std::invalid_argument("evaluate_jacobian: point dimension mismatch");
  }
  Eigen::MatrixXd M(n, l);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < l; ++j) M(t, j) = evaluate(J[t][j], point);
  }
  return M;
}

int numeric_rank(const JacobianMatrix& J, std::span<const double> point,
                 double tol) {
  if (!(tol > 0)) throw std::invalid_argument("numeric_rank: tol must be > 0");
  const Eigen::MatrixXd M = evaluate_jacobian(J, point);
  if (M.size() == 0) return 0;
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues();
  const double threshold = tol * std::max(s.size() ? s(0) : 0.0, 1.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > threshold) ++rank;
  }
  return rank;
}

int exact_rank(const JacobianMatrix& J, std::span<const Rational> point) {
  const std::size_t n = J.size();
  const std::size_t l = n == 0 ? 0 : J[0].size();
  if (point.size() != n) {
    throw std::invalid_argument("exact_rank: point dimension mismatch");
  }
  std::vector<std::vector<Rational>> M(n, std::vector<Rational>(l));
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < l; ++j) M[t][j] = evaluate(J[t][j], point);
  }
  int rank = 0;
  for (std::size_t col = 0; col < l && static_cast<std::size_t>(rank) < n;
       ++col) {
    std::size_t pivot = rank;
    while (pivot < n && M[pivot][col] == 0) ++pivot;
    if (pivot == n) continue;
    std::swap(M[pivot], M[rank]);
    for (std::size_t r = rank + 1; r < n; ++r) {
      if (M[r][col] == 0) continue;
      const Rational f = M[r][col] / M[rank][col];
      for (std::size_t c = col; c < l; ++c) M[r][c] -= f * M[rank][c];
    }
    ++rank;
  }
  return rank;
}

std::string to_string(PointClass c) {
  switch (c) {
    case PointClass::Regular:
      return "Regular";
    case PointClass::Singular:
      return "Singular";
    case PointClass::NotOnVariety:
      return "NotOnVariety";
  }
  return "?";
}

namespace {

double max_residual(const VarietySpec& V, std::span<const double> x) {
  double r = 0.0;
  for (const auto& h : V.generators) r = std::max(r, std::abs(evaluate(h, x)));
  return r;
}

unsigned codimension(const VarietySpec& V) {
  if (!V.dimension) {
    throw std::invalid_argument("variety dimension missing");
  }
  return static_cast<unsigned>(V.nvars - *V.dimension);
}

}  // namespace

PointClass classify_point(const VarietySpec& V, std::span<const double> point,
                          double tol, double rank_tol) {
  V.validate();
  const unsigned codim = codimension(V);
  if (!(tol > 0)) throw std::invalid_argument("classify_point: tol must be > 0");
  if (point.size() != V.nvars) {
    throw std::invalid_argument("classify_point: point dimension mismatch");
  }
  if (max_residual(V, point) > tol) return PointClass::NotOnVariety;
  if (V.generators.empty()) {
    return codim == 0 ? PointClass::Regular : PointClass::Singular;
  }
  const int rank = numeric_rank(jacobian(V), point, rank_tol);
  return rank == static_cast<int>(codim) ? PointClass::Regular
                                         : PointClass::Singular;
}

std::optional<std::vector<double>> newton_project(
    const VarietySpec& V, const JacobianMatrix& J, std::vector<double> x,
    const ProjectionOptions& opts) {
  const std::size_t l = V.generators.size();
  Eigen::VectorXd h(l);
  for (int it = 0; it <= opts.max_iterations; ++it) {
    for (std::size_t j = 0; j < l; ++j) h(j) = evaluate(V.generators[j], x);
    if (!h.allFinite()) return std::nullopt;
    if (h.lpNorm<Eigen::Infinity>() <= opts.residual_tol) return x;
    if (it == opts.max_iterations) break;
    // Rows of J(h)^T are generator gradients.
    const Eigen::MatrixXd A = evaluate_jacobian(J, x).transpose();
    const Eigen::VectorXd step =
        A.completeOrthogonalDecomposition().solve(h);
    if (!step.allFinite()) return std::nullopt;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= step(i);
  }
  return std::nullopt;
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

struct SearchContext {
  const VarietySpec& V;
  JacobianMatrix J;
  std::span<const double> center;
  double radius;
  unsigned codim;
  std::uint64_t seed;
  const SearchOptions& opts;
};

std::optional<std::vector<double>> run_trial(const SearchContext& ctx,
                                             long trial) {
  const std::size_t n = ctx.V.nvars;
  std::mt19937_64 rng(substream_seed(ctx.seed, static_cast<std::uint64_t>(trial)));
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> dir(n);
  double norm = 0.0;
  for (auto& v : dir) {
    v = normal(rng);
    norm += v * v;
  }
  norm = std::sqrt(norm);
  const double r = ctx.radius * std::pow(unit(rng), 1.0 / static_cast<double>(n));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = ctx.center[i] + (norm > 0 ? r * dir[i] / norm : 0.0);
  }
  auto projected = newton_project(ctx.V, ctx.J, std::move(x), ctx.opts.projection);
  if (!projected) return std::nullopt;
  double dist = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (*projected)[i] - ctx.center[i];
    dist += d * d;
  }
  if (std::sqrt(dist) > ctx.radius) return std::nullopt;
  if (classify_point(ctx.V, *projected, ctx.opts.classify_tol,
                     ctx.opts.rank_tol) != PointClass::Regular) {
    return std::nullopt;
  }
  const Eigen::VectorXd s =
      Eigen::JacobiSVD<Eigen::MatrixXd>(evaluate_jacobian(ctx.J, *projected))
          .singularValues();
  if (ctx.codim > 0 && s(ctx.codim - 1) < ctx.opts.min_singular_value) {
    return std::nullopt;
  }
  return projected;
}

SearchContext make_context(const VarietySpec& V, std::span<const double> center,
                           double radius, std::uint64_t seed,
                           const SearchOptions& opts) {
  V.validate();
  if (!(radius > 0)) {
    throw std::invalid_argument("regular_point_search: radius must be > 0");
  }
  if (center.size() != V.nvars) {
    throw std::invalid_argument("regular_point_search: center dimension mismatch");
  }
  const unsigned codim = codimension(V);
  if (V.generators.empty()) {
    throw std::invalid_argument("regular_point_search: no generators");
  }
  return SearchContext{V, jacobian(V), center, radius, codim, seed, opts};
}

}  // namespace

std::optional<SearchResult> regular_point_search_serial(
    const VarietySpec& V, std::span<const double> center, double radius,
    long trials, std::uint64_t seed, const SearchOptions& opts) {
  const SearchContext ctx = make_context(V, center, radius, seed, opts);
  for (long i = 0; i < trials; ++i) {
    if (auto p = run_trial(ctx, i)) return SearchResult{std::move(*p), i};
  }
  return std::nullopt;
}

std::optional<SearchResult> regular_point_search(
    const VarietySpec& V, std::span<const double> center, double radius,
    long trials, std::uint64_t seed, const SearchOptions& opts) {
  const SearchContext ctx = make_context(V, center, radius, seed, opts);
  const long batch = std::max(1, opts.batch);
  for (long start = 0; start < trials; start += batch) {
    const long stop = std::min(trials, start + batch);
    std::vector<std::optional<std::vector<double>>> found(stop - start);
#pragma omp parallel for schedule(dynamic)
    for (long i = start; i < stop; ++i) found[i - start] = run_trial(ctx, i);
    for (long i = start; i < stop; ++i) {
      if (found[i - start]) return SearchResult{std::move(*found[i - start]), i};
    }
  }
  return std::nullopt;
}

}  // namespace ssos
