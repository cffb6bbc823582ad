#include "ssos/moment.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace ssos {
namespace {

using testing::P;

const std::vector<std::string> X1 = {"x1"};
const std::vector<std::string> X2 = {"x1", "x2"};
const std::vector<std::string> X3 = {"x1", "x2", "x3"};

SolverOptions serial() {
  SolverOptions o;
  o.parallel = false;
  return o;
}

// C(n + k, k) by the multiplicative formula.
std::size_t binom_count(std::size_t n, unsigned k) {
  std::size_t r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n + i) / i;
  return r;
}

TEST(MonomialBasisTest, Sizes) {
  EXPECT_EQ(monomial_basis(2, 1).size(), 3u);
  EXPECT_EQ(monomial_basis(2, 2).size(), 6u);
  EXPECT_EQ(monomial_basis(3, 3).size(), 20u);
  for (std::size_t n = 1; n <= 4; ++n)
    for (unsigned k = 0; k <= 4; ++k) EXPECT_EQ(monomial_basis(n, k).size(), binom_count(n, k));
}

TEST(MonomialBasisTest, OrderAndPosition) {
  const auto B = monomial_basis(2, 2);
  const std::vector<std::string> expect = {"1", "x1", "x2", "x1^2", "x1*x2", "x2^2"};
  ASSERT_EQ(B.size(), expect.size());
  for (std::size_t i = 0; i < B.size(); ++i) {
    EXPECT_EQ(to_string(B.monomials[i], X2), expect[i]);
    EXPECT_EQ(B.position(B.monomials[i]), i);
  }
  EXPECT_THROW(B.position(Monomial(std::vector<std::uint32_t>{3, 0})), std::out_of_range);
}

TEST(RieszTest, Examples) {
  const auto B = monomial_basis(2, 2);
  // y = 1, 2, 3, 4, 5, 6 over 1, x1, x2, x1^2, x1x2, x2^2.
  Eigen::VectorXd y(6);
  y << 1, 2, 3, 4, 5, 6;
  EXPECT_DOUBLE_EQ(riesz(B, y, P("x1^2 - 2*x1*x2 + 3", X2)), 4 - 10 + 3);
  EXPECT_DOUBLE_EQ(riesz(B, y, P("0", X2)), 0.0);
  std::vector<Rational> yq = {1, 2, 3, 4, 5, 6};
  EXPECT_EQ(riesz(B, yq, P("x2^2/3 + x1", X2)), Rational(4));
}

TEST(RieszTest, PointMomentsEvaluate) {
  std::mt19937_64 rng(7);
  const auto B = monomial_basis(2, 4);
  for (int trial = 0; trial < 30; ++trial) {
    const auto z = testing::random_point(rng, 2);
    const Polynomial p = testing::random_polynomial(rng, 2, 4, 6);
    const auto y = point_moments(B, z);
    EXPECT_EQ(riesz(B, y, p), evaluate(p, std::span<const Rational>(z)));
  }
}

TEST(SolveAffineTest, ConsistentSystem) {
  // x0 + x1 = 2, x1 - x2 = 0 in R^3.
  std::vector<LinearEquation> eqs(2);
  eqs[0].coeffs = {{0, 1}, {1, 1}};
  eqs[0].rhs = 2;
  eqs[1].coeffs = {{1, 1}, {2, -1}};
  const auto sol = solve_affine(3, eqs);
  ASSERT_TRUE(sol.consistent);
  EXPECT_EQ(sol.rank, 2u);
  ASSERT_EQ(sol.basis.cols(), 1);
  EXPECT_NEAR((sol.basis.transpose() * sol.basis)(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(sol.basis.col(0).dot(sol.particular), 0.0, 1e-14);
  for (double u : {-3.0, 0.0, 2.5}) {
    const Eigen::VectorXd x = sol.particular + sol.basis.col(0) * u;
    EXPECT_NEAR(x(0) + x(1), 2.0, 1e-13);
    EXPECT_NEAR(x(1) - x(2), 0.0, 1e-13);
  }
}

TEST(SolveAffineTest, InconsistentAndRedundant) {
  std::vector<LinearEquation> eqs(3);
  eqs[0].coeffs = {{0, 1}};
  eqs[0].rhs = 1;
  eqs[1].coeffs = {{0, 2}};
  eqs[1].rhs = 2;
  EXPECT_TRUE(solve_affine(1, {eqs[0], eqs[1]}).consistent);
  EXPECT_EQ(solve_affine(1, {eqs[0], eqs[1]}).rank, 1u);
  eqs[2].coeffs = {{0, 3}};
  eqs[2].rhs = 4;
  EXPECT_FALSE(solve_affine(1, eqs).consistent);
  LinearEquation bad;
  bad.coeffs = {{5, 1}};
  EXPECT_THROW(solve_affine(2, {bad}), std::out_of_range);
}

TEST(SolveAffineTest, RandomSystemsAgreeWithRank) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 6;
    const std::size_t m = 1 + trial % 5;
    Eigen::MatrixXd A(m, n);
    std::vector<LinearEquation> eqs(m);
    // rhs = A * x0 keeps the system consistent.
    std::vector<int> x0(n);
    for (auto& v : x0) v = coef(rng);
    for (std::size_t i = 0; i < m; ++i) {
      int rhs = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const int c = coef(rng);
        A(i, j) = c;
        rhs += c * x0[j];
        if (c != 0) eqs[i].coeffs[j] = c;
      }
      eqs[i].rhs = rhs;
    }
    const auto sol = solve_affine(n, eqs);
    ASSERT_TRUE(sol.consistent);
    const auto rank = Eigen::FullPivLU<Eigen::MatrixXd>(A).rank();
    EXPECT_EQ(static_cast<Eigen::Index>(sol.rank), rank);
    EXPECT_EQ(sol.basis.cols(), static_cast<Eigen::Index>(n) - rank);
    EXPECT_LE((A * sol.basis).norm(), 1e-10);
    Eigen::VectorXd b(m);
    for (std::size_t i = 0; i < m; ++i) b(i) = eqs[i].rhs.get_d();
    EXPECT_LE((A * sol.particular - b).norm(), 1e-10);
  }
}

TEST(RelaxationTest, MinimalOrder) {
  EXPECT_EQ(minimal_order(P("x1", X2), {P("x1^3 - x2^2", X2)}), 2u);
  EXPECT_EQ(minimal_order(P("x1^4", X2), {}), 2u);
  EXPECT_EQ(minimal_order(P("x1", X2), {P("x1 - x2", X2)}), 1u);
  try {
    build_relaxation(P("x1", X2), {P("x1^3 - x2^2", X2)}, 1);
    FAIL() << "expected OrderTooSmall";
  } catch (const OrderTooSmall& e) {
    EXPECT_EQ(e.requested(), 1u);
    EXPECT_EQ(e.minimal(), 2u);
  }
}

TEST(RelaxationTest, SingleLocalizingEquation) {
  // x^2 - 1 at k = 1: M_0(h y) = y_2 - y_0.
  const auto rel = build_relaxation(P("x1", X1), {P("x1^2 - 1", X1)}, 1);
  ASSERT_EQ(rel.localizing.size(), 1u);
  ASSERT_EQ(rel.localizing[0].size(), 1u);
  const auto& eq = rel.localizing[0][0];
  EXPECT_EQ(eq.coeffs.size(), 2u);
  EXPECT_EQ(eq.coeffs.at(2), Rational(1));
  EXPECT_EQ(eq.coeffs.at(0), Rational(-1));
  EXPECT_EQ(eq.rhs, Rational(0));
  EXPECT_EQ(rel.equation_count(), 2u);
}

TEST(RelaxationTest, ResolvedCuspBlock) {
  const std::vector<std::string> names = {"y1", "y2", "λ1"};
  const auto rel = build_relaxation(P("y1", names),
                                    {P("y1 - y2^2", names), P("1 - λ1", names),
                                     P("2*λ1*y2", names)},
                                    1);
  EXPECT_EQ(rel.mbasis.size(), 4u);
  EXPECT_EQ(rel.ybasis.size(), 10u);
  EXPECT_EQ(rel.equation_count(), 4u);
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(10, 1, 10);
  const Eigen::MatrixXd M = rel.moment_matrix(y);
  ASSERT_EQ(M.rows(), 4);
  EXPECT_TRUE(M.isApprox(M.transpose()));
  EXPECT_EQ(M(0, 0), 1.0);
  // (y1, y2) entry is y_{y1 y2}.
  EXPECT_EQ(M(1, 2), y(rel.ybasis.position(Monomial(std::vector<std::uint32_t>{1, 1, 0}))));
}

TEST(RelaxationTest, EquationCountFormula) {
  // One equation per entry (a <= b) of M_{k - r_t}.
  const auto rel = build_relaxation(P("x1", X2), {P("x1^2 + x2^2 - 1", X2), P("x1 - x2", X2)}, 3);
  const std::size_t s2 = monomial_basis(2, 2).size();
  EXPECT_EQ(rel.localizing[0].size(), s2 * (s2 + 1) / 2);
  EXPECT_EQ(rel.localizing[1].size(), s2 * (s2 + 1) / 2);
  const auto zero = build_relaxation(P("x1", X2), {Polynomial(2)}, 1);
  EXPECT_TRUE(zero.localizing[0].empty());
}

TEST(RelaxationTest, PointMomentsAreFeasible) {
  // Rational points of the unit circle from t -> ((1 - t^2), 2t) / (1 + t^2).
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
  const Polynomial h = P("x1^2 + x2^2 - 1", X2);
  const auto rel = build_relaxation(P("x1 + x2", X2), {h}, 3);
  for (int trial = 0; trial < 20; ++trial) {
    Rational t(num(rng), den(rng));
    t.canonicalize();
    const Rational w = 1 + t * t;
    const std::vector<Rational> z = {(1 - t * t) / w, 2 * t / w};
    ASSERT_EQ(evaluate(h, std::span<const Rational>(z)), 0);
    const auto y = point_moments(rel.ybasis, z);
    for (const auto& eq : rel.equations()) {
      Rational lhs = 0;
      for (const auto& [j, c] : eq.coeffs) lhs += c * y[j];
      EXPECT_EQ(lhs, eq.rhs);
    }
    Eigen::VectorXd yd(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) yd(i) = y[i].get_d();
    EXPECT_GE(min_eigenvalue(rel.moment_matrix(yd)), -1e-12);
  }
}

// Order 2 of the unresolved cusp only imposes L(h_t) = 0.  The measure
// 8/9 delta(-T, 0, l) + 1/9 delta(2T, 0, l) with l = 1/(4T^2) satisfies it
// exactly and has L(x1) = -2T/3, so the relaxation is unbounded below.
TEST(RelaxationTest, UnresolvedCuspOrderTwoIsUnbounded) {
  const KKTSystem sys = build_kkt(P("x1", X2), {P("x1^3 - x2^2", X2)});
  const auto rel = build_relaxation(sys.objective, sys.polynomials, 2);
  for (int T : {1, 3, 10, 100}) {
    const Rational l = Rational(1, 4 * T * T);
    const std::vector<Rational> a = {Rational(-T), 0, l}, b = {Rational(2 * T), 0, l};
    const auto ya = point_moments(rel.ybasis, a), yb = point_moments(rel.ybasis, b);
    std::vector<Rational> y(ya.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = Rational(8, 9) * ya[i] + Rational(1, 9) * yb[i];
    for (const auto& eq : rel.equations()) {
      Rational lhs = 0;
      for (const auto& [j, c] : eq.coeffs) lhs += c * y[j];
      EXPECT_EQ(lhs, eq.rhs);
    }
    Eigen::VectorXd yd(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) yd(i) = y[i].get_d();
    EXPECT_GE(min_eigenvalue(rel.moment_matrix(yd)), -1e-9 * yd.cwiseAbs().maxCoeff());
    Rational value(-2 * T, 3);
    value.canonicalize();
    EXPECT_EQ(riesz(rel.ybasis, y, sys.objective), value);
  }
  const auto sol = solve_primal(rel, serial());
  EXPECT_EQ(sol.status, RelaxationStatus::Unbounded);
}

TEST(RelaxationTest, ToStringCoversAllStatuses) {
  EXPECT_EQ(to_string(RelaxationStatus::Optimal), "Optimal");
  EXPECT_EQ(to_string(RelaxationStatus::Infeasible), "Infeasible");
  EXPECT_EQ(to_string(RelaxationStatus::Unbounded), "Unbounded");
  EXPECT_EQ(to_string(RelaxationStatus::Stalled), "Stalled");
  EXPECT_EQ(to_string(RelaxationStatus::IterationLimit), "IterationLimit");
  EXPECT_EQ(to_string(RelaxationStatus::NotBuilt), "NotBuilt");
  EXPECT_EQ(from_solver(SolveStatus::PrimalInfeasible), RelaxationStatus::Infeasible);
}

TEST(ReduceTest, FaceAnnihilatesIdealVectors) {
  // On V(x1 - x2) at k = 2 the localizing rows give L_y((x1 - x2)^2) = 0,
  // so h lies in the kernel of every feasible M_2(y).  x1 h would need
  // L_y(h^2 x1^2), which no degree-3 localizing row reaches.
  const auto rel = build_relaxation(P("x1^2", X2), {P("x1 - x2", X2)}, 2);
  const auto red = reduce(rel);
  ASSERT_TRUE(red.consistent);
  EXPECT_EQ(red.face.rows(), 6);
  EXPECT_EQ(red.face.cols(), 5);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(6);
  v(1) = 1;
  v(2) = -1;
  EXPECT_LE((red.face.transpose() * v).norm(), 1e-12);
  // At k = 1 only L_y(h) = 0 is imposed and the face is the full space.
  EXPECT_EQ(reduce(build_relaxation(P("x1^2", X2), {P("x1 - x2", X2)}, 1)).face.cols(), 3);
}

TEST(ReduceTest, KktOfUnresolvedCuspIsEmptyAtOrderThree) {
  const auto sys = build_kkt(P("x1", X2), {P("x1^3 - x2^2", X2)});
  const auto rel = build_relaxation(sys.objective, sys.polynomials, 3);
  EXPECT_FALSE(reduce(rel, FaceCandidates::IdealMultiplesAndMonomials).consistent);
  const auto sol = solve_primal(rel, serial());
  EXPECT_EQ(sol.status, RelaxationStatus::Infeasible);
}

TEST(ReduceTest, NegativeForcedDiagonalIsInfeasible) {
  // x1^2 + 1 = 0 forces y_{x1^2} = -1 < 0.
  const auto rel = build_relaxation(P("x1", X1), {P("x1^2 + 1", X1)}, 1);
  EXPECT_FALSE(reduce(rel, FaceCandidates::IdealMultiplesAndMonomials).consistent);
  const auto sol = solve_primal(rel, serial());
  EXPECT_EQ(sol.status, RelaxationStatus::Infeasible);
  EXPECT_TRUE(sol.monomial_face);
}

TEST(SolvePrimalTest, PureMoment) {
  const auto rel = build_relaxation(P("x1^2", X1), {}, 1);
  const auto sol = solve_primal(rel, serial());
  ASSERT_EQ(sol.status, RelaxationStatus::Optimal);
  EXPECT_NEAR(sol.tau, 0.0, 1e-7);
  EXPECT_NEAR(sol.dual.xi, 0.0, 1e-7);
}

TEST(SolvePrimalTest, ShiftedSquare) {
  const auto rel = build_relaxation(P("x1^2 + 1", X1), {}, 1);
  const auto sol = solve_primal(rel, serial());
  ASSERT_EQ(sol.status, RelaxationStatus::Optimal);
  EXPECT_NEAR(sol.tau, 1.0, 1e-7);
  EXPECT_NEAR(sol.dual.xi, 1.0, 1e-7);
  EXPECT_GE(min_eigenvalue(sol.dual.gram), -1e-8);
}

TEST(SolvePrimalTest, LinearOnCircle) {
  for (unsigned k = 1; k <= 3; ++k) {
    const auto rel = build_relaxation(P("x1 + x2", X2), {P("x1^2 + x2^2 - 1", X2)}, k);
    const auto sol = solve_primal(rel, serial());
    ASSERT_EQ(sol.status, RelaxationStatus::Optimal) << "k=" << k;
    EXPECT_NEAR(sol.tau, -std::numbers::sqrt2, 1e-6);
    EXPECT_NEAR(sol.dual.xi, -std::numbers::sqrt2, 1e-6);
  }
}

// h0 - xi - v^T G v - sum_t h_t u_t over ybasis.
Eigen::VectorXd sos_residual(const MomentRelaxation& rel, const DualSolution& d) {
  Eigen::VectorXd r = rel.objective;
  r(0) -= d.xi;
  const auto& B = d.basis;
  for (std::size_t a = 0; a < B.size(); ++a)
    for (std::size_t b = 0; b < B.size(); ++b)
      r(rel.ybasis.position(B.monomials[a] * B.monomials[b])) -= d.gram(a, b);
  for (std::size_t t = 0; t < rel.h.size(); ++t)
    for (std::size_t i = 0; i < d.multiplier_bases[t].size(); ++i)
      for (const auto& [m, c] : rel.h[t].terms())
        r(rel.ybasis.position(m * d.multiplier_bases[t].monomials[i])) -= c.get_d() * d.multipliers[t](i);
  return r;
}

TEST(SolveDualTest, RecoveredCertificateMatches) {
  const Polynomial h0 = P("x1 + x2", X2);
  const std::vector<Polynomial> h = {P("x1^2 + x2^2 - 1", X2)};
  const auto rel = build_relaxation(h0, h, 2);
  const auto d = solve_dual(h0, h, 2, serial());
  ASSERT_EQ(d.status, RelaxationStatus::Optimal);
  EXPECT_EQ(d.multiplier_bases[0].size(), monomial_basis(2, 2).size());
  EXPECT_LE(sos_residual(rel, d).lpNorm<Eigen::Infinity>(), 1e-6);
  EXPECT_GE(min_eigenvalue(d.gram), -1e-7);
}

TEST(SolveDualTest, DirectAgreesWithPrimal) {
  const Polynomial h0 = P("x1 + x2", X2);
  const std::vector<Polynomial> h = {P("x1^2 + x2^2 - 1", X2)};
  for (unsigned k = 1; k <= 2; ++k) {
    const auto a = solve_dual(h0, h, k, serial(), DualMode::FromPrimal);
    const auto b = solve_dual(h0, h, k, serial(), DualMode::Direct);
    ASSERT_EQ(a.status, RelaxationStatus::Optimal);
    ASSERT_EQ(b.status, RelaxationStatus::Optimal);
    EXPECT_NEAR(a.xi, b.xi, 1e-6);
    EXPECT_LE(sos_residual(build_relaxation(h0, h, k), b).lpNorm<Eigen::Infinity>(), 1e-6);
  }
}

TEST(FitMultipliersTest, RecoversExactMultiple) {
  const Polynomial h = P("x1^2 + x2^2 - 1", X2);
  const Polynomial q = P("3*x1 - x2 + 2", X2);
  const auto Y = monomial_basis(2, 3);
  Eigen::VectorXd target = Eigen::VectorXd::Zero(Y.size());
  const Polynomial hq = h * q;
  for (const auto& [m, c] : hq.terms()) target(Y.position(m)) = c.get_d();
  const auto u = fit_multipliers(target, {h}, {monomial_basis(2, 1)}, Y);
  ASSERT_EQ(u.size(), 1u);
  EXPECT_NEAR(u[0](0), 2.0, 1e-12);
  EXPECT_NEAR(u[0](1), 3.0, 1e-12);
  EXPECT_NEAR(u[0](2), -1.0, 1e-12);
}

TEST(HierarchyTest, ResolvedCusp) {
  const auto phi = catalog("cusp");
  const auto rep = solve_singular(phi.target, P("x1", X2), phi, {});
  ASSERT_FALSE(rep.hierarchy.orders.empty());
  const auto& k1 = rep.hierarchy.orders[0];
  ASSERT_EQ(k1.tau_status, RelaxationStatus::Optimal);
  EXPECT_NEAR(k1.tau, 0.0, 1e-6);
  EXPECT_NEAR(k1.rho, 0.0, 1e-6);
  EXPECT_TRUE(rep.hierarchy.converged);
  EXPECT_FALSE(rep.exceeds_sampled);
  EXPECT_EQ(rep.morphism, "cusp");
}

TEST(HierarchyTest, LorentzPullback) {
  const auto phi = catalog("lorentz-cylinder");
  PipelineOptions opts;
  opts.k_min = 2;
  opts.k_max = 3;
  const auto rep = solve_singular(phi.target, P("x1^2 + x2^2 + x3^2", X3), phi, opts);
  ASSERT_TRUE(rep.hierarchy.value.has_value());
  EXPECT_NEAR(*rep.hierarchy.value, 0.0, 1e-6);
  EXPECT_TRUE(rep.hierarchy.converged);
  EXPECT_EQ(rep.hierarchy.converged_order, 2u);
}

TEST(HierarchyTest, NonAttainmentIsFlagged) {
  VarietySpec V;
  V.nvars = 2;
  V.generators = {Polynomial(2)};
  PipelineOptions opts;
  opts.k_min = 2;
  opts.k_max = 4;
  const auto rep = solve_direct(V, P("(x1*x2 - 1)^2 + x1^2", X2), opts);
  ASSERT_TRUE(rep.hierarchy.value.has_value());
  EXPECT_NEAR(*rep.hierarchy.value, 1.0, 1e-5);
  EXPECT_TRUE(rep.hierarchy.converged);
  ASSERT_TRUE(rep.sampled_minimum.has_value());
  EXPECT_LT(*rep.sampled_minimum, 1.0);
  EXPECT_TRUE(rep.exceeds_sampled);
}

TEST(HierarchyTest, OrdersBelowMinimumAreNotBuilt) {
  const auto h = run_hierarchy(P("x1", X2), {P("x1^3 - x2^2", X2)}, 1, 1);
  ASSERT_EQ(h.orders.size(), 1u);
  EXPECT_EQ(h.orders[0].tau_status, RelaxationStatus::NotBuilt);
  EXPECT_FALSE(h.value.has_value());
  EXPECT_THROW(run_hierarchy(P("x1", X2), {}, 3, 2), std::invalid_argument);
}

TEST(HierarchyTest, DeterministicAcrossThreadCounts) {
  const Polynomial h0 = P("x1^3 + x2^2 - x1*x2", X2);
  const std::vector<Polynomial> h = {P("x1^2 + x2^2 - 1", X2)};
  HierarchyOptions one, two;
  one.threads = 1;
  two.threads = 2;
  const auto a = run_hierarchy(h0, h, 2, 3, one);
  const auto b = run_hierarchy(h0, h, 2, 3, two);
  ASSERT_EQ(a.orders.size(), b.orders.size());
  for (std::size_t i = 0; i < a.orders.size(); ++i) {
    EXPECT_EQ(a.orders[i].tau_status, b.orders[i].tau_status);
    EXPECT_EQ(a.orders[i].tau, b.orders[i].tau);
    EXPECT_EQ(a.orders[i].rho, b.orders[i].rho);
  }
}

// Random objectives of degree <= 2 on the circle: weak duality,
// monotonicity and the sampled upper bound.
TEST(HierarchyProperty, InvariantsOnCircle) {
  std::mt19937_64 rng(2024);
  const std::vector<Polynomial> h = {P("x1^2 + x2^2 - 1", X2)};
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
  for (int trial = 0; trial < 8; ++trial) {
    Polynomial h0 = testing::random_polynomial(rng, 2, 3, 6);
    if (h0.degree() < 1) h0 = h0 + P("x1", X2);
    HierarchyOptions opts;
    opts.threads = 1;
    const auto res = run_hierarchy(h0, h, minimal_order(h0, h), 3, opts);
    const OrderRecord* prev = nullptr;
    for (const auto& r : res.orders) {
      if (r.tau_status != RelaxationStatus::Optimal) continue;
      EXPECT_LE(r.rho, r.tau + 2e-8) << to_string(h0, X2);
      if (prev) {
        EXPECT_GE(r.tau, prev->tau - 1e-8) << to_string(h0, X2);
        EXPECT_GE(r.rho, prev->rho - 1e-8) << to_string(h0, X2);
      }
      prev = &r;
      for (int s = 0; s < 50; ++s) {
        const double th = angle(rng);
        const std::vector<double> z = {std::cos(th), std::sin(th)};
        EXPECT_LE(r.tau, evaluate(h0, std::span<const double>(z)) + 1e-8);
      }
    }
  }
}

TEST(LagrangeSigmaTest, AffineObjectiveOnTwoPoints) {
  const Polynomial h0 = P("x1 + 1", X1);
  const Polynomial sigma = lagrange_sigma(h0, {0, 2});
  EXPECT_EQ(sigma, P("(x1 + 1)^2 / 2", X1));
  for (const Rational& x : {Rational(1), Rational(-1)}) {
    const std::vector<Rational> pt = {x};
    EXPECT_EQ(evaluate(h0 - sigma, std::span<const Rational>(pt)), 0);
  }
}

TEST(LagrangeSigmaTest, RejectsBadValues) {
  const Polynomial h0 = P("x1", X1);
  EXPECT_THROW(lagrange_sigma(h0, {}), std::invalid_argument);
  EXPECT_THROW(lagrange_sigma(h0, {1, -1}), std::invalid_argument);
  EXPECT_THROW(lagrange_sigma(h0, {1, 1}), std::invalid_argument);
}

// Finite varieties given by random rational points: sigma matches h0 on
// every point and deg sigma <= 2 deg(h0) (r - 1).
TEST(LagrangeSigmaProperty, InterpolatesAndRespectsDegree) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> npts(1, 4);
  for (int trial = 0; trial < 40; ++trial) {
    Polynomial h0 = testing::random_polynomial(rng, 2, 3, 4);
    if (h0.is_constant()) h0 = h0 + P("x1*x2", X2);
    std::vector<std::vector<Rational>> pts;
    const int count = npts(rng);
    for (int i = 0; i < count; ++i) pts.push_back(testing::random_point(rng, 2));
    // Shift so the image is non-negative, then collect distinct values.
    Rational lo = evaluate(h0, std::span<const Rational>(pts[0]));
    for (const auto& z : pts) lo = std::min(lo, evaluate(h0, std::span<const Rational>(z)));
    h0 = h0 - Polynomial::constant(2, lo);
    std::vector<Rational> values;
    for (const auto& z : pts) {
      const Rational v = evaluate(h0, std::span<const Rational>(z));
      if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
    }
    const Polynomial sigma = lagrange_sigma(h0, values);
    const unsigned r = static_cast<unsigned>(values.size());
    EXPECT_LE(sigma.degree(), 2 * h0.degree() * (r - 1));
    for (const auto& z : pts)
      EXPECT_EQ(evaluate(sigma, std::span<const Rational>(z)),
                evaluate(h0, std::span<const Rational>(z)));
  }
}

TEST(DegreeBoundsTest, UsesObjectiveDegree) {
  const auto s = degree_bounds(P("x1^4", X1), {P("x1^2 - 1", X1)});
  EXPECT_EQ(s.n, 1u);
  EXPECT_EQ(s.l, 1u);
  EXPECT_EQ(s.d, 4u);
  EXPECT_EQ(degree_bounds(P("x1", X1), {}).d, 2u);
  EXPECT_EQ(degree_bounds(P("x1", X1), {P("x1^2 - 1", X1)}).cardinality, BigInt(375));
}

}  // namespace
}  // namespace ssos
