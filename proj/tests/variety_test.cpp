#include "ssos/variety.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "test_support.hpp"

namespace ssos {
namespace {

using fixtures::kX2;
using fixtures::kX3;
using testing::P;

std::size_t binomial(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

TEST(JacobianTest, CuspColumn) {
  const auto J = jacobian(fixtures::cusp());
  ASSERT_EQ(J.size(), 2u);
  ASSERT_EQ(J[0].size(), 1u);
  EXPECT_EQ(J[0][0], P("3*x1^2", kX2));
  EXPECT_EQ(J[1][0], P("-2*x2", kX2));
}

TEST(JacobianTest, CoordinateGenerators) {
  const auto V = fixtures::make_variety(kX3, {"x1", "x2"}, 1);
  const auto M = evaluate_jacobian(jacobian(V), std::vector<double>{3, 4, 5});
  Eigen::MatrixXd expected(3, 2);
  expected << 1, 0, 0, 1, 0, 0;
  EXPECT_EQ(M, expected);
}

TEST(JacobianTest, WhitneyColumn) {
  const auto J = jacobian(fixtures::whitney());
  EXPECT_EQ(J[0][0], P("2*x1", kX3));
  EXPECT_EQ(J[1][0], P("-2*x2*x3", kX3));
  EXPECT_EQ(J[2][0], P("-x2^2", kX3));
}

TEST(JacobianTest, RejectsEmptyGenerators) {
  VarietySpec V;
  V.nvars = 2;
  EXPECT_THROW(jacobian(V), std::invalid_argument);
}

TEST(MinorTest, FirstOrderCusp) {
  const auto m = minor_vector(fixtures::cusp(), 1);
  ASSERT_EQ(m.minors.size(), 2u);
  EXPECT_EQ(m.minors[0], P("3*x1^2", kX2));
  EXPECT_EQ(m.minors[1], P("-2*x2", kX2));
}

TEST(MinorTest, ConstantGeneratorGivesZeros) {
  const auto m = minor_vector(fixtures::make_variety(kX2, {"5"}, 2), 1);
  ASSERT_EQ(m.minors.size(), 2u);
  for (const auto& p : m.minors) EXPECT_TRUE(p.is_zero());
}

TEST(MinorTest, SecondOrderCylinder) {
  // J = [[2x1, 0], [2x2, 0], [0, 1]].
  const auto m =
      minor_vector(fixtures::make_variety(kX3, {"x1^2 + x2^2 - 1", "x3"}, 1), 2);
  ASSERT_EQ(m.minors.size(), 3u);
  EXPECT_TRUE(m.minors[0].is_zero());
  EXPECT_EQ(m.minors[1], P("2*x1", kX3));
  EXPECT_EQ(m.minors[2], P("2*x2", kX3));
}

TEST(MinorTest, OrderOutOfRange) {
  EXPECT_THROW(minor_vector(fixtures::cusp(), 0), std::out_of_range);
  EXPECT_THROW(minor_vector(fixtures::cusp(), 2), std::out_of_range);
}

TEST(MinorTest, DeterminantOfThreeByThree) {
  const std::vector<std::string> names = {"a"};
  auto c = [&](const char* s) { return P(s, names); };
  const std::vector<std::vector<Polynomial>> m = {
      {c("2"), c("0"), c("1")}, {c("1"), c("a"), c("0")}, {c("0"), c("1"), c("3")}};
  // 2(3a - 0) - 0 + 1(1 - 0) = 6a + 1.
  EXPECT_EQ(determinant(m), c("6*a + 1"));
}

class MinorProperties : public ::testing::TestWithParam<int> {};

TEST_P(MinorProperties, CountAndDegree) {
  std::mt19937_64 rng(GetParam());
  std::uniform_int_distribution<std::size_t> dim(1, 4);
  const std::size_t n = dim(rng), l = dim(rng);
  VarietySpec V;
  V.nvars = n;
  unsigned max_deg = 0;
  for (std::size_t j = 0; j < l; ++j) {
    auto h = testing::random_polynomial(rng, n, 3, 4);
    max_deg = std::max(max_deg, h.degree());
    V.generators.push_back(h);
  }
  for (unsigned t = 1; t <= std::min(n, l); ++t) {
    const auto m = minor_vector(V, t);
    EXPECT_EQ(m.minors.size(), binomial(n, t) * binomial(l, t));
    for (const auto& p : m.minors) EXPECT_LE(p.degree(), t * max_deg);
  }
}

INSTANTIATE_TEST_SUITE_P(Random, MinorProperties, ::testing::Range(0, 30));

TEST(SingularSystemTest, RequiresDimension) {
  auto V = fixtures::cusp();
  V.dimension.reset();
  EXPECT_THROW(singular_system(V), std::invalid_argument);
  V.dimension = 2;
  EXPECT_THROW(singular_system(V), std::invalid_argument);
}

TEST(SingularSystemTest, FlagsEmptyMinorVector) {
  const auto s = singular_system(fixtures::make_variety(kX3, {"x1"}, 1));
  EXPECT_TRUE(s.minors_empty);
  EXPECT_EQ(s.system.generators.size(), 1u);
}

void expect_vanishes_on_axis(const VarietySpec& V) {
  const auto s = singular_system(V);
  EXPECT_FALSE(s.minors_empty);
  for (int a = -2; a <= 2; ++a) {
    for (int b = 1; b <= 5; ++b) {
      const std::vector<Rational> p = {0, 0, Rational(a * b, 5)};
      for (const auto& g : s.system.generators) EXPECT_EQ(evaluate(g, p), 0);
    }
  }
}

void expect_nonzero_at(const VarietySpec& V,
                       std::vector<double> (*sample)(std::mt19937_64&)) {
  const auto s = singular_system(V);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const auto x = sample(rng);
    ASSERT_LE(std::abs(evaluate(V.generators[0], x)), 1e-10);
    double best = 0.0;
    for (const auto& g : s.system.generators) {
      best = std::max(best, std::abs(evaluate(g, x)));
    }
    EXPECT_GT(best, 1e-6);
  }
}

TEST(SingularSystemTest, WhitneyLocusIsAxis) {
  expect_vanishes_on_axis(fixtures::whitney());
  expect_nonzero_at(fixtures::whitney(), fixtures::whitney_point);
}

TEST(SingularSystemTest, CartanLocusIsAxis) {
  expect_vanishes_on_axis(fixtures::cartan());
  expect_nonzero_at(fixtures::cartan(), fixtures::cartan_point);
}

TEST(SingularSystemTest, CuspLocusIsOrigin) {
  const auto s = singular_system(fixtures::cusp());
  const std::vector<Rational> origin = {0, 0};
  for (const auto& g : s.system.generators) EXPECT_EQ(evaluate(g, origin), 0);
  expect_nonzero_at(fixtures::cusp(), fixtures::cusp_point);
}

TEST(RankTest, CuspJacobian) {
  const auto J = jacobian(fixtures::cusp());
  EXPECT_EQ(numeric_rank(J, std::vector<double>{0, 0}, 1e-8), 0);
  EXPECT_EQ(numeric_rank(J, std::vector<double>{1, 1}, 1e-8), 1);
  EXPECT_EQ(exact_rank(J, std::vector<Rational>{0, 0}), 0);
  EXPECT_EQ(exact_rank(J, std::vector<Rational>{1, 1}), 1);
  EXPECT_THROW(numeric_rank(J, std::vector<double>{0}, 1e-8),
               std::invalid_argument);
}

TEST(RankTest, ZeroMatrix) {
  const auto J = jacobian(fixtures::make_variety(kX2, {"1", "2"}, 0));
  EXPECT_EQ(numeric_rank(J, std::vector<double>{0.3, 0.4}, 1e-8), 0);
}

TEST(ClassifyTest, Fixtures) {
  EXPECT_EQ(classify_point(fixtures::whitney(), std::vector<double>{0, 0, 1}, 1e-10),
            PointClass::Singular);
  EXPECT_EQ(classify_point(fixtures::whitney(), std::vector<double>{1, 1, 1}, 1e-10),
            PointClass::Regular);
  const double eps = 0.1;
  const std::vector<double> a = {eps / 2, eps / 2, std::sqrt(2.0) * eps / 2};
  EXPECT_EQ(classify_point(fixtures::lorentz_cone(), a, 1e-10), PointClass::Regular);
  EXPECT_EQ(classify_point(fixtures::cusp(), std::vector<double>{1, 0}, 1e-10),
            PointClass::NotOnVariety);
}

TEST(SearchTest, CuspNearOrigin) {
  const std::vector<double> c = {0, 0};
  const auto r = regular_point_search(fixtures::cusp(), c, 0.1, 1000, 0);
  ASSERT_TRUE(r.has_value());
  EXPECT_LE(std::hypot(r->point[0], r->point[1]), 0.1);
  EXPECT_EQ(classify_point(fixtures::cusp(), r->point, 1e-10), PointClass::Regular);
}

TEST(SearchTest, ModifiedUmbrellaNearAxis) {
  const std::vector<double> c = {0, 5, 0};
  const auto r = regular_point_search(fixtures::modified_umbrella(), c, 0.5, 1000, 1);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(classify_point(fixtures::modified_umbrella(), r->point, 1e-10),
            PointClass::Regular);
}

TEST(SearchTest, WhitneyHandleHasNoRegularPoints) {
  const std::vector<double> c = {0, 0, -1};
  EXPECT_FALSE(regular_point_search(fixtures::whitney(), c, 0.4, 2000, 3));
}

TEST(SearchTest, ParallelMatchesSerial) {
  const std::vector<double> c = {0.5, 0.5, 0.5};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = regular_point_search(fixtures::whitney(), c, 0.3, 200, seed);
    const auto b = regular_point_search_serial(fixtures::whitney(), c, 0.3, 200, seed);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) {
      EXPECT_EQ(a->trial, b->trial);
      EXPECT_EQ(a->point, b->point);
    }
  }
}

TEST(SearchTest, ReturnedPointsAreRegular) {
  const std::vector<double> c = {0.2, -0.1, 0.3};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = regular_point_search(fixtures::cartan(), c, 0.5, 100, seed);
    if (!r) continue;
    EXPECT_EQ(classify_point(fixtures::cartan(), r->point, 1e-10),
              PointClass::Regular);
  }
}

}  // namespace
}  // namespace ssos
