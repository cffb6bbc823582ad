#include "ssos/kkt.hpp"

#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace ssos {
namespace {

using testing::P;

TEST(BuildKktTest, ResolvedCusp) {
  const std::vector<std::string> y = {"y1", "y2"};
  const auto sys = build_kkt(P("y1", y), {P("y1 - y2^2", y)});
  const std::vector<std::string> names = {"y1", "y2", "λ1"};
  EXPECT_EQ(sys.varnames(y), names);
  ASSERT_EQ(sys.polynomials.size(), 3u);
  EXPECT_EQ(sys.polynomials[0], P("y1 - y2^2", names));
  EXPECT_EQ(sys.polynomials[1], P("1 - λ1", names));
  EXPECT_EQ(sys.polynomials[2], P("2*λ1*y2", names));
  EXPECT_EQ(sys.objective, P("y1", names));
}

TEST(BuildKktTest, UnresolvedCusp) {
  const std::vector<std::string> x = {"x1", "x2"};
  const auto sys = build_kkt(P("x1", x), {P("x1^3 - x2^2", x)});
  const std::vector<std::string> names = {"x1", "x2", "λ1"};
  EXPECT_EQ(sys.polynomials[0], P("x1^3 - x2^2", names));
  EXPECT_EQ(sys.polynomials[1], P("1 - 3*λ1*x1^2", names));
  EXPECT_EQ(sys.polynomials[2], P("2*λ1*x2", names));
}

TEST(BuildKktTest, NoGeneratorsGivesGradient) {
  const std::vector<std::string> x = {"x1", "x2"};
  const Polynomial h0 = P("(x1*x2 - 1)^2 + x1^2", x);
  const auto sys = build_kkt(h0, {});
  EXPECT_EQ(sys.nvars(), 2u);
  ASSERT_EQ(sys.polynomials.size(), 2u);
  EXPECT_EQ(sys.polynomials[0], differentiate(h0, 0));
  EXPECT_EQ(sys.polynomials[1], differentiate(h0, 1));
}

TEST(BuildKktTest, ZeroGeneratorAccepted) {
  const std::vector<std::string> x = {"x1", "x2"};
  const Polynomial h0 = P("(x1*x2 - 1)^2 + x1^2", x);
  const auto sys = build_kkt(h0, {Polynomial(2)});
  ASSERT_EQ(sys.polynomials.size(), 3u);
  EXPECT_TRUE(sys.polynomials[0].is_zero());
  EXPECT_EQ(sys.polynomials[1], extend_ring(differentiate(h0, 0), 3));
}

TEST(BuildKktTest, RingMismatch) {
  EXPECT_THROW(build_kkt(P("x1", {"x1"}), {P("x1", {"x1", "x2"})}),
               std::invalid_argument);
}

TEST(BuildKktTest, DegreeBound) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto h0 = testing::random_polynomial(rng, 3, 4, 5);
    std::vector<Polynomial> h;
    unsigned bound = h0.degree();
    for (int j = 0; j < 2; ++j) {
      h.push_back(testing::random_polynomial(rng, 3, 3, 4));
      bound = std::max(bound, 1 + h.back().degree());
    }
    for (const auto& p : build_kkt(h0, h).polynomials) EXPECT_LE(p.degree(), bound);
  }
}

TEST(KktResidualTest, Values) {
  const std::vector<std::string> y = {"y1", "y2"};
  const auto resolved = build_kkt(P("y1", y), {P("y1 - y2^2", y)});
  EXPECT_EQ(kkt_residual(resolved, std::vector<double>{0, 0}, std::vector<double>{1}), 0.0);
  EXPECT_GT(kkt_residual(resolved, std::vector<double>{0.3, 0.2}, std::vector<double>{2}), 0.0);

  const auto cusp = build_kkt(P("x1", {"x1", "x2"}), {P("x1^3 - x2^2", {"x1", "x2"})});
  for (double lambda : {-3.0, 0.0, 0.5, 10.0}) {
    EXPECT_EQ(kkt_residual(cusp, std::vector<double>{0, 0}, std::vector<double>{lambda}),
              1.0);
  }
  EXPECT_THROW(kkt_residual(cusp, std::vector<double>{0}, std::vector<double>{0}),
               std::invalid_argument);
}

TEST(KktResidualTest, RegularParaboloidMinimizer) {
  const std::vector<std::string> x = {"x1", "x2", "x3"};
  const auto sys = build_kkt(P("x1^2 + x2^2", x), {P("x3 - x1^2 - x2^2", x)});
  // grad h0 = (0, 0, 0) at the origin, grad h = (0, 0, 1), so lambda = 0.
  EXPECT_LE(kkt_residual(sys, std::vector<double>{0, 0, 0}, std::vector<double>{0}),
            1e-12);
}

TEST(SlackTransformTest, Instances) {
  const auto a = slack_transform(P("y1", {"y1"}), {P("1 - y1^2", {"y1"})});
  const std::vector<std::string> yz = {"y1", "z1"};
  EXPECT_EQ(a.h0, P("y1", yz));
  ASSERT_EQ(a.h.size(), 1u);
  EXPECT_EQ(a.h[0], P("1 - y1^2 - z1^2", yz));

  const auto b = slack_transform(P("y1", {"y1"}), {Polynomial(1)});
  EXPECT_EQ(b.h[0], P("-z1^2", yz));

  const std::vector<std::string> y2 = {"y1", "y2"};
  const std::vector<std::string> y2z2 = {"y1", "y2", "z1", "z2"};
  const auto c = slack_transform(P("y1 + y2", y2), {P("y1", y2), P("y2", y2)});
  EXPECT_EQ(c.h0.nvars(), 4u);
  EXPECT_EQ(c.h[0], P("y1 - z1^2", y2z2));
  EXPECT_EQ(c.h[1], P("y2 - z2^2", y2z2));

  EXPECT_THROW(slack_transform(P("y1", {"y1"}), {}), std::invalid_argument);
}

}  // namespace
}  // namespace ssos
