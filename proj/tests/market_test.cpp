#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "avgcost/errors.hpp"
#include "avgcost/market.hpp"
#include "oracles.hpp"

namespace avgcost {
namespace {

TEST(ValuationFn, LinearValue) { EXPECT_DOUBLE_EQ(ValuationFn::linear(10.0).value(4.5), 45.0); }

TEST(ValuationFn, LogIsZeroAtOrigin) { EXPECT_EQ(ValuationFn::log(10.0).value(0.0), 0.0); }

TEST(ValuationFn, LogValueAtOne) { EXPECT_NEAR(ValuationFn::log(10.0).value(1.0), 6.931471805599453, 1e-12); }

TEST(ValuationFn, NegativeDemandIsDomainError) {
  EXPECT_THROW(ValuationFn::linear(10.0).value(-1.0), DomainError);
  EXPECT_THROW(ValuationFn::log(10.0).grad(-0.5), DomainError);
}

TEST(ValuationFn, RejectsNonPositiveAlpha) {
  EXPECT_THROW(ValuationFn::linear(0.0), DomainError);
  EXPECT_THROW(ValuationFn::log(-3.0), DomainError);
}

TEST(ValuationFn, GradMatchesFiniteDifferences) {
  for (const auto& v : {ValuationFn::linear(7.0), ValuationFn::log(10.0), ValuationFn::log(0.3)}) {
    for (double q = 1e-3; q <= 1e3; q *= 1.5) {
      const double h = 1e-5 * q;
      const double fd = oracle::central_difference([&](double x) { return v.value(x); }, q, h);
      EXPECT_LE(std::abs(fd - v.grad(q)), 1e-6 * std::abs(v.grad(q))) << v.describe() << " q=" << q;
    }
  }
}

TEST(ValuationFn, InverseGrad) {
  EXPECT_DOUBLE_EQ(ValuationFn::log(10.0).inverse_grad(5.0), 1.0);
  EXPECT_EQ(ValuationFn::log(10.0).inverse_grad(11.0), 0.0);
  EXPECT_TRUE(std::isinf(ValuationFn::linear(10.0).inverse_grad(9.0)));
  EXPECT_EQ(ValuationFn::linear(10.0).inverse_grad(10.0), 0.0);
}

TEST(PriceFn, Example1Parameters) {
  const PriceFn p(CostFn::quadratic(1.0, 1.0));
  EXPECT_DOUBLE_EQ(p.value(4.5), 5.5);
  EXPECT_DOUBLE_EQ(p.value(0.0), 1.0);
}

TEST(PriceFn, PureQuadraticCost) { EXPECT_DOUBLE_EQ(PriceFn(CostFn::quadratic(2.0, 0.0)).value(3.0), 6.0); }

TEST(PriceFn, MatchesAverageCost) {
  const auto c = CostFn::quadratic(1.7, 0.4);
  const PriceFn p(c);
  for (double g = 0.01; g < 100.0; g *= 1.3) EXPECT_NEAR(p.value(g), c.value(g) / g, 1e-12 * p.value(g));
}

TEST(PriceFn, NegativeTotalIsDomainError) {
  EXPECT_THROW(PriceFn(CostFn::quadratic(1.0, 1.0)).value(-0.1), DomainError);
}

// p(g) + g p'(g) = C'(g), with p' taken by finite differences.
TEST(PriceFn, MarginalCostIdentity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> beta(0.1, 5.0), b(0.0, 5.0), g(1e-3, 50.0);
  for (int k = 0; k < 200; ++k) {
    const auto c = CostFn::quadratic(beta(rng), b(rng));
    const PriceFn p(c);
    const double x = g(rng);
    const double dp = oracle::central_difference([&](double y) { return p.value(y); }, x, 1e-6 * x);
    const double lhs = p.value(x) + x * dp;
    EXPECT_LE(std::abs(lhs - c.marginal(x)), 1e-9 * std::max(1.0, c.marginal(x)));
    EXPECT_LE(std::abs(p.value(x) + x * p.grad(x) - c.marginal(x)), 1e-12 * std::max(1.0, c.marginal(x)));
  }
}

// t(q_i) = q_i p(q_i + s) satisfies the midpoint/chord inequality.
TEST(PriceFn, PaymentIsConvexInOwnDemand) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  const PriceFn p(CostFn::quadratic(1.3, 0.7));
  for (int k = 0; k < 500; ++k) {
    const double s = u(rng);
    double a = u(rng), c = u(rng);
    if (a > c) std::swap(a, c);
    const double w = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double mid = a + w * (c - a);
    auto t = [&](double x) { return x * p.value(x + s); };
    EXPECT_LE(t(mid), (1.0 - w) * t(a) + w * t(c) + 1e-10 * (1.0 + t(c)));
  }
}

TEST(DemandProfile, TotalIsSum) {
  const DemandProfile q({1.0, 2.5, 0.25});
  EXPECT_EQ(q.total(), 3.75);
  EXPECT_EQ(q.others(1), 1.25);
  EXPECT_THROW(DemandProfile({1.0, -0.1}), DomainError);
  EXPECT_THROW(q.others(3), UsageError);
}

TEST(MarketConfig, SpreadAlphas) {
  const auto a = spread_alphas(5, 10.0, 11.0);
  ASSERT_EQ(a.size(), 5u);
  EXPECT_DOUBLE_EQ(a.front(), 10.0);
  EXPECT_DOUBLE_EQ(a[2], 10.5);
  EXPECT_DOUBLE_EQ(a.back(), 11.0);
  EXPECT_EQ(spread_alphas(1, 10.0, 11.0), std::vector<double>{10.0});
}

TEST(ValidateAssumptions, Example1Passes) {
  const auto cfg = MarketConfig::identical(9, ValuationFn::linear(10.0), CostFn::quadratic(1.0, 1.0));
  const auto rep = validate_assumptions(cfg, {10.0, 200});
  for (const auto& c : rep.clauses) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
  EXPECT_TRUE(rep.all_passed());
}

TEST(ValidateAssumptions, LogValuationsPass) {
  const auto cfg = MarketConfig::identical(4, ValuationFn::log(10.0), CostFn::quadratic(1.0, 1.0));
  EXPECT_TRUE(validate_assumptions(cfg, {20.0, 100}).all_passed());
}

TEST(ValidateAssumptions, LinearCostIsNotStrictlyConvex) {
  const auto cfg = MarketConfig::identical(2, ValuationFn::linear(10.0), CostFn::quadratic(0.0, 1.0));
  const auto rep = validate_assumptions(cfg, {10.0, 100});
  ASSERT_NE(rep.find("cost_strictly_convex"), nullptr);
  EXPECT_FALSE(rep.find("cost_strictly_convex")->passed);
  EXPECT_TRUE(rep.find("valuation_concave")->passed);
  EXPECT_FALSE(rep.all_passed());
}

TEST(ValidateAssumptions, GridErrors) {
  const auto cfg = MarketConfig::identical(1, ValuationFn::linear(10.0), CostFn::quadratic(1.0, 1.0));
  EXPECT_THROW(validate_assumptions(cfg, {10.0, 0}), UsageError);
  EXPECT_THROW(validate_assumptions(cfg, {10.0, 50}), UsageError);
}

}  // namespace
}  // namespace avgcost
