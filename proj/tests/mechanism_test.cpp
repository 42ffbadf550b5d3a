#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "avgcost/equilibrium.hpp"
#include "avgcost/errors.hpp"
#include "avgcost/mechanism.hpp"
#include "oracles.hpp"

namespace avgcost {
namespace {

const CostFn kCost = CostFn::quadratic(1.0, 1.0);
const auto kDeficit = MechanismSpec::deficit();
const auto kSurplus = MechanismSpec::surplus();

MarketConfig linear_market(std::size_t n) { return MarketConfig::identical(n, ValuationFn::linear(10.0), kCost); }

MarketConfig example2_market(std::size_t n) {
  std::vector<ValuationFn> vs;
  for (double a : spread_alphas(n, 10.0, 11.0)) vs.push_back(ValuationFn::log(a));
  return MarketConfig(std::move(vs), kCost);
}

DemandProfile random_profile(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> q(n);
  for (auto& x : q) x = u(rng);
  return DemandProfile(std::move(q));
}

TEST(Incentive, TwoUsersAtOne) {
  const auto cfg = linear_market(2);
  const DemandProfile q({1.0, 1.0});
  EXPECT_DOUBLE_EQ(incentive(kDeficit, cfg, q, 0), -1.0);
  EXPECT_DOUBLE_EQ(incentive(kSurplus, cfg, q, 0), 0.0);
}

TEST(Incentive, SurplusPenalizesLargeUser) {
  const auto cfg = linear_market(3);
  EXPECT_DOUBLE_EQ(incentive(kSurplus, cfg, DemandProfile({2.0, 1.0, 1.0}), 0), -2.0);
}

TEST(Incentive, PaymentAndSurplus) {
  const auto cfg = linear_market(2);
  const DemandProfile q({1.0, 1.0});
  EXPECT_DOUBLE_EQ(payment(std::nullopt, cfg, q, 0), 3.0);
  EXPECT_DOUBLE_EQ(payment(kDeficit, cfg, q, 0), 2.0);
  EXPECT_DOUBLE_EQ(baseline_surplus(cfg, q, 0), 7.0);
  EXPECT_DOUBLE_EQ(incentivized_surplus(kDeficit, cfg, q, 0), 6.0);
}

TEST(Incentive, SurplusMechanismNeedsTwoUsers) {
  EXPECT_THROW(incentive(kSurplus, linear_market(1), DemandProfile({1.0}), 0), DomainError);
  EXPECT_DOUBLE_EQ(incentive(kDeficit, linear_market(1), DemandProfile({1.0}), 0), 0.0);
}

TEST(Incentive, ParseMechanism) {
  EXPECT_EQ(parse_mechanism("deficit")->kind, MechanismSpec::Kind::Deficit);
  EXPECT_EQ(parse_mechanism("surplus")->kind, MechanismSpec::Kind::Surplus);
  EXPECT_FALSE(parse_mechanism("none").has_value());
}

TEST(Incentive, SurplusDecomposition) {
  std::mt19937_64 rng(1);
  const auto cfg = example2_market(6);
  for (int k = 0; k < 100; ++k) {
    const auto q = random_profile(rng, 6);
    for (const auto& m : {kDeficit, kSurplus}) {
      for (std::size_t i = 0; i < 6; ++i) {
        const double lhs = incentivized_surplus(m, cfg, q, i);
        const double rhs = baseline_surplus(cfg, q, i) + incentive(m, cfg, q, i);
        EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(rhs)));
      }
    }
  }
}

TEST(Incentive, SignsOverRandomProfiles) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> size(2, 20);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = size(rng);
    const auto cfg = MarketConfig::identical(n, ValuationFn::log(10.0), CostFn::quadratic(1.3, 0.4));
    const auto q = random_profile(rng, n);
    double sum_d = 0.0, sum_s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = incentive(kDeficit, cfg, q, i);
      EXPECT_LE(d, 1e-12);
      sum_d += d;
      sum_s += incentive(kSurplus, cfg, q, i);
    }
    EXPECT_LE(sum_d, 1e-12);
    EXPECT_GE(sum_s, -1e-9 * std::max(1.0, q.total() * q.total()));
  }
}

TEST(Incentive, SurplusVanishesOnUniformProfiles) {
  for (std::size_t n : {2u, 3u, 10u, 77u}) {
    const auto cfg = linear_market(n);
    const DemandProfile q(std::vector<double>(n, 0.37));
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(incentive(kSurplus, cfg, q, i), 0.0, 1e-12);
  }
}

TEST(Incentive, BudgetAccounting) {
  std::mt19937_64 rng(3);
  const auto cfg = example2_market(8);
  for (int k = 0; k < 100; ++k) {
    const auto q = random_profile(rng, 8);
    for (const auto& m : {kDeficit, kSurplus}) {
      const auto b = budget_report(m, cfg, q);
      EXPECT_NEAR(b.total_payment, b.cost + b.total_incentive, 1e-9 * std::max(1.0, b.cost));
      EXPECT_NEAR(b.cost, cfg.cost().value(q.total()), 1e-12 * b.cost);
    }
  }
}

TEST(Incentive, AlignsMarginalWithSocialMarginal) {
  std::mt19937_64 rng(4);
  const auto cfg = example2_market(5);
  for (int k = 0; k < 200; ++k) {
    const auto raw = random_profile(rng, 5);
    std::vector<double> shifted(raw.values().begin(), raw.values().end());
    for (auto& x : shifted) x += 0.1;
    const DemandProfile q(shifted);
    for (const auto& m : {kDeficit, kSurplus}) {
      for (std::size_t i = 0; i < 5; ++i) {
        auto at = [&](double x) {
          std::vector<double> v(q.values().begin(), q.values().end());
          v[i] = x;
          return incentivized_surplus(m, cfg, DemandProfile(v), i);
        };
        const double fd = oracle::central_difference(at, q[i], 1e-5);
        const double expected = cfg.valuation(i).grad(q[i]) - cfg.cost().marginal(q.total());
        EXPECT_NEAR(fd, expected, 1e-6 * std::max(1.0, std::abs(expected)));
        EXPECT_NEAR(incentivized_marginal(cfg, q, i), expected, 1e-12 * std::max(1.0, std::abs(expected)));
      }
    }
  }
}

TEST(Impossibility, TwoUsers) {
  const auto w = impossibility_demo(linear_market(2), 2.0);
  EXPECT_DOUBLE_EQ(w.uniform_point, 1.0);
  EXPECT_DOUBLE_EQ(w.uniform_required_h, 3.0);
  EXPECT_DOUBLE_EQ(w.rescaled_required_h, 2.0);
  EXPECT_DOUBLE_EQ(w.gap, 1.0);
  EXPECT_TRUE(w.contradiction());
}

TEST(Impossibility, TenUsersPureQuadratic) {
  const auto cfg = MarketConfig::identical(10, ValuationFn::log(10.0), CostFn::quadratic(1.0, 0.0));
  const auto w = impossibility_demo(cfg, 9.0);
  EXPECT_NEAR(w.gap, 0.1, 1e-12);
  EXPECT_TRUE(w.contradiction());
}

TEST(Impossibility, Degenerate) {
  EXPECT_EQ(impossibility_demo(linear_market(3), 0.0).gap, 0.0);
  EXPECT_FALSE(impossibility_demo(linear_market(3), 0.0).contradiction());
  EXPECT_THROW(impossibility_demo(linear_market(3), -1.0), DomainError);
  EXPECT_THROW(impossibility_demo(linear_market(1), 1.0), DomainError);
}

TEST(IndividualRationality, Example2) {
  for (const auto& m : {kDeficit, kSurplus}) {
    const auto r = individual_rationality_check(m, example2_market(10));
    EXPECT_TRUE(r.passes);
    for (double w : r.w_at_optimum) EXPECT_GE(w, 0.0);
  }
}

TEST(IndividualRationality, SingleLinearUser) {
  const auto r = individual_rationality_check(kDeficit, linear_market(1));
  ASSERT_EQ(r.w_at_optimum.size(), 1u);
  EXPECT_NEAR(r.w_at_optimum[0], 20.25, 1e-8);
  EXPECT_TRUE(r.passes);
}

}  // namespace
}  // namespace avgcost
