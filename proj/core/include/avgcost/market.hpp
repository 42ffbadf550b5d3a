#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace avgcost {

/// Concave, non-decreasing valuation v(q) with v(0) = 0.
///
/// Linear: v(q) = alpha * q.  Log: v(q) = alpha * log(1 + q).
class ValuationFn {
 public:
  enum class Family { Linear, Log };

  static ValuationFn linear(double alpha);
  static ValuationFn log(double alpha);

  Family family() const noexcept { return family_; }
  double alpha() const noexcept { return alpha_; }

  double value(double q) const;
  double grad(double q) const;
  /// Second derivative; analytic per family.
  double curvature(double q) const;

  /// Smallest q >= 0 with v'(q) <= marginal. Returns +infinity when v' stays
  /// above `marginal` forever (Linear with alpha > marginal). Linear users at
  /// exactly alpha == marginal get 0.
  double inverse_grad(double marginal) const;

  std::string describe() const;

 private:
  ValuationFn(Family family, double alpha);

  Family family_;
  double alpha_;
};

/// Generation cost C(g) = beta*g^2 + b*g.
class CostFn {
 public:
  static CostFn quadratic(double beta, double b);

  double beta() const noexcept { return beta_; }
  double linear_coeff() const noexcept { return b_; }

  double value(double g) const;
  double marginal(double g) const;
  double curvature(double g) const;

  std::string describe() const;

 private:
  CostFn(double beta, double b) : beta_(beta), b_(b) {}

  double beta_;
  double b_;
};

/// Average-cost tariff p(g) = C(g)/g, extended to g = 0 by its right limit.
class PriceFn {
 public:
  explicit PriceFn(const CostFn& cost) : cost_(cost) {}

  double value(double g) const;
  double grad(double g) const;

  const CostFn& cost() const noexcept { return cost_; }

 private:
  CostFn cost_;
};

/// Non-negative demand vector together with its L1 norm.
class DemandProfile {
 public:
  DemandProfile() = default;
  explicit DemandProfile(std::vector<double> q);
  static DemandProfile zeros(std::size_t n);

  std::size_t size() const noexcept { return q_.size(); }
  double operator[](std::size_t i) const { return q_[i]; }
  std::span<const double> values() const noexcept { return q_; }
  double total() const noexcept { return total_; }
  /// ||q_{-i}|| = ||q|| - q_i.
  double others(std::size_t i) const;

 private:
  std::vector<double> q_;
  double total_ = 0.0;
};

/// A market instance: N users with private valuations and one cost function.
class MarketConfig {
 public:
  MarketConfig(std::vector<ValuationFn> valuations, CostFn cost);

  /// N copies of the same valuation.
  static MarketConfig identical(std::size_t n, const ValuationFn& v, const CostFn& cost);

  std::size_t n_users() const noexcept { return valuations_.size(); }
  const ValuationFn& valuation(std::size_t i) const { return valuations_.at(i); }
  std::span<const ValuationFn> valuations() const noexcept { return valuations_; }
  const CostFn& cost() const noexcept { return cost_; }
  const PriceFn& price() const noexcept { return price_; }

 private:
  std::vector<ValuationFn> valuations_;
  CostFn cost_;
  PriceFn price_;
};

/// alpha_i = lo + (i-1)(hi-lo)/(N-1) for i = 1..N; alpha_1 = lo when N = 1.
std::vector<double> spread_alphas(std::size_t n, double lo, double hi);

struct AssumptionGrid {
  double g_max = 0.0;
  std::size_t points = 0;
};

struct ClauseResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ClauseResult> clauses;

  bool all_passed() const;
  const ClauseResult* find(const std::string& name) const;
};

/// Finite-difference sampling of the concavity, convexity and monotonicity
/// clauses on the uniform grid (0, g_max]. Requires at least 100 points.
ValidationReport validate_assumptions(const MarketConfig& cfg, const AssumptionGrid& grid);

}  // namespace avgcost
