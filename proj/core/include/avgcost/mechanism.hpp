#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "avgcost/market.hpp"

namespace avgcost {

struct SolverSettings;

/// Which price-estimate h(.) defines the incentive
///   I_i(q) = ||q_{-i}|| * (h(||q_{-i}||) - p(||q||)).
///
/// Deficit: h(g) = p(g), total incentives never positive.
/// Surplus: h(g) = p(N g / (N - 1)), total incentives never negative; needs N >= 2.
struct MechanismSpec {
  enum class Kind { Deficit, Surplus };
  Kind kind = Kind::Deficit;

  static MechanismSpec deficit() { return {Kind::Deficit}; }
  static MechanismSpec surplus() { return {Kind::Surplus}; }

  /// Throws DomainError for Surplus with a single user.
  void check(const MarketConfig& cfg) const;
  double h(const MarketConfig& cfg, double others_total) const;
};

std::string_view to_string(MechanismSpec::Kind kind);
/// Accepts "deficit" and "surplus".
std::optional<MechanismSpec> parse_mechanism(std::string_view name);

/// U_i(q) = v_i(q_i) - q_i p(||q||).
double baseline_surplus(const MarketConfig& cfg, const DemandProfile& q, std::size_t i);

/// dU_i/dq_i = v_i'(q_i) - p(||q||) - q_i p'(||q||).
double strategic_marginal(const MarketConfig& cfg, const DemandProfile& q, std::size_t i);

/// dW_i/dq_i = v_i'(q_i) - C'(||q||). The h-term depends only on ||q_{-i}||
/// and drops out, so the result is the same for every mechanism instance.
double incentivized_marginal(const MarketConfig& cfg, const DemandProfile& q, std::size_t i);

double incentive(const MechanismSpec& mech, const MarketConfig& cfg, const DemandProfile& q, std::size_t i);

/// o_i(q) = q_i p(||q||) + I_i(q); plain t_i(q) when `mech` is empty.
double payment(const std::optional<MechanismSpec>& mech, const MarketConfig& cfg, const DemandProfile& q,
               std::size_t i);

/// W_i(q) = v_i(q_i) - ||q|| p(||q||) + ||q_{-i}|| h(||q_{-i}||).
double incentivized_surplus(const MechanismSpec& mech, const MarketConfig& cfg, const DemandProfile& q,
                            std::size_t i);

struct BudgetReport {
  double total_incentive = 0.0;
  double total_payment = 0.0;
  double cost = 0.0;
};

BudgetReport budget_report(const MechanismSpec& mech, const MarketConfig& cfg, const DemandProfile& q);

/// Numeric witness that no h(.) balances the budget. With
/// theta = sum_i ||q_{-i}||, budget balance at the uniform profile forces
/// h(theta/N) = p(theta/(N-1)); at a profile with one idle user it forces
/// h(theta/(N-1)) = p(theta/(N-1)). Rescaling the second constraint to the
/// same argument x = theta/N demands h(x) = p(theta/N), so both cannot hold
/// whenever p(theta/(N-1)) > p(theta/N).
struct ImpossibilityWitness {
  std::size_t n_users = 0;
  double theta = 0.0;
  double uniform_point = 0.0;          // theta / N
  double uniform_required_h = 0.0;     // p(theta / (N-1))
  double one_idle_point = 0.0;         // theta / (N-1)
  double one_idle_required_h = 0.0;    // p(theta / (N-1))
  double rescaled_required_h = 0.0;    // p(theta / N): one-idle constraint evaluated at uniform_point
  double gap = 0.0;                    // uniform_required_h - rescaled_required_h
  bool contradiction() const { return gap > 0.0; }
};

/// theta = 0 is the degenerate case where both constraints coincide (gap 0).
/// Throws DomainError for theta < 0, non-finite theta, or N < 2.
ImpossibilityWitness impossibility_demo(const MarketConfig& cfg, double theta);

struct IndividualRationalityReport {
  DemandProfile optimum;
  std::vector<double> w_at_optimum;
  /// h(||mu_{-i}||) - p(||mu_{-i}||) per user.
  std::vector<double> sufficient_margin;
  bool passes = false;
  bool sufficient_condition_holds = false;
};

/// Evaluates W_i at the surplus-maximizing profile. Passes iff every
/// W_i(mu) >= -1e-9.
IndividualRationalityReport individual_rationality_check(const MechanismSpec& mech, const MarketConfig& cfg,
                                                         const SolverSettings& settings);
IndividualRationalityReport individual_rationality_check(const MechanismSpec& mech, const MarketConfig& cfg);

}  // namespace avgcost
