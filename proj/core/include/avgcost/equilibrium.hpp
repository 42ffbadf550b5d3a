#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "avgcost/market.hpp"
#include "avgcost/mechanism.hpp"

namespace avgcost {

struct SolverSettings {
  /// Absolute stopping width for every bisection.
  double tol_root = 1e-12;
  /// Largest stationarity violation accepted as converged.
  double tol_foc = 1e-8;
  /// Outer bisection steps on the total demand.
  int max_outer_iters = 200;
  /// Upper end of the initial outer bracket [0, bracket_start]; doubled on demand.
  double bracket_start = 1.0;
  /// The bracket may grow to bracket_start * 2^max_bracket_doublings.
  int max_bracket_doublings = 60;
  /// Weight given to the best response in q_i <- (1-d) q_i + d BR_i(q).
  double damping = 0.5;
  /// Gauss-Seidel sweeps allowed for best-response iteration.
  int max_best_response_sweeps = 20000;
};

enum class EquilibriumKind {
  PriceTaker,
  AverageCostPriceTaker,
  Optimal,
  Nash,
  NashWithIncentives,
};

std::string_view to_string(EquilibriumKind kind);

struct EquilibriumReport {
  DemandProfile profile;
  EquilibriumKind kind = EquilibriumKind::Nash;
  /// Price the users faced: the given price for PriceTaker, p(||q||) otherwise.
  double price = 0.0;
  double foc_residual = 0.0;
  int iterations = 0;
  bool converged = false;

  double total_demand() const noexcept { return profile.total(); }
};

/// Each user maximizes v_i(q_i) - q_i * price. Users exactly at the activity
/// threshold v_i'(0) = price get zero demand. A Linear user with
/// alpha > price has no finite best response; that raises ConvergenceError.
EquilibriumReport solve_price_taker(const MarketConfig& cfg, double price, const SolverSettings& settings = {});

/// Price-taking users facing the average-cost tariff: the fixed point
/// q = PT(p(||q||)).
EquilibriumReport solve_average_cost_price_taker(const MarketConfig& cfg, const SolverSettings& settings = {});

/// Surplus-maximizing profile mu: v_i'(mu_i) = C'(||mu||) for active users.
/// Linear users tied at the margin share the residual total equally.
EquilibriumReport solve_optimal(const MarketConfig& cfg, const SolverSettings& settings = {});

/// Cournot-Nash profile xi: v_i'(xi_i) = p(||xi||) + xi_i p'(||xi||) for active users.
EquilibriumReport solve_nash(const MarketConfig& cfg, const SolverSettings& settings = {});

/// Damped Gauss-Seidel best-response iteration from `start`. With `mech`
/// the users maximize W_i, otherwise U_i.
EquilibriumReport best_response_equilibrium(const MarketConfig& cfg, const std::optional<MechanismSpec>& mech,
                                            const DemandProfile& start, const SolverSettings& settings = {});

/// Nash equilibrium of the incentivized game, from the zero profile.
EquilibriumReport solve_nash_with_incentives(const MarketConfig& cfg, const MechanismSpec& mech,
                                             const SolverSettings& settings = {});

/// Stationarity residuals used by the reports.
double optimal_foc_residual(const MarketConfig& cfg, const DemandProfile& q);
double nash_foc_residual(const MarketConfig& cfg, const DemandProfile& q);

}  // namespace avgcost
