#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "avgcost/market.hpp"
#include "avgcost/mechanism.hpp"

namespace avgcost {

struct ReplicatorSettings {
  /// Resource cap per user. Must exceed the user's equilibrium demand.
  double budget = 1.0;
  double dt = 0.01;
  double t_max = 50.0;
  /// Record every k-th step (the initial and final states are always kept).
  std::size_t sample_every = 10;
  /// Interior seed x_i(0) = initial_share * budget, unless `initial` is set.
  double initial_share = 0.01;
  std::optional<DemandProfile> initial;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<DemandProfile> states;

  const DemandProfile& final_state() const { return states.back(); }
};

/// Two-strategy replicator dynamics per user, shares of the budget in use
/// versus idle, with fitness equal to the marginal profit:
///
///   dx_i/dt = x_i (budget - x_i) F_i(x) / budget
///
/// F_i = dU_i/dq_i without a mechanism and dW_i/dq_i with one. Integrated
/// with classical RK4. Throws StepSizeError when a state leaves
/// [0, budget] or stops being finite.
Trajectory replicator_solve(const MarketConfig& cfg, const std::optional<MechanismSpec>& mech,
                            const ReplicatorSettings& settings);

/// Columns: t,q_1,...,q_N,total
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace avgcost
