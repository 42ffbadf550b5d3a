#pragma once

#include <cstddef>
#include <ostream>
#include <string>

#include "avgcost/equilibrium.hpp"
#include "avgcost/market.hpp"

namespace avgcost {

/// sum_i v_i(q_i) - C(||q||). Under average-cost pricing this equals sum_i U_i.
double customer_surplus(const MarketConfig& cfg, const DemandProfile& q);

/// Customer surplus at the Nash profile over the one at the optimum. Throws
/// DegenerateInstanceError when the optimal surplus is not positive.
double efficiency_ratio(const MarketConfig& cfg, const DemandProfile& xi, const DemandProfile& mu);

/// ||xi|| / ||mu||; DegenerateInstanceError when ||mu|| = 0.
double demand_ratio(const DemandProfile& xi, const DemandProfile& mu);

/// Every user consumes at least as much at the Nash profile, one strictly more.
bool tragedy_check(const DemandProfile& xi, const DemandProfile& mu);

/// Asymptotic floor 2 - eta of the efficiency ratio for identical linear
/// valuations and linear price, eta = ||xi||/||mu|| in [1, 2].
double worst_case_bound(double eta);

struct EfficiencyReport {
  std::size_t n_users = 0;
  double total_nash = 0.0;
  double total_opt = 0.0;
  double surplus_ne = 0.0;
  double surplus_opt = 0.0;
  double efficiency_ratio = 0.0;
  double demand_ratio = 0.0;
  bool tragedy = false;
  double worst_case_bound = 0.0;
};

EfficiencyReport efficiency_report(const MarketConfig& cfg, const DemandProfile& xi, const DemandProfile& mu);
/// Solves both equilibria and compares them.
EfficiencyReport analyze_efficiency(const MarketConfig& cfg, const SolverSettings& settings = {});

/// N,total_nash,total_opt,demand_ratio,surplus_nash,surplus_opt,efficiency_ratio
std::string efficiency_csv_header();
void write_efficiency_csv_row(std::ostream& os, const EfficiencyReport& r);

}  // namespace avgcost
