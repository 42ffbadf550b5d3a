#include "avgcost/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "avgcost/errors.hpp"
#include "avgcost/format.hpp"

namespace avgcost {

double customer_surplus(const MarketConfig& cfg, const DemandProfile& q) {
  if (q.size() != cfg.n_users()) throw UsageError("profile length does not match the population");
  double value = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) value += cfg.valuation(i).value(q[i]);
  return value - cfg.cost().value(q.total());
}

double efficiency_ratio(const MarketConfig& cfg, const DemandProfile& xi, const DemandProfile& mu) {
  const double opt = customer_surplus(cfg, mu);
  if (!(opt > 0.0)) {
    throw DegenerateInstanceError("optimal customer surplus is not positive; the efficiency ratio is undefined");
  }
  return customer_surplus(cfg, xi) / opt;
}

double demand_ratio(const DemandProfile& xi, const DemandProfile& mu) {
  if (!(mu.total() > 0.0)) throw DegenerateInstanceError("optimal total demand is zero");
  return xi.total() / mu.total();
}

bool tragedy_check(const DemandProfile& xi, const DemandProfile& mu) {
  if (xi.size() != mu.size()) throw UsageError("profiles have different lengths");
  constexpr double tol = 1e-9;
  bool strict = false;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    if (xi[i] < mu[i] - tol) return false;
    if (xi[i] > mu[i] + tol) strict = true;
  }
  return strict;
}

double worst_case_bound(double eta) {
  if (!(eta >= 1.0 && eta <= 2.0)) throw DomainError("eta must lie in [1, 2]");
  return 2.0 - eta;
}

EfficiencyReport efficiency_report(const MarketConfig& cfg, const DemandProfile& xi, const DemandProfile& mu) {
  EfficiencyReport r;
  r.n_users = cfg.n_users();
  r.total_nash = xi.total();
  r.total_opt = mu.total();
  r.surplus_ne = customer_surplus(cfg, xi);
  r.surplus_opt = customer_surplus(cfg, mu);
  r.efficiency_ratio = efficiency_ratio(cfg, xi, mu);
  r.demand_ratio = demand_ratio(xi, mu);
  r.tragedy = tragedy_check(xi, mu);
  // Rounding can push the ratio a hair outside [1, 2].
  r.worst_case_bound = worst_case_bound(std::clamp(r.demand_ratio, 1.0, 2.0));
  return r;
}

EfficiencyReport analyze_efficiency(const MarketConfig& cfg, const SolverSettings& settings) {
  const auto nash = solve_nash(cfg, settings);
  const auto opt = solve_optimal(cfg, settings);
  if (!nash.converged || !opt.converged) throw ConvergenceError("equilibrium solver did not converge");
  return efficiency_report(cfg, nash.profile, opt.profile);
}

std::string efficiency_csv_header() {
  return "N,total_nash,total_opt,demand_ratio,surplus_nash,surplus_opt,efficiency_ratio";
}

void write_efficiency_csv_row(std::ostream& os, const EfficiencyReport& r) {
  os << r.n_users << ',' << format_double(r.total_nash) << ',' << format_double(r.total_opt) << ','
     << format_double(r.demand_ratio) << ',' << format_double(r.surplus_ne) << ',' << format_double(r.surplus_opt)
     << ',' << format_double(r.efficiency_ratio) << '\n';
}

}  // namespace avgcost
