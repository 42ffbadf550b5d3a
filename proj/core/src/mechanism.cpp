#include "avgcost/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "avgcost/equilibrium.hpp"
#include "avgcost/errors.hpp"

namespace avgcost {

namespace {

void check_index(const MarketConfig& cfg, const DemandProfile& q, std::size_t i) {
  if (q.size() != cfg.n_users()) throw UsageError("profile length does not match the population");
  if (i >= cfg.n_users()) throw UsageError("user index out of range");
}

}  // namespace

void MechanismSpec::check(const MarketConfig& cfg) const {
  if (kind == Kind::Surplus && cfg.n_users() < 2) {
    throw DomainError("the surplus mechanism needs at least two users (h uses N/(N-1))");
  }
}

double MechanismSpec::h(const MarketConfig& cfg, double others_total) const {
  check(cfg);
  switch (kind) {
    case Kind::Deficit:
      return cfg.price().value(others_total);
    case Kind::Surplus: {
      const double n = static_cast<double>(cfg.n_users());
      return cfg.price().value(n * others_total / (n - 1.0));
    }
  }
  return 0.0;
}

std::string_view to_string(MechanismSpec::Kind kind) {
  return kind == MechanismSpec::Kind::Deficit ? "deficit" : "surplus";
}

std::optional<MechanismSpec> parse_mechanism(std::string_view name) {
  if (name == "deficit") return MechanismSpec::deficit();
  if (name == "surplus") return MechanismSpec::surplus();
  return std::nullopt;
}

double baseline_surplus(const MarketConfig& cfg, const DemandProfile& q, std::size_t i) {
  check_index(cfg, q, i);
  return cfg.valuation(i).value(q[i]) - q[i] * cfg.price().value(q.total());
}

double strategic_marginal(const MarketConfig& cfg, const DemandProfile& q, std::size_t i) {
  check_index(cfg, q, i);
  const double g = q.total();
  return cfg.valuation(i).grad(q[i]) - cfg.price().value(g) - q[i] * cfg.price().grad(g);
}

double incentivized_marginal(const MarketConfig& cfg, const DemandProfile& q, std::size_t i) {
  check_index(cfg, q, i);
  return cfg.valuation(i).grad(q[i]) - cfg.cost().marginal(q.total());
}

double incentive(const MechanismSpec& mech, const MarketConfig& cfg, const DemandProfile& q, std::size_t i) {
  check_index(cfg, q, i);
  mech.check(cfg);
  const double others = q.others(i);
  return others * (mech.h(cfg, others) - cfg.price().value(q.total()));
}

double payment(const std::optional<MechanismSpec>& mech, const MarketConfig& cfg, const DemandProfile& q,
               std::size_t i) {
  check_index(cfg, q, i);
  const double base = q[i] * cfg.price().value(q.total());
  return mech ? base + incentive(*mech, cfg, q, i) : base;
}

double incentivized_surplus(const MechanismSpec& mech, const MarketConfig& cfg, const DemandProfile& q,
                            std::size_t i) {
  check_index(cfg, q, i);
  mech.check(cfg);
  const double g = q.total();
  const double others = q.others(i);
  return cfg.valuation(i).value(q[i]) - g * cfg.price().value(g) + others * mech.h(cfg, others);
}

BudgetReport budget_report(const MechanismSpec& mech, const MarketConfig& cfg, const DemandProfile& q) {
  mech.check(cfg);
  if (q.size() != cfg.n_users()) throw UsageError("profile length does not match the population");
  BudgetReport r;
  for (std::size_t i = 0; i < q.size(); ++i) {
    r.total_incentive += incentive(mech, cfg, q, i);
    r.total_payment += payment(mech, cfg, q, i);
  }
  r.cost = cfg.cost().value(q.total());
  return r;
}

ImpossibilityWitness impossibility_demo(const MarketConfig& cfg, double theta) {
  if (!std::isfinite(theta) || theta < 0.0) throw DomainError("theta must be finite and >= 0");
  if (cfg.n_users() < 2) throw DomainError("the budget-balance argument needs at least two users");

  const auto& p = cfg.price();
  const double n = static_cast<double>(cfg.n_users());
  ImpossibilityWitness w;
  w.n_users = cfg.n_users();
  w.theta = theta;
  w.uniform_point = theta / n;
  w.uniform_required_h = p.value(theta / (n - 1.0));
  w.one_idle_point = theta / (n - 1.0);
  w.one_idle_required_h = p.value(theta / (n - 1.0));
  w.rescaled_required_h = p.value(theta / n);
  w.gap = w.uniform_required_h - w.rescaled_required_h;
  return w;
}

IndividualRationalityReport individual_rationality_check(const MechanismSpec& mech, const MarketConfig& cfg,
                                                         const SolverSettings& settings) {
  mech.check(cfg);
  const EquilibriumReport opt = solve_optimal(cfg, settings);
  if (!opt.converged) throw ConvergenceError("optimal equilibrium did not converge");

  IndividualRationalityReport r;
  r.optimum = opt.profile;
  r.passes = true;
  r.sufficient_condition_holds = true;
  const double tol = 1e-9;
  for (std::size_t i = 0; i < cfg.n_users(); ++i) {
    const double w = incentivized_surplus(mech, cfg, opt.profile, i);
    const double others = opt.profile.others(i);
    const double margin = mech.h(cfg, others) - cfg.price().value(others);
    r.w_at_optimum.push_back(w);
    r.sufficient_margin.push_back(margin);
    r.passes = r.passes && w >= -tol;
    r.sufficient_condition_holds = r.sufficient_condition_holds && margin >= -tol;
  }
  return r;
}

IndividualRationalityReport individual_rationality_check(const MechanismSpec& mech, const MarketConfig& cfg) {
  return individual_rationality_check(mech, cfg, SolverSettings{});
}

}  // namespace avgcost
