#include "avgcost/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "avgcost/errors.hpp"

namespace avgcost {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_strictly_convex_cost(const MarketConfig& cfg) {
  if (!(cfg.cost().beta() > 0.0)) {
    throw DomainError("equilibrium solvers need a strictly convex cost (beta > 0)");
  }
}

void check_settings(const SolverSettings& s) {
  if (!(s.tol_root > 0.0) || !(s.tol_foc > 0.0) || !(s.bracket_start > 0.0) || s.max_outer_iters <= 0 ||
      s.max_bracket_doublings < 0 || !(s.damping > 0.0 && s.damping <= 1.0) || s.max_best_response_sweeps <= 0) {
    throw UsageError("invalid solver settings");
  }
}

// Root of a non-increasing scalar map on [0, inf) with phi(0) > 0. Returns
// nullopt when phi stays positive over the whole grown bracket.
std::optional<double> decreasing_root(const std::function<double(double)>& phi, double tol, int max_doublings) {
  double lo = 0.0;
  double hi = 1.0;
  int grown = 0;
  while (phi(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++grown > max_doublings) return std::nullopt;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (phi(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct OuterResult {
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;

  double total() const { return 0.5 * (lo + hi); }
};

// Bisection on the total demand G for excess(G) = sum_i d_i(G) - G, which is
// non-increasing. excess may be +inf.
OuterResult solve_total(const std::function<double(double)>& excess, const SolverSettings& s) {
  OuterResult r;
  if (!(excess(0.0) > 0.0)) return r;

  r.hi = s.bracket_start;
  int grown = 0;
  while (excess(r.hi) > 0.0) {
    r.lo = r.hi;
    r.hi *= 2.0;
    if (++grown > s.max_bracket_doublings) {
      throw ConvergenceError("no sign change of the aggregate demand map within the outer bracket");
    }
  }
  while (r.hi - r.lo > s.tol_root) {
    const double mid = 0.5 * (r.lo + r.hi);
    if (mid <= r.lo || mid >= r.hi) break;
    if (++r.iterations > s.max_outer_iters) {
      throw ConvergenceError("outer bisection exceeded " + std::to_string(s.max_outer_iters) + " iterations");
    }
    if (excess(mid) > 0.0) {
      r.lo = mid;
    } else {
      r.hi = mid;
    }
  }
  return r;
}

// Users respond to a scalar marginal signal s(G) with d_i = (v_i')^{-1}(s(G)).
// Linear users with alpha above the signal at the lower bracket end are tied
// at the margin in the limit and split the leftover total equally.
DemandProfile aggregate_response(const MarketConfig& cfg, const std::function<double(double)>& signal,
                                 const SolverSettings& s, int& iterations) {
  const std::size_t n = cfg.n_users();
  auto excess = [&](double g) {
    const double c = signal(g);
    double total = 0.0;
    for (const auto& v : cfg.valuations()) total += v.inverse_grad(c);
    return total - g;
  };
  const OuterResult outer = solve_total(excess, s);
  iterations = outer.iterations;
  const double g = outer.total();

  std::vector<double> q(n, 0.0);
  if (g == 0.0) return DemandProfile(std::move(q));

  const double signal_lo = signal(outer.lo);
  const double signal_g = signal(g);
  std::vector<std::size_t> marginal;
  double assigned = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = cfg.valuation(i);
    if (v.family() == ValuationFn::Family::Linear) {
      if (v.alpha() > signal_lo) marginal.push_back(i);
      continue;
    }
    q[i] = v.inverse_grad(signal_g);
    assigned += q[i];
  }
  if (!marginal.empty()) {
    const double share = std::max(0.0, g - assigned) / static_cast<double>(marginal.size());
    for (std::size_t i : marginal) q[i] = share;
  }
  return DemandProfile(std::move(q));
}

double price_taker_residual(const MarketConfig& cfg, const DemandProfile& q, double price) {
  double r = 0.0;
  for (std::size_t i = 0; i < cfg.n_users(); ++i) {
    const auto& v = cfg.valuation(i);
    r = std::max(r, q[i] > 0.0 ? std::abs(v.grad(q[i]) - price) : std::max(0.0, v.grad(0.0) - price));
  }
  return r;
}

// Strategic demand of one user when the total is pinned at g:
// v'(x) = p(g) + x p'(g), or 0 below the activity threshold.
double nash_demand_at_total(const ValuationFn& v, const PriceFn& p, double g, const SolverSettings& s) {
  const double price = p.value(g);
  const double slope = p.grad(g);
  if (!(v.grad(0.0) > price)) return 0.0;
  const auto root = decreasing_root([&](double x) { return v.grad(x) - price - x * slope; }, s.tol_root * 1e-2,
                                    s.max_bracket_doublings);
  if (!root) throw ConvergenceError("per-user Nash demand is unbounded");
  return *root;
}

// Best response of user i to the others' total.
double best_response(const MarketConfig& cfg, bool incentivized, std::size_t i, double others,
                     const SolverSettings& s) {
  const auto& v = cfg.valuation(i);
  const auto& p = cfg.price();
  const auto& c = cfg.cost();
  std::function<double(double)> phi;
  if (incentivized) {
    phi = [&](double x) { return v.grad(x) - c.marginal(x + others); };
  } else {
    phi = [&](double x) { return v.grad(x) - p.value(x + others) - x * p.grad(x + others); };
  }
  if (!(phi(0.0) > 0.0)) return 0.0;
  const auto root = decreasing_root(phi, s.tol_root * 1e-2, s.max_bracket_doublings);
  if (!root) throw ConvergenceError("best response is unbounded");
  return *root;
}

}  // namespace

std::string_view to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::PriceTaker:
      return "price-taker";
    case EquilibriumKind::AverageCostPriceTaker:
      return "average-cost-price-taker";
    case EquilibriumKind::Optimal:
      return "optimal";
    case EquilibriumKind::Nash:
      return "nash";
    case EquilibriumKind::NashWithIncentives:
      return "nash-incentivized";
  }
  return "unknown";
}

double optimal_foc_residual(const MarketConfig& cfg, const DemandProfile& q) {
  if (q.size() != cfg.n_users()) throw UsageError("profile length does not match the population");
  const double mc = cfg.cost().marginal(q.total());
  double r = 0.0;
  for (std::size_t i = 0; i < cfg.n_users(); ++i) {
    const auto& v = cfg.valuation(i);
    r = std::max(r, q[i] > 0.0 ? std::abs(v.grad(q[i]) - mc) : std::max(0.0, v.grad(0.0) - mc));
  }
  return r;
}

double nash_foc_residual(const MarketConfig& cfg, const DemandProfile& q) {
  if (q.size() != cfg.n_users()) throw UsageError("profile length does not match the population");
  const double g = q.total();
  const double price = cfg.price().value(g);
  const double slope = cfg.price().grad(g);
  double r = 0.0;
  for (std::size_t i = 0; i < cfg.n_users(); ++i) {
    const auto& v = cfg.valuation(i);
    r = std::max(r, q[i] > 0.0 ? std::abs(v.grad(q[i]) - price - q[i] * slope)
                               : std::max(0.0, v.grad(0.0) - price));
  }
  return r;
}

EquilibriumReport solve_price_taker(const MarketConfig& cfg, double price, const SolverSettings& settings) {
  check_settings(settings);
  if (!std::isfinite(price)) throw DomainError("price must be finite");
  if (price < 0.0) throw DomainError("price must be >= 0");

  std::vector<double> q(cfg.n_users(), 0.0);
  for (std::size_t i = 0; i < cfg.n_users(); ++i) {
    const auto& v = cfg.valuation(i);
    if (!(v.grad(0.0) > price)) continue;
    const auto root = decreasing_root([&](double x) { return v.grad(x) - price; }, settings.tol_root * 1e-2,
                                      settings.max_bracket_doublings);
    if (!root) {
      throw ConvergenceError("user " + std::to_string(i + 1) + " (" + v.describe() +
                             ") has no finite demand at price " + std::to_string(price));
    }
    q[i] = *root;
  }

  EquilibriumReport rep;
  rep.profile = DemandProfile(std::move(q));
  rep.kind = EquilibriumKind::PriceTaker;
  rep.price = price;
  rep.foc_residual = price_taker_residual(cfg, rep.profile, price);
  rep.iterations = 1;
  rep.converged = rep.foc_residual <= settings.tol_foc;
  return rep;
}

EquilibriumReport solve_average_cost_price_taker(const MarketConfig& cfg, const SolverSettings& settings) {
  check_settings(settings);
  require_strictly_convex_cost(cfg);
  const auto& p = cfg.price();
  EquilibriumReport rep;
  rep.profile = aggregate_response(cfg, [&](double g) { return p.value(g); }, settings, rep.iterations);
  rep.kind = EquilibriumKind::AverageCostPriceTaker;
  rep.price = p.value(rep.profile.total());
  rep.foc_residual = price_taker_residual(cfg, rep.profile, rep.price);
  rep.converged = rep.foc_residual <= settings.tol_foc;
  return rep;
}

EquilibriumReport solve_optimal(const MarketConfig& cfg, const SolverSettings& settings) {
  check_settings(settings);
  require_strictly_convex_cost(cfg);
  const auto& c = cfg.cost();
  EquilibriumReport rep;
  rep.profile = aggregate_response(cfg, [&](double g) { return c.marginal(g); }, settings, rep.iterations);
  rep.kind = EquilibriumKind::Optimal;
  rep.price = cfg.price().value(rep.profile.total());
  rep.foc_residual = optimal_foc_residual(cfg, rep.profile);
  rep.converged = rep.foc_residual <= settings.tol_foc;
  return rep;
}

EquilibriumReport solve_nash(const MarketConfig& cfg, const SolverSettings& settings) {
  check_settings(settings);
  require_strictly_convex_cost(cfg);
  const auto& p = cfg.price();
  auto excess = [&](double g) {
    double total = 0.0;
    for (const auto& v : cfg.valuations()) total += nash_demand_at_total(v, p, g, settings);
    return total - g;
  };
  const OuterResult outer = solve_total(excess, settings);
  const double g = outer.total();

  std::vector<double> q(cfg.n_users(), 0.0);
  if (g > 0.0) {
    for (std::size_t i = 0; i < cfg.n_users(); ++i) q[i] = nash_demand_at_total(cfg.valuation(i), p, g, settings);
  }

  EquilibriumReport rep;
  rep.profile = DemandProfile(std::move(q));
  rep.kind = EquilibriumKind::Nash;
  rep.price = p.value(rep.profile.total());
  rep.foc_residual = nash_foc_residual(cfg, rep.profile);
  rep.iterations = outer.iterations;
  rep.converged = rep.foc_residual <= settings.tol_foc;
  return rep;
}

EquilibriumReport best_response_equilibrium(const MarketConfig& cfg, const std::optional<MechanismSpec>& mech,
                                            const DemandProfile& start, const SolverSettings& settings) {
  check_settings(settings);
  require_strictly_convex_cost(cfg);
  if (mech) mech->check(cfg);
  if (start.size() != cfg.n_users()) throw UsageError("start profile length does not match the population");

  const bool incentivized = mech.has_value();
  const double d = settings.damping;
  std::vector<double> q(start.values().begin(), start.values().end());
  double total = start.total();

  int sweep = 0;
  for (;;) {
    if (++sweep > settings.max_best_response_sweeps) {
      throw ConvergenceError("best-response iteration did not settle within " +
                             std::to_string(settings.max_best_response_sweeps) + " sweeps");
    }
    double max_move = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double others = std::max(0.0, total - q[i]);
      const double br = best_response(cfg, incentivized, i, others, settings);
      const double next = (1.0 - d) * q[i] + d * br;
      max_move = std::max(max_move, std::abs(br - q[i]));
      total += next - q[i];
      q[i] = next;
    }
    total = 0.0;
    for (double x : q) total += x;
    if (!std::isfinite(total)) throw ConvergenceError("best-response iteration diverged");
    if (max_move <= 10.0 * settings.tol_root * (1.0 + total)) {
      const DemandProfile current(q);
      const double residual =
          incentivized ? optimal_foc_residual(cfg, current) : nash_foc_residual(cfg, current);
      if (residual <= 0.1 * settings.tol_foc) break;
    }
  }

  EquilibriumReport rep;
  rep.profile = DemandProfile(std::move(q));
  rep.kind = incentivized ? EquilibriumKind::NashWithIncentives : EquilibriumKind::Nash;
  rep.price = cfg.price().value(rep.profile.total());
  rep.foc_residual = incentivized ? optimal_foc_residual(cfg, rep.profile) : nash_foc_residual(cfg, rep.profile);
  rep.iterations = sweep;
  rep.converged = rep.foc_residual <= settings.tol_foc;
  return rep;
}

EquilibriumReport solve_nash_with_incentives(const MarketConfig& cfg, const MechanismSpec& mech,
                                             const SolverSettings& settings) {
  mech.check(cfg);
  return best_response_equilibrium(cfg, mech, DemandProfile::zeros(cfg.n_users()), settings);
}

}  // namespace avgcost
