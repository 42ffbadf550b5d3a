#include "avgcost/dynamics.hpp"

#include <cmath>
#include <string>

#include "avgcost/errors.hpp"
#include "avgcost/format.hpp"

namespace avgcost {

namespace {

using State = std::vector<double>;

State velocity(const MarketConfig& cfg, bool incentivized, double budget, const State& x) {
  double g = 0.0;
  for (double xi : x) g += xi;
  const auto& p = cfg.price();
  const double price = p.value(g);
  const double slope = p.grad(g);
  const double mc = cfg.cost().marginal(g);

  State dx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double vg = cfg.valuation(i).grad(x[i]);
    const double fitness = incentivized ? vg - mc : vg - price - x[i] * slope;
    dx[i] = x[i] * (budget - x[i]) * fitness / budget;
  }
  return dx;
}

void axpy(State& out, const State& x, double a, const State& k) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * k[i];
}

void check_state(const State& x, double budget, double t) {
  for (double xi : x) {
    if (!std::isfinite(xi) || xi < 0.0 || xi > budget) {
      throw StepSizeError("replicator state left [0, budget] at t=" + std::to_string(t) +
                          "; reduce dt");
    }
  }
}

}  // namespace

Trajectory replicator_solve(const MarketConfig& cfg, const std::optional<MechanismSpec>& mech,
                            const ReplicatorSettings& s) {
  if (mech) mech->check(cfg);
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) throw DomainError("dt must be finite and > 0");
  if (!(s.t_max >= 0.0) || !std::isfinite(s.t_max)) throw DomainError("t_max must be finite and >= 0");
  if (!(s.budget > 0.0) || !std::isfinite(s.budget)) throw DomainError("budget must be finite and > 0");
  if (s.sample_every == 0) throw UsageError("sample_every must be >= 1");

  const std::size_t n = cfg.n_users();
  State x;
  if (s.initial) {
    if (s.initial->size() != n) throw UsageError("initial profile length does not match the population");
    x.assign(s.initial->values().begin(), s.initial->values().end());
  } else {
    if (!(s.initial_share > 0.0 && s.initial_share < 1.0)) throw DomainError("initial_share must lie in (0, 1)");
    x.assign(n, s.initial_share * s.budget);
  }
  check_state(x, s.budget, 0.0);

  const bool incentivized = mech.has_value();
  const auto steps = static_cast<std::size_t>(std::ceil(s.t_max / s.dt - 1e-9));

  Trajectory traj;
  traj.t.push_back(0.0);
  traj.states.emplace_back(x);

  State k1, k2, k3, k4, tmp(n);
  for (std::size_t step = 1; step <= steps; ++step) {
    const double t = static_cast<double>(step) * s.dt;
    k1 = velocity(cfg, incentivized, s.budget, x);
    axpy(tmp, x, 0.5 * s.dt, k1);
    check_state(tmp, s.budget, t);
    k2 = velocity(cfg, incentivized, s.budget, tmp);
    axpy(tmp, x, 0.5 * s.dt, k2);
    check_state(tmp, s.budget, t);
    k3 = velocity(cfg, incentivized, s.budget, tmp);
    axpy(tmp, x, s.dt, k3);
    check_state(tmp, s.budget, t);
    k4 = velocity(cfg, incentivized, s.budget, tmp);
    for (std::size_t i = 0; i < n; ++i) x[i] += s.dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    check_state(x, s.budget, t);
    if (step % s.sample_every == 0 || step == steps) {
      traj.t.push_back(t);
      traj.states.emplace_back(x);
    }
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  os << 't';
  for (std::size_t i = 1; i <= n; ++i) os << ",q_" << i;
  os << ",total\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    os << format_double(traj.t[k]);
    for (double q : traj.states[k].values()) os << ',' << format_double(q);
    os << ',' << format_double(traj.states[k].total()) << '\n';
  }
}

}  // namespace avgcost
