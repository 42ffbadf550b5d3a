#include "avgcost/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "avgcost/errors.hpp"

namespace avgcost {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonnegative(double x, const char* what) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(what) + " must be finite and >= 0");
  }
}

// Tolerance for a second difference built from three function values.
double roundoff(double a, double b, double c) {
  return 64.0 * std::numeric_limits<double>::epsilon() *
         (std::abs(a) + 2.0 * std::abs(b) + std::abs(c) + 1.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// ValuationFn

ValuationFn::ValuationFn(Family family, double alpha) : family_(family), alpha_(alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("valuation alpha must be finite and > 0");
  }
}

ValuationFn ValuationFn::linear(double alpha) { return {Family::Linear, alpha}; }
ValuationFn ValuationFn::log(double alpha) { return {Family::Log, alpha}; }

double ValuationFn::value(double q) const {
  require_nonnegative(q, "demand");
  switch (family_) {
    case Family::Linear:
      return alpha_ * q;
    case Family::Log:
      return alpha_ * std::log1p(q);
  }
  return 0.0;
}

double ValuationFn::grad(double q) const {
  require_nonnegative(q, "demand");
  switch (family_) {
    case Family::Linear:
      return alpha_;
    case Family::Log:
      return alpha_ / (1.0 + q);
  }
  return 0.0;
}

double ValuationFn::curvature(double q) const {
  require_nonnegative(q, "demand");
  switch (family_) {
    case Family::Linear:
      return 0.0;
    case Family::Log:
      return -alpha_ / ((1.0 + q) * (1.0 + q));
  }
  return 0.0;
}

double ValuationFn::inverse_grad(double marginal) const {
  if (std::isnan(marginal)) throw DomainError("marginal value is NaN");
  switch (family_) {
    case Family::Linear:
      return alpha_ > marginal ? kInf : 0.0;
    case Family::Log:
      if (marginal <= 0.0) return kInf;
      return std::max(0.0, alpha_ / marginal - 1.0);
  }
  return 0.0;
}

std::string ValuationFn::describe() const {
  std::ostringstream os;
  os << (family_ == Family::Linear ? "linear" : "log") << "(alpha=" << alpha_ << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// CostFn / PriceFn

CostFn CostFn::quadratic(double beta, double b) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("cost beta must be finite and >= 0");
  if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("cost b must be finite and >= 0");
  return {beta, b};
}

double CostFn::value(double g) const {
  require_nonnegative(g, "total demand");
  return (beta_ * g + b_) * g;
}

double CostFn::marginal(double g) const {
  require_nonnegative(g, "total demand");
  return 2.0 * beta_ * g + b_;
}

double CostFn::curvature(double g) const {
  require_nonnegative(g, "total demand");
  return 2.0 * beta_;
}

std::string CostFn::describe() const {
  std::ostringstream os;
  os << "quadratic(beta=" << beta_ << ", b=" << b_ << ")";
  return os.str();
}

// C(g)/g simplifies to beta*g + b for the quadratic family, which is also the
// right limit at g = 0.
double PriceFn::value(double g) const {
  require_nonnegative(g, "total demand");
  return cost_.beta() * g + cost_.linear_coeff();
}

double PriceFn::grad(double g) const {
  require_nonnegative(g, "total demand");
  return cost_.beta();
}

// ---------------------------------------------------------------------------
// DemandProfile / MarketConfig

DemandProfile::DemandProfile(std::vector<double> q) : q_(std::move(q)) {
  for (double x : q_) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("demand entries must be finite and >= 0");
    total_ += x;
  }
}

DemandProfile DemandProfile::zeros(std::size_t n) { return DemandProfile(std::vector<double>(n, 0.0)); }

double DemandProfile::others(std::size_t i) const {
  if (i >= q_.size()) throw UsageError("user index out of range");
  // Direct summation keeps ||q_{-i}|| exactly 0 when every other entry is 0.
  double s = 0.0;
  for (std::size_t j = 0; j < q_.size(); ++j) {
    if (j != i) s += q_[j];
  }
  return s;
}

MarketConfig::MarketConfig(std::vector<ValuationFn> valuations, CostFn cost)
    : valuations_(std::move(valuations)), cost_(cost), price_(cost) {
  if (valuations_.empty()) throw DomainError("a market needs at least one user");
}

MarketConfig MarketConfig::identical(std::size_t n, const ValuationFn& v, const CostFn& cost) {
  return MarketConfig(std::vector<ValuationFn>(n, v), cost);
}

std::vector<double> spread_alphas(std::size_t n, double lo, double hi) {
  if (n == 0) throw DomainError("spread needs at least one user");
  std::vector<double> out(n, lo);
  if (n == 1) return out;
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + static_cast<double>(i) * step;
  return out;
}

// ---------------------------------------------------------------------------
// Assumption validation

bool ValidationReport::all_passed() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const ClauseResult& c) { return c.passed; });
}

const ClauseResult* ValidationReport::find(const std::string& name) const {
  for (const auto& c : clauses) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ValidationReport validate_assumptions(const MarketConfig& cfg, const AssumptionGrid& grid) {
  if (grid.points == 0) throw UsageError("assumption grid is empty");
  if (grid.points < 100) throw UsageError("assumption grid needs at least 100 points");
  if (!(grid.g_max > 0.0) || !std::isfinite(grid.g_max)) throw UsageError("assumption grid needs g_max > 0");

  const std::size_t m = grid.points;
  const double h = grid.g_max / static_cast<double>(m);
  auto at = [&](std::size_t k) { return h * static_cast<double>(k); };  // k = 0..m

  ValidationReport report;
  auto add = [&](std::string name, bool ok, std::string detail) {
    report.clauses.push_back({std::move(name), ok, std::move(detail)});
  };

  // A.1(1): v_i(0) = 0, non-decreasing, concave.
  {
    bool zero_ok = true, mono_ok = true, concave_ok = true;
    std::string detail;
    for (std::size_t i = 0; i < cfg.n_users(); ++i) {
      const auto& v = cfg.valuation(i);
      if (v.value(0.0) != 0.0) {
        zero_ok = false;
        detail = "user " + std::to_string(i + 1) + " has v(0) != 0";
      }
      for (std::size_t k = 1; k < m; ++k) {
        const double a = v.value(at(k - 1)), b = v.value(at(k)), c = v.value(at(k + 1));
        if (c - b < -roundoff(a, b, c)) {
          mono_ok = false;
          detail = "user " + std::to_string(i + 1) + " valuation decreases near q=" + std::to_string(at(k));
        }
        if (c - 2.0 * b + a > roundoff(a, b, c)) {
          concave_ok = false;
          detail = "user " + std::to_string(i + 1) + " valuation convex near q=" + std::to_string(at(k));
        }
      }
    }
    add("valuation_zero_at_origin", zero_ok, zero_ok ? "" : detail);
    add("valuation_nondecreasing", mono_ok, mono_ok ? "" : detail);
    add("valuation_concave", concave_ok, concave_ok ? "" : detail);
  }

  // A.1(2): C strictly convex, C(g) > 0 for g > 0.
  {
    const auto& cost = cfg.cost();
    bool strict_ok = true, pos_ok = true;
    std::string detail;
    for (std::size_t k = 1; k <= m; ++k) {
      if (!(cost.value(at(k)) > 0.0)) {
        pos_ok = false;
        detail = "C(g) <= 0 at g=" + std::to_string(at(k));
      }
      if (k < m) {
        const double a = cost.value(at(k - 1)), b = cost.value(at(k)), c = cost.value(at(k + 1));
        if (!(a - 2.0 * b + c > roundoff(a, b, c))) {
          strict_ok = false;
          detail = "cost not strictly convex near g=" + std::to_string(at(k));
        }
      }
    }
    add("cost_strictly_convex", strict_ok, strict_ok ? "" : detail);
    add("cost_positive", pos_ok, pos_ok ? "" : detail);
  }

  // A.1(3): p non-decreasing.
  {
    const auto& p = cfg.price();
    bool ok = true;
    std::string detail;
    for (std::size_t k = 1; k < m; ++k) {
      const double a = p.value(at(k)), b = p.value(at(k + 1));
      if (b - a < -roundoff(a, b, 0.0)) {
        ok = false;
        detail = "price decreases near g=" + std::to_string(at(k));
      }
    }
    add("price_nondecreasing", ok, ok ? "" : detail);
  }

  // A.2: t(q_i) = q_i p(q_i + s) increasing convex in q_i; marginal payment
  // p + q_i p' increasing. Sampled for a few fixed values of ||q_{-i}||.
  {
    const auto& p = cfg.price();
    bool conv_ok = true, mono_ok = true, marg_ok = true;
    std::string detail;
    for (double s : {0.0, 0.5 * grid.g_max, grid.g_max}) {
      auto t = [&](double x) { return x * p.value(x + s); };
      auto mp = [&](double x) { return p.value(x + s) + x * p.grad(x + s); };
      for (std::size_t k = 1; k < m; ++k) {
        const double a = t(at(k - 1)), b = t(at(k)), c = t(at(k + 1));
        if (!(c - b > -roundoff(a, b, c))) {
          mono_ok = false;
          detail = "payment not increasing near q_i=" + std::to_string(at(k));
        }
        if (a - 2.0 * b + c < -roundoff(a, b, c)) {
          conv_ok = false;
          detail = "payment not convex near q_i=" + std::to_string(at(k));
        }
        if (mp(at(k + 1)) - mp(at(k)) < -roundoff(mp(at(k)), mp(at(k + 1)), 0.0)) {
          marg_ok = false;
          detail = "marginal payment decreases near q_i=" + std::to_string(at(k));
        }
      }
    }
    add("payment_increasing", mono_ok, mono_ok ? "" : detail);
    add("payment_convex", conv_ok, conv_ok ? "" : detail);
    add("marginal_payment_increasing", marg_ok, marg_ok ? "" : detail);
  }

  return report;
}

}  // namespace avgcost
