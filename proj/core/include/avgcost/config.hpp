#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "avgcost/market.hpp"

namespace YAML {
class Node;
}

namespace avgcost {

struct SpreadRule {
  double lo = 0.0;
  double hi = 0.0;
};

/// How per-user alphas are produced when the population size varies.
struct ValuationRule {
  ValuationFn::Family family = ValuationFn::Family::Linear;
  /// Single alpha for everyone, explicit per-user list, or spread(lo,hi).
  std::variant<double, std::vector<double>, SpreadRule> alpha = 1.0;

  std::vector<ValuationFn> build(std::size_t n) const;
};

/// A market description that can be instantiated for any population size.
struct MarketTemplate {
  std::optional<std::size_t> n_users;
  ValuationRule valuation;
  CostFn cost = CostFn::quadratic(1.0, 0.0);

  MarketConfig instantiate(std::size_t n) const;
  /// Uses n_users; throws ConfigError when the document did not set it.
  MarketConfig instantiate() const;
};

/// Parses `spread(lo, hi)`. Throws ConfigError (line 0) on malformed input.
SpreadRule parse_spread_rule(std::string_view text);

/// Document layout:
///
///   n_users: 9
///   valuation:
///     family: linear          # linear | log
///     alpha: 10               # or a list of n_users values
///     # alpha_rule: spread(10, 11)
///   cost:
///     beta: 1
///     b: 1
///
/// Unknown top-level keys are rejected unless listed in `extra_keys`.
MarketTemplate market_template_from_yaml(const YAML::Node& root,
                                         const std::vector<std::string>& extra_keys = {});
MarketTemplate parse_market_template(std::string_view text);
MarketConfig parse_market_config(std::string_view text);
MarketConfig load_market_config(const std::filesystem::path& path);

/// Reads a whole file; throws ConfigError when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace avgcost
