#include "avgcost/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "avgcost/errors.hpp"

namespace avgcost {

namespace {

std::size_t line_of(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.line >= 0 ? static_cast<std::size_t>(mark.line) + 1 : 0;
}

YAML::Node require(const YAML::Node& parent, const char* key) {
  YAML::Node child = parent[key];
  if (!child) throw ConfigError(std::string("missing required field '") + key + "'", line_of(parent));
  return child;
}

std::string as_string(const YAML::Node& node, const char* what) {
  if (!node.IsScalar()) throw ConfigError(std::string("field '") + what + "' must be a string", line_of(node));
  return node.Scalar();
}

double as_double(const YAML::Node& node, const char* what) {
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError(std::string("field '") + what + "' must be a number", line_of(node));
  }
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(std::string_view s) {
  const std::string t = trim(s);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("expected a number, got '" + t + "'", 0);
  }
  return out;
}

ValuationRule parse_valuation(const YAML::Node& node) {
  if (!node.IsMap()) throw ConfigError("'valuation' must be a mapping", line_of(node));
  ValuationRule rule;
  const YAML::Node family = require(node, "family");
  const auto name = as_string(family, "family");
  if (name == "linear") {
    rule.family = ValuationFn::Family::Linear;
  } else if (name == "log") {
    rule.family = ValuationFn::Family::Log;
  } else {
    throw ConfigError("unknown valuation family '" + name + "' (expected linear or log)", line_of(family));
  }

  const YAML::Node alpha = node["alpha"];
  const YAML::Node alpha_rule = node["alpha_rule"];
  if (alpha && alpha_rule) throw ConfigError("give either 'alpha' or 'alpha_rule', not both", line_of(alpha_rule));
  if (alpha) {
    if (alpha.IsSequence()) {
      std::vector<double> values;
      for (const auto& a : alpha) values.push_back(as_double(a, "alpha"));
      rule.alpha = std::move(values);
    } else {
      rule.alpha = as_double(alpha, "alpha");
    }
  } else if (alpha_rule) {
    try {
      rule.alpha = parse_spread_rule(as_string(alpha_rule, "alpha_rule"));
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), line_of(alpha_rule));
    }
  } else {
    throw ConfigError("valuation needs 'alpha' or 'alpha_rule'", line_of(node));
  }
  for (const auto& key : node) {
    const auto k = key.first.as<std::string>();
    if (k != "family" && k != "alpha" && k != "alpha_rule") {
      throw ConfigError("unknown valuation field '" + k + "'", line_of(key.first));
    }
  }
  return rule;
}

}  // namespace

std::vector<ValuationFn> ValuationRule::build(std::size_t n) const {
  std::vector<double> alphas;
  if (const auto* a = std::get_if<double>(&alpha)) {
    alphas.assign(n, *a);
  } else if (const auto* list = std::get_if<std::vector<double>>(&alpha)) {
    if (list->size() != n) {
      throw ConfigError("alpha list has " + std::to_string(list->size()) + " entries but n_users is " +
                            std::to_string(n),
                        0);
    }
    alphas = *list;
  } else {
    const auto& s = std::get<SpreadRule>(alpha);
    alphas = spread_alphas(n, s.lo, s.hi);
  }
  std::vector<ValuationFn> out;
  out.reserve(n);
  for (double a : alphas) {
    out.push_back(family == ValuationFn::Family::Linear ? ValuationFn::linear(a) : ValuationFn::log(a));
  }
  return out;
}

MarketConfig MarketTemplate::instantiate(std::size_t n) const {
  if (n == 0) throw ConfigError("n_users must be >= 1", 0);
  return MarketConfig(valuation.build(n), cost);
}

MarketConfig MarketTemplate::instantiate() const {
  if (!n_users) throw ConfigError("missing required field 'n_users'", 0);
  return instantiate(*n_users);
}

SpreadRule parse_spread_rule(std::string_view text) {
  const std::string t = trim(text);
  constexpr std::string_view head = "spread(";
  if (t.size() < head.size() + 1 || t.compare(0, head.size(), head) != 0 || t.back() != ')') {
    throw ConfigError("alpha_rule must look like spread(lo,hi), got '" + t + "'", 0);
  }
  const std::string_view inner = std::string_view(t).substr(head.size(), t.size() - head.size() - 1);
  const auto comma = inner.find(',');
  if (comma == std::string_view::npos || inner.find(',', comma + 1) != std::string_view::npos) {
    throw ConfigError("spread(lo,hi) takes exactly two arguments", 0);
  }
  return {parse_number(inner.substr(0, comma)), parse_number(inner.substr(comma + 1))};
}

MarketTemplate market_template_from_yaml(const YAML::Node& root, const std::vector<std::string>& extra_keys) {
  if (!root.IsMap()) throw ConfigError("configuration must be a mapping", line_of(root));

  std::set<std::string> allowed{"n_users", "valuation", "cost"};
  allowed.insert(extra_keys.begin(), extra_keys.end());
  for (const auto& kv : root) {
    const auto k = kv.first.as<std::string>();
    if (!allowed.contains(k)) throw ConfigError("unknown field '" + k + "'", line_of(kv.first));
  }

  MarketTemplate tmpl;
  if (const YAML::Node n = root["n_users"]) {
    long long value = 0;
    try {
      value = n.as<long long>();
    } catch (const YAML::Exception&) {
      throw ConfigError("'n_users' must be an integer", line_of(n));
    }
    if (value < 1) throw ConfigError("'n_users' must be >= 1", line_of(n));
    tmpl.n_users = static_cast<std::size_t>(value);
  }

  tmpl.valuation = parse_valuation(require(root, "valuation"));

  const YAML::Node cost = require(root, "cost");
  if (!cost.IsMap()) throw ConfigError("'cost' must be a mapping", line_of(cost));
  const double beta = as_double(require(cost, "beta"), "beta");
  const double b = as_double(require(cost, "b"), "b");
  try {
    tmpl.cost = CostFn::quadratic(beta, b);
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), line_of(cost));
  }

  // Validate alpha values eagerly so errors carry a line number.
  const YAML::Node valuation = root["valuation"];
  try {
    if (tmpl.n_users) {
      tmpl.valuation.build(*tmpl.n_users);
    } else if (!std::holds_alternative<std::vector<double>>(tmpl.valuation.alpha)) {
      tmpl.valuation.build(2);
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), line_of(valuation));
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), line_of(valuation));
  }
  return tmpl;
}

MarketTemplate parse_market_template(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line >= 0 ? static_cast<std::size_t>(e.mark.line) + 1 : 0);
  }
  return market_template_from_yaml(root);
}

MarketConfig parse_market_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line >= 0 ? static_cast<std::size_t>(e.mark.line) + 1 : 0);
  }
  const MarketTemplate tmpl = market_template_from_yaml(root);
  if (!tmpl.n_users) throw ConfigError("missing required field 'n_users'", line_of(root));
  return tmpl.instantiate();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MarketConfig load_market_config(const std::filesystem::path& path) {
  return parse_market_config(read_text_file(path));
}

}  // namespace avgcost
