#include "avgcost/cli/sweep.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "avgcost/errors.hpp"
#include "avgcost/format.hpp"
#include "avgcost/mechanism.hpp"
#include "avgcost/metrics.hpp"

namespace avgcost::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t line_of(const YAML::Node& node) {
  return node.Mark().line >= 0 ? static_cast<std::size_t>(node.Mark().line) + 1 : 0;
}

std::size_t parse_count(std::string_view s, std::size_t line) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("expected a population size, got '" + std::string(s) + "'", line);
  }
  return out;
}

std::vector<std::size_t> parse_n_values(const YAML::Node& node) {
  std::vector<std::size_t> out;
  if (node.IsSequence()) {
    for (const auto& item : node) {
      if (!item.IsScalar()) throw ConfigError("n_values entries must be integers", line_of(item));
      out.push_back(parse_count(item.Scalar(), line_of(item)));
    }
  } else if (node.IsScalar()) {
    const std::string s = node.Scalar();
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_count(s, line_of(node)));
    } else {
      const std::size_t lo = parse_count(std::string_view(s).substr(0, dots), line_of(node));
      const std::size_t hi = parse_count(std::string_view(s).substr(dots + 2), line_of(node));
      if (hi < lo) throw ConfigError("empty range '" + s + "'", line_of(node));
      for (std::size_t n = lo; n <= hi; ++n) out.push_back(n);
    }
  } else {
    throw ConfigError("n_values must be a list or a range 'lo..hi'", line_of(node));
  }
  if (out.empty()) throw ConfigError("n_values is empty", line_of(node));
  for (std::size_t n : out) {
    if (n < 1) throw ConfigError("population sizes must be >= 1", line_of(node));
  }
  return out;
}

double sum_incentives(const MechanismSpec& mech, const MarketConfig& cfg, const DemandProfile& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += incentive(mech, cfg, q, i);
  return s;
}

double sum_incentivized_surplus(const MechanismSpec& mech, const MarketConfig& cfg, const DemandProfile& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += incentivized_surplus(mech, cfg, q, i);
  return s;
}

SweepRow evaluate_point(const SweepSpec& spec, std::size_t n, const SolverSettings& settings) {
  SweepRow row;
  row.n = n;
  try {
    const MarketConfig cfg = spec.market.instantiate(n);
    const auto nash = solve_nash(cfg, settings);
    const auto opt = solve_optimal(cfg, settings);
    if (!nash.converged || !opt.converged) throw ConvergenceError("equilibrium residual above tolerance");
    const EfficiencyReport eff = efficiency_report(cfg, nash.profile, opt.profile);
    row.total_nash = eff.total_nash;
    row.total_opt = eff.total_opt;
    row.demand_ratio = eff.demand_ratio;
    row.surplus_nash = eff.surplus_ne;
    row.surplus_opt = eff.surplus_opt;
    row.efficiency_ratio = eff.efficiency_ratio;

    row.surplus_deficit = row.sum_incentives_deficit = kNaN;
    row.surplus_surplus_mech = row.sum_incentives_surplus = kNaN;
    if (spec.include_deficit) {
      const auto mech = MechanismSpec::deficit();
      const auto eq = solve_nash_with_incentives(cfg, mech, settings);
      if (!eq.converged) throw ConvergenceError("incentivized equilibrium (deficit) residual above tolerance");
      row.surplus_deficit = sum_incentivized_surplus(mech, cfg, eq.profile);
      row.sum_incentives_deficit = sum_incentives(mech, cfg, eq.profile);
    }
    if (spec.include_surplus) {
      const auto mech = MechanismSpec::surplus();
      const auto eq = solve_nash_with_incentives(cfg, mech, settings);
      if (!eq.converged) throw ConvergenceError("incentivized equilibrium (surplus) residual above tolerance");
      row.surplus_surplus_mech = sum_incentivized_surplus(mech, cfg, eq.profile);
      row.sum_incentives_surplus = sum_incentives(mech, cfg, eq.profile);
    }
  } catch (const std::exception& e) {
    SweepRow failed;
    failed.n = n;
    failed.converged = false;
    failed.failure = e.what();
    failed.total_nash = failed.total_opt = failed.demand_ratio = kNaN;
    failed.surplus_nash = failed.surplus_opt = failed.efficiency_ratio = kNaN;
    failed.surplus_deficit = failed.surplus_surplus_mech = kNaN;
    failed.sum_incentives_deficit = failed.sum_incentives_surplus = kNaN;
    return failed;
  }
  return row;
}

}  // namespace

SweepSpec parse_sweep_spec(std::string_view text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line >= 0 ? static_cast<std::size_t>(e.mark.line) + 1 : 0);
  }
  if (!root.IsMap()) throw ConfigError("sweep spec must be a mapping", line_of(root));
  for (const auto& kv : root) {
    const auto k = kv.first.Scalar();
    if (k != "n_values" && k != "mechanisms" && k != "output_dir" && k != "market") {
      throw ConfigError("unknown field '" + k + "'", line_of(kv.first));
    }
  }

  SweepSpec spec;
  const YAML::Node n_values = root["n_values"];
  if (!n_values) throw ConfigError("missing required field 'n_values'", line_of(root));
  spec.n_values = parse_n_values(n_values);

  const YAML::Node market = root["market"];
  if (!market) throw ConfigError("missing required field 'market'", line_of(root));
  spec.market = market_template_from_yaml(market);

  if (const YAML::Node mechs = root["mechanisms"]) {
    if (!mechs.IsSequence()) throw ConfigError("'mechanisms' must be a list", line_of(mechs));
    spec.include_none = false;
    for (const auto& m : mechs) {
      const std::string name = m.IsScalar() ? m.Scalar() : std::string();
      if (name == "none") {
        spec.include_none = true;
      } else if (name == "deficit") {
        spec.include_deficit = true;
      } else if (name == "surplus") {
        spec.include_surplus = true;
      } else {
        throw ConfigError("unknown mechanism '" + name + "' (expected none, deficit or surplus)", line_of(m));
      }
    }
    if (!spec.include_none && !spec.include_deficit && !spec.include_surplus) {
      throw ConfigError("'mechanisms' is empty", line_of(mechs));
    }
  }
  if (spec.include_surplus) {
    for (std::size_t n : spec.n_values) {
      if (n < 2) throw ConfigError("the surplus mechanism needs every population size >= 2", line_of(n_values));
    }
  }

  if (const YAML::Node out = root["output_dir"]) {
    if (!out.IsScalar()) throw ConfigError("'output_dir' must be a path", line_of(out));
    spec.output_dir = out.Scalar();
  }
  if (spec.output_dir.is_relative()) spec.output_dir = (base_dir / spec.output_dir).lexically_normal();
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  return parse_sweep_spec(read_text_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::size_t jobs, const SolverSettings& settings) {
  const std::size_t count = spec.n_values.size();
  std::vector<SweepRow> rows(count);
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
  if (jobs == 1) {
    for (std::size_t k = 0; k < count; ++k) rows[k] = evaluate_point(spec, spec.n_values[k], settings);
    return rows;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) rows[k] = evaluate_point(spec, spec.n_values[k], settings);
    });
  }
  for (auto& t : workers) t.join();
  return rows;
}

std::string fig1_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "N,demand_ratio,efficiency_ratio\n";
  for (const auto& r : rows) {
    os << r.n << ',' << format_double(r.demand_ratio) << ',' << format_double(r.efficiency_ratio) << '\n';
  }
  return os.str();
}

std::string fig3_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "N,surplus_no_mech,surplus_deficit,surplus_surplus_mech,sum_incentives_deficit,sum_incentives_surplus\n";
  for (const auto& r : rows) {
    os << r.n << ',' << format_double(r.surplus_nash) << ','
       << format_double(spec.include_deficit ? r.surplus_deficit : kNaN) << ','
       << format_double(spec.include_surplus ? r.surplus_surplus_mech : kNaN) << ','
       << format_double(spec.include_deficit ? r.sum_incentives_deficit : kNaN) << ','
       << format_double(spec.include_surplus ? r.sum_incentives_surplus : kNaN) << '\n';
  }
  return os.str();
}

std::string efficiency_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << efficiency_csv_header() << '\n';
  for (const auto& r : rows) {
    EfficiencyReport e;
    e.n_users = r.n;
    e.total_nash = r.total_nash;
    e.total_opt = r.total_opt;
    e.demand_ratio = r.demand_ratio;
    e.surplus_ne = r.surplus_nash;
    e.surplus_opt = r.surplus_opt;
    e.efficiency_ratio = r.efficiency_ratio;
    write_efficiency_csv_row(os, e);
  }
  return os.str();
}

std::string failures_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "N,converged,message\n";
  for (const auto& r : rows) {
    if (r.converged) continue;
    std::string msg = r.failure;
    std::replace(msg.begin(), msg.end(), '"', '\'');
    os << r.n << ",false,\"" << msg << "\"\n";
  }
  return os.str();
}

std::string fig1_gnuplot() {
  return "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set xlabel 'N'\n"
         "set multiplot layout 2,1\n"
         "set ylabel 'demand ratio'\n"
         "plot 'fig1.csv' using 1:2 with linespoints\n"
         "set ylabel 'efficiency ratio'\n"
         "plot 'fig1.csv' using 1:3 with linespoints\n"
         "unset multiplot\n";
}

std::string fig3_gnuplot() {
  return "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set xlabel 'N'\n"
         "set ylabel 'customer surplus'\n"
         "plot 'fig3.csv' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\n";
}

}  // namespace avgcost::cli
