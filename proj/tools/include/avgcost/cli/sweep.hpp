#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avgcost/config.hpp"
#include "avgcost/equilibrium.hpp"

namespace avgcost::cli {

struct SweepSpec {
  std::vector<std::size_t> n_values;
  MarketTemplate market;
  bool include_none = true;
  bool include_deficit = false;
  bool include_surplus = false;
  std::filesystem::path output_dir = ".";
};

/// Sweep document layout:
///
///   n_values: "2..100"          # or an explicit list [1, 2, 5]
///   mechanisms: [none, deficit, surplus]
///   output_dir: results
///   market:
///     valuation: {family: log, alpha_rule: "spread(10, 11)"}
///     cost: {beta: 1, b: 1}
///
/// A relative output_dir is resolved against `base_dir`.
SweepSpec parse_sweep_spec(std::string_view text, const std::filesystem::path& base_dir = ".");
SweepSpec load_sweep_spec(const std::filesystem::path& path);

struct SweepRow {
  std::size_t n = 0;
  bool converged = true;
  std::string failure;

  double total_nash = 0.0;
  double total_opt = 0.0;
  double demand_ratio = 0.0;
  double surplus_nash = 0.0;
  double surplus_opt = 0.0;
  double efficiency_ratio = 0.0;

  double surplus_deficit = 0.0;
  double surplus_surplus_mech = 0.0;
  double sum_incentives_deficit = 0.0;
  double sum_incentives_surplus = 0.0;
};

/// One row per population size, in the order of spec.n_values. `jobs` > 1
/// evaluates points concurrently; the result is independent of `jobs`.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::size_t jobs = 1, const SolverSettings& settings = {});

/// fig1.csv: N,demand_ratio,efficiency_ratio
std::string fig1_csv(const std::vector<SweepRow>& rows);
/// fig3.csv: N,surplus_no_mech,surplus_deficit,surplus_surplus_mech,
///           sum_incentives_deficit,sum_incentives_surplus
std::string fig3_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows);
/// efficiency.csv: one EfficiencyReport row per N.
std::string efficiency_csv(const std::vector<SweepRow>& rows);
/// failures.csv: N,converged,message for rows whose solve failed.
std::string failures_csv(const std::vector<SweepRow>& rows);

std::string fig1_gnuplot();
std::string fig3_gnuplot();

}  // namespace avgcost::cli
