#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace avgcost::cli {

struct SolveOptions {
  std::string config_path;
  std::string equilibrium = "nash";
  std::string mechanism = "none";
  std::optional<double> price;
  std::string csv_path;
};

struct SweepOptions {
  std::string spec_path;
  std::size_t jobs = 1;
  bool gnuplot = false;
};

struct MechanismReportOptions {
  std::string config_path;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  std::string mechanism = "both";
};

struct ReplicateOptions {
  std::string config_path;
  std::string mechanism = "none";
  double budget = 5.0;
  double dt = 0.01;
  double t_max = 50.0;
  std::size_t sample_every = 10;
  std::string csv_path;
};

/// Each command writes its report to `out`, diagnostics to `err`, and
/// returns the process exit code (0 ok, 2 input, 3 non-convergence,
/// 4 property violation).
int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err);
int cmd_mechanism_report(const MechanismReportOptions& opts, std::ostream& out, std::ostream& err);
int cmd_replicate(const ReplicateOptions& opts, std::ostream& out, std::ostream& err);

/// Full command line entry point used by main().
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace avgcost::cli
