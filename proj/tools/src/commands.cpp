#include "avgcost/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "avgcost/avgcost.hpp"
#include "avgcost/cli/exit_codes.hpp"
#include "avgcost/cli/sampling.hpp"
#include "avgcost/cli/sweep.hpp"

namespace avgcost::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(double x) { return format_double(x); }

std::string profile_text(const DemandProfile& q) {
  std::string s = "[";
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i) s += ", ";
    s += fmt(q[i]);
  }
  return s + "]";
}

void report_config_error(std::ostream& err, const std::string& path, const ConfigError& e) {
  // ConfigError already prefixes "line N: " when it knows the line.
  err << path << ": error: " << e.what() << '\n';
}

// Maps library exceptions onto exit codes; used by every command.
template <typename Fn>
int guarded(std::ostream& err, const std::string& path, Fn&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    report_config_error(err, path, e);
    return kExitInput;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DegenerateInstanceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const StepSizeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  }
}

std::optional<MechanismSpec> mechanism_or_throw(const std::string& name) {
  if (name == "none") return std::nullopt;
  if (auto m = parse_mechanism(name)) return m;
  throw UsageError("unknown mechanism '" + name + "' (expected none, deficit or surplus)");
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path.string() + "'");
  f << content;
}

void print_report(std::ostream& out, const MarketConfig& cfg, const EquilibriumReport& rep,
                  const std::optional<MechanismSpec>& mech) {
  out << "equilibrium: " << to_string(rep.kind) << '\n';
  if (mech) out << "mechanism: " << to_string(mech->kind) << '\n';
  out << "users: " << cfg.n_users() << '\n';
  out << "converged: " << (rep.converged ? "true" : "false") << '\n';
  out << "iterations: " << rep.iterations << '\n';
  out << "foc_residual: " << fmt(rep.foc_residual) << '\n';
  out << "total_demand: " << fmt(rep.total_demand()) << '\n';
  out << "price: " << fmt(rep.price) << '\n';
  out << "customer_surplus: " << fmt(customer_surplus(cfg, rep.profile)) << '\n';
  if (mech) {
    const auto budget = budget_report(*mech, cfg, rep.profile);
    out << "sum_incentives: " << fmt(budget.total_incentive) << '\n';
  }
  for (std::size_t i = 0; i < rep.profile.size(); ++i) out << "q_" << i + 1 << ": " << fmt(rep.profile[i]) << '\n';
}

std::string report_csv(const MarketConfig& cfg, const EquilibriumReport& rep) {
  std::ostringstream os;
  os << "user,demand,marginal_valuation\n";
  for (std::size_t i = 0; i < rep.profile.size(); ++i) {
    os << i + 1 << ',' << fmt(rep.profile[i]) << ',' << fmt(cfg.valuation(i).grad(rep.profile[i])) << '\n';
  }
  return os.str();
}

struct PropertyRow {
  PropertyRow(std::string mech, std::string prop) : mechanism(std::move(mech)), property(std::move(prop)) {}

  std::string mechanism;
  std::string property;
  bool passed = true;
  std::string statistic;
  std::string counterexample;
};

}  // namespace

int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, opts.config_path, [&] {
    const MarketConfig cfg = load_market_config(opts.config_path);
    const auto mech = mechanism_or_throw(opts.mechanism);

    EquilibriumReport rep;
    if (opts.equilibrium == "price-taker") {
      if (!opts.price) throw UsageError("--equilibrium price-taker needs --price");
      rep = solve_price_taker(cfg, *opts.price);
    } else if (opts.equilibrium == "average-cost") {
      rep = solve_average_cost_price_taker(cfg);
    } else if (opts.equilibrium == "optimal") {
      rep = solve_optimal(cfg);
    } else if (opts.equilibrium == "nash") {
      rep = solve_nash(cfg);
    } else if (opts.equilibrium == "nash-incentivized") {
      if (!mech) throw UsageError("--equilibrium nash-incentivized needs --mechanism deficit|surplus");
      rep = solve_nash_with_incentives(cfg, *mech);
    } else {
      throw UsageError("unknown equilibrium '" + opts.equilibrium + "'");
    }

    const bool report_mech = mech && opts.equilibrium == "nash-incentivized";
    print_report(out, cfg, rep, report_mech ? mech : std::nullopt);
    if (!opts.csv_path.empty()) write_file(opts.csv_path, report_csv(cfg, rep));
    return rep.converged ? kExitOk : kExitNonConvergence;
  });
}

int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, opts.spec_path, [&] {
    const SweepSpec spec = load_sweep_spec(opts.spec_path);
    const auto rows = run_sweep(spec, opts.jobs);

    fs::create_directories(spec.output_dir);
    std::vector<fs::path> written;
    auto emit = [&](const std::string& name, const std::string& content) {
      write_file(spec.output_dir / name, content);
      written.push_back(spec.output_dir / name);
    };
    if (spec.include_none) {
      emit("fig1.csv", fig1_csv(rows));
      emit("efficiency.csv", efficiency_csv(rows));
      if (opts.gnuplot) emit("fig1.gp", fig1_gnuplot());
    }
    if (spec.include_deficit || spec.include_surplus) {
      emit("fig3.csv", fig3_csv(spec, rows));
      if (opts.gnuplot) emit("fig3.gp", fig3_gnuplot());
    }

    const auto failed = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.converged; });
    if (failed > 0) {
      emit("failures.csv", failures_csv(rows));
      for (const auto& r : rows) {
        if (!r.converged) err << "N=" << r.n << ": converged=false: " << r.failure << '\n';
      }
    }
    for (const auto& p : written) out << "wrote " << p.string() << '\n';
    out << "points: " << rows.size() << ", failed: " << failed << '\n';
    return failed > 0 ? kExitNonConvergence : kExitOk;
  });
}

int cmd_mechanism_report(const MechanismReportOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, opts.config_path, [&] {
    const MarketConfig cfg = load_market_config(opts.config_path);
    if (opts.samples < 1) throw UsageError("--samples must be >= 1");

    std::vector<MechanismSpec> mechs;
    if (opts.mechanism == "both" || opts.mechanism == "surplus") mechs.push_back(MechanismSpec::surplus());
    if (opts.mechanism == "both" || opts.mechanism == "deficit") mechs.push_back(MechanismSpec::deficit());
    if (mechs.empty()) throw UsageError("unknown mechanism '" + opts.mechanism + "' (expected both, deficit or surplus)");
    for (const auto& m : mechs) m.check(cfg);

    const std::size_t n = cfg.n_users();
    ProfileSampler sampler(opts.seed);
    std::vector<DemandProfile> random_profiles, uniform_profiles;
    random_profiles.reserve(opts.samples);
    uniform_profiles.reserve(opts.samples);
    for (std::size_t k = 0; k < opts.samples; ++k) random_profiles.push_back(sampler.profile(n));
    for (std::size_t k = 0; k < opts.samples; ++k) uniform_profiles.push_back(sampler.uniform_profile(n));

    std::vector<PropertyRow> rows;
    for (const auto& mech : mechs) {
      const bool surplus = mech.kind == MechanismSpec::Kind::Surplus;
      const std::string name(to_string(mech.kind));

      // Uniform profiles: I^s_i = 0, I^d_i <= 0.
      {
        PropertyRow row{name, surplus ? "uniform profile: I_i = 0" : "uniform profile: I_i <= 0"};
        double worst = surplus ? 0.0 : -std::numeric_limits<double>::infinity();
        for (const auto& q : uniform_profiles) {
          for (std::size_t i = 0; i < n; ++i) {
            const double inc = incentive(mech, cfg, q, i);
            const bool bad = surplus ? std::abs(inc) > 1e-10 : inc > 1e-9;
            worst = surplus ? std::max(worst, std::abs(inc)) : std::max(worst, inc);
            if (bad && row.passed) {
              row.passed = false;
              row.counterexample = profile_text(q);
            }
          }
        }
        row.statistic = (surplus ? "max |I_i| = " : "max I_i = ") + fmt(worst);
        rows.push_back(row);
      }

      // Weak budget balance over random profiles.
      {
        PropertyRow row{name, surplus ? "weak budget balance: sum I_i >= 0" : "weak budget balance: sum I_i <= 0"};
        double worst = surplus ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        for (const auto& q : random_profiles) {
          const auto b = budget_report(mech, cfg, q);
          const bool bad = surplus ? b.total_incentive < -1e-9 : b.total_incentive > 1e-9;
          worst = surplus ? std::min(worst, b.total_incentive) : std::max(worst, b.total_incentive);
          if (bad && row.passed) {
            row.passed = false;
            row.counterexample = profile_text(q);
          }
        }
        row.statistic = (surplus ? "min sum I_i = " : "max sum I_i = ") + fmt(worst);
        rows.push_back(row);
      }

      // Payments minus cost equal the incentives.
      {
        PropertyRow row{name, "budget accounting: sum o_i - C = sum I_i"};
        double worst = 0.0;
        for (const auto& q : random_profiles) {
          const auto b = budget_report(mech, cfg, q);
          const double dev = std::abs(b.total_payment - b.cost - b.total_incentive) /
                             std::max({1.0, std::abs(b.total_payment), std::abs(b.cost)});
          worst = std::max(worst, dev);
          if (dev > 1e-10 && row.passed) {
            row.passed = false;
            row.counterexample = profile_text(q);
          }
        }
        row.statistic = "max relative deviation = " + fmt(worst);
        rows.push_back(row);
      }

      // Individual rationality at the optimum.
      {
        const auto ir = individual_rationality_check(mech, cfg);
        PropertyRow row{name, "individual rationality: W_i(mu) >= 0"};
        row.passed = ir.passes;
        row.statistic = "min W_i(mu) = " + fmt(*std::min_element(ir.w_at_optimum.begin(), ir.w_at_optimum.end())) +
                        ", sufficient condition " + (ir.sufficient_condition_holds ? "holds" : "fails");
        if (!row.passed) row.counterexample = profile_text(ir.optimum);
        rows.push_back(row);
      }
    }

    out << "mechanism-report: N=" << n << " samples=" << opts.samples << " seed=" << opts.seed << '\n';
    bool all_passed = true;
    for (const auto& r : rows) {
      out << (r.passed ? "[PASS] " : "[FAIL] ") << r.mechanism << ": " << r.property << " (" << r.statistic << ")\n";
      if (!r.passed) {
        out << "       counterexample q = " << r.counterexample << '\n';
        all_passed = false;
      }
    }

    if (n >= 2) {
      const auto opt = solve_optimal(cfg);
      const double theta = opt.total_demand() > 0.0 ? static_cast<double>(n - 1) * opt.total_demand() : 1.0;
      const auto w = impossibility_demo(cfg, theta);
      out << "impossibility witness: theta=" << fmt(w.theta) << '\n'
          << "  uniform profile needs   h(" << fmt(w.uniform_point) << ") = p(theta/(N-1)) = "
          << fmt(w.uniform_required_h) << '\n'
          << "  one idle user needs     h(" << fmt(w.one_idle_point) << ") = p(theta/(N-1)) = "
          << fmt(w.one_idle_required_h) << '\n'
          << "  rescaled to the same point, h(" << fmt(w.uniform_point) << ") = " << fmt(w.rescaled_required_h) << '\n'
          << "  gap = " << fmt(w.gap) << (w.contradiction() ? " > 0: no budget-balanced h exists" : " (degenerate)")
          << '\n';
    } else {
      out << "impossibility witness: not applicable for N=1\n";
    }
    return all_passed ? kExitOk : kExitPropertyViolation;
  });
}

int cmd_replicate(const ReplicateOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, opts.config_path, [&] {
    const MarketConfig cfg = load_market_config(opts.config_path);
    const auto mech = mechanism_or_throw(opts.mechanism);
    ReplicatorSettings s;
    s.budget = opts.budget;
    s.dt = opts.dt;
    s.t_max = opts.t_max;
    s.sample_every = opts.sample_every;
    const Trajectory traj = replicator_solve(cfg, mech, s);

    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    if (opts.csv_path.empty()) {
      out << csv.str();
    } else {
      write_file(opts.csv_path, csv.str());
      out << "final_time: " << fmt(traj.t.back()) << '\n';
      out << "final_total: " << fmt(traj.final_state().total()) << '\n';
      out << "wrote " << opts.csv_path << '\n';
    }
    return kExitOk;
  });
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibria, efficiency and incentive mechanisms for average-cost electricity pricing", "avgcost"};
  app.require_subcommand(1);

  SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one equilibrium of a market configuration");
  solve_cmd->add_option("config", solve.config_path, "Market configuration (YAML)")->required();
  solve_cmd->add_option("--equilibrium,-e", solve.equilibrium, "Equilibrium to compute")
      ->check(CLI::IsMember({"price-taker", "average-cost", "optimal", "nash", "nash-incentivized"}));
  solve_cmd->add_option("--mechanism,-m", solve.mechanism, "Incentive mechanism")
      ->check(CLI::IsMember({"none", "deficit", "surplus"}));
  solve_cmd->add_option("--price,-p", solve.price, "Exogenous price for --equilibrium price-taker");
  solve_cmd->add_option("--csv", solve.csv_path, "Also write the profile as CSV");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a population-size sweep and write figure CSVs");
  sweep_cmd->add_option("spec", sweep.spec_path, "Sweep specification (YAML)")->required();
  sweep_cmd->add_option("--jobs,-j", sweep.jobs, "Points evaluated concurrently")->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--gnuplot", sweep.gnuplot, "Also write gnuplot scripts next to the CSVs");

  MechanismReportOptions report;
  auto* report_cmd = app.add_subcommand("mechanism-report", "Check the mechanism properties on random profiles");
  report_cmd->add_option("config", report.config_path, "Market configuration (YAML)")->required();
  report_cmd->add_option("--samples,-k", report.samples, "Random profiles per property");
  report_cmd->add_option("--seed,-s", report.seed, "64-bit seed for the profile generator");
  report_cmd->add_option("--mechanism,-m", report.mechanism, "Mechanisms to check")
      ->check(CLI::IsMember({"both", "deficit", "surplus"}));

  ReplicateOptions rep;
  auto* rep_cmd = app.add_subcommand("replicate", "Integrate the replicator dynamics and write the trajectory");
  rep_cmd->add_option("config", rep.config_path, "Market configuration (YAML)")->required();
  rep_cmd->add_option("--mechanism,-m", rep.mechanism, "Incentive mechanism")
      ->check(CLI::IsMember({"none", "deficit", "surplus"}));
  rep_cmd->add_option("--budget", rep.budget, "Resource cap per user");
  rep_cmd->add_option("--dt", rep.dt, "Time step");
  rep_cmd->add_option("--t-max", rep.t_max, "Integration horizon");
  rep_cmd->add_option("--sample-every", rep.sample_every, "Keep every k-th step");
  rep_cmd->add_option("--csv", rep.csv_path, "Trajectory CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  if (*solve_cmd) return cmd_solve(solve, out, err);
  if (*sweep_cmd) return cmd_sweep(sweep, out, err);
  if (*report_cmd) return cmd_mechanism_report(report, out, err);
  return cmd_replicate(rep, out, err);
}

}  // namespace avgcost::cli
