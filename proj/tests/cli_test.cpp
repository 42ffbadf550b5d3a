#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "avgcost/cli/commands.hpp"
#include "avgcost/errors.hpp"
#include "avgcost/cli/exit_codes.hpp"
#include "avgcost/cli/sampling.hpp"
#include "avgcost/cli/sweep.hpp"

namespace avgcost::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "avgcost");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("avgcost_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  std::string example1() { return write("example1.yaml", "n_users: 9\nvaluation: {family: linear, alpha: 10}\ncost: {beta: 1, b: 1}\n"); }
  std::string example2(int n) {
    return write("example2.yaml", "n_users: " + std::to_string(n) +
                                      "\nvaluation: {family: log, alpha_rule: \"spread(10, 11)\"}\ncost: {beta: 1, b: 1}\n");
  }

  fs::path dir_;
};

double field(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + ": ");
  if (pos == std::string::npos) return std::nan("");
  return std::stod(text.substr(pos + key.size() + 2));
}

TEST_F(CliTest, SolveNashAndOptimal) {
  const auto cfg = example1();
  auto r = invoke({"solve", cfg, "--equilibrium", "nash"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(field(r.out, "total_demand"), 8.1, 1e-9);
  EXPECT_NEAR(field(r.out, "q_1"), 0.9, 1e-10);

  r = invoke({"solve", cfg, "-e", "optimal"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NEAR(field(r.out, "total_demand"), 4.5, 1e-9);
  EXPECT_NEAR(field(r.out, "customer_surplus"), 20.25, 1e-9);
}

TEST_F(CliTest, SolveIncentivizedWritesCsv) {
  const auto csv = (dir_ / "profile.csv").string();
  const auto r = invoke({"solve", example2(10), "-e", "nash-incentivized", "-m", "surplus", "--csv", csv});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("mechanism: surplus"), std::string::npos);
  const auto text = slurp(csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), "user,demand,marginal_valuation");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 11);
}

TEST_F(CliTest, InputErrors) {
  EXPECT_EQ(invoke({"solve", example1(), "-e", "price-taker"}).code, kExitInput);
  EXPECT_EQ(invoke({"solve", example1(), "-e", "nash-incentivized"}).code, kExitInput);
  EXPECT_EQ(invoke({"solve", example1(), "-e", "bogus"}).code, kExitInput);
  EXPECT_EQ(invoke({"solve", (dir_ / "missing.yaml").string()}).code, kExitInput);
  EXPECT_EQ(invoke({"frobnicate"}).code, kExitInput);
  EXPECT_EQ(invoke({}).code, kExitInput);
  EXPECT_EQ(invoke({"--help"}).code, kExitOk);
}

TEST_F(CliTest, MalformedConfigReportsLine) {
  const auto cfg = write("bad.yaml", "n_users: 2\nvaluation:\n  family: cubic\n  alpha: 1\ncost: {beta: 1, b: 1}\n");
  const auto r = invoke({"solve", cfg});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("bad.yaml"), std::string::npos);
}

TEST_F(CliTest, UnboundedPriceTakerIsNonConvergence) {
  EXPECT_EQ(invoke({"solve", example1(), "-e", "price-taker", "--price", "5"}).code, kExitNonConvergence);
}

TEST_F(CliTest, MechanismReportPassesOnExample2) {
  const auto r = invoke({"mechanism-report", example2(10), "--samples", "1000", "--seed", "7"});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_EQ(r.out.find("[FAIL]"), std::string::npos);
  EXPECT_NE(r.out.find("no budget-balanced h exists"), std::string::npos);
}

TEST_F(CliTest, MechanismReportIsSeeded) {
  const auto cfg = example2(5);
  const auto a = invoke({"mechanism-report", cfg, "-k", "200", "-s", "42"});
  const auto b = invoke({"mechanism-report", cfg, "-k", "200", "-s", "42"});
  const auto c = invoke({"mechanism-report", cfg, "-k", "200", "-s", "43"});
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST_F(CliTest, MechanismReportSurplusNeedsTwoUsers) {
  const auto cfg = write("one.yaml", "n_users: 1\nvaluation: {family: log, alpha: 10}\ncost: {beta: 1, b: 1}\n");
  EXPECT_EQ(invoke({"mechanism-report", cfg}).code, kExitInput);
  EXPECT_EQ(invoke({"mechanism-report", cfg, "-m", "deficit"}).code, kExitOk);
}

TEST_F(CliTest, SweepWritesFigureCsvs) {
  write("sweep.yaml", "n_values: \"1..6\"\nmechanisms: [none]\noutput_dir: out\n"
                      "market:\n  valuation: {family: linear, alpha: 10}\n  cost: {beta: 1, b: 1}\n");
  const auto r = invoke({"sweep", (dir_ / "sweep.yaml").string(), "--gnuplot"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto fig1 = slurp(dir_ / "out" / "fig1.csv");
  EXPECT_EQ(fig1.substr(0, fig1.find('\n')), "N,demand_ratio,efficiency_ratio");
  EXPECT_EQ(std::count(fig1.begin(), fig1.end(), '\n'), 7);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "fig1.gp"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "efficiency.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "out" / "fig3.csv"));
}

TEST_F(CliTest, SweepIsIndependentOfJobs) {
  const auto spec = parse_sweep_spec("n_values: \"2..40\"\nmechanisms: [none, deficit, surplus]\n"
                                     "market:\n  valuation: {family: log, alpha_rule: \"spread(10, 11)\"}\n"
                                     "  cost: {beta: 1, b: 1}\n");
  const auto serial = run_sweep(spec, 1);
  const auto parallel = run_sweep(spec, 4);
  EXPECT_EQ(fig1_csv(serial), fig1_csv(parallel));
  EXPECT_EQ(fig3_csv(spec, serial), fig3_csv(spec, parallel));
  EXPECT_EQ(fig1_csv(serial), fig1_csv(run_sweep(spec, 1)));
  const auto fig3 = fig3_csv(spec, serial);
  EXPECT_EQ(fig3.substr(0, fig3.find('\n')),
            "N,surplus_no_mech,surplus_deficit,surplus_surplus_mech,sum_incentives_deficit,sum_incentives_surplus");
}

TEST_F(CliTest, SweepSpecErrors) {
  EXPECT_THROW(parse_sweep_spec("n_values: \"1..5\"\nmechanisms: [surplus]\nmarket:\n  valuation: {family: log, alpha: 1}\n"
                                "  cost: {beta: 1, b: 1}\n"),
               ConfigError);
  EXPECT_THROW(parse_sweep_spec("n_values: \"5..1\"\nmarket:\n  valuation: {family: log, alpha: 1}\n  cost: {beta: 1, b: 1}\n"),
               ConfigError);
}

TEST_F(CliTest, Replicate) {
  const auto csv = (dir_ / "traj.csv").string();
  auto r = invoke({"replicate", example1(), "--budget", "5", "--csv", csv});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(field(r.out, "final_total"), 8.1, 1e-3);
  EXPECT_EQ(invoke({"replicate", example1(), "--dt", "50"}).code, kExitNonConvergence);
}

TEST(Sampling, Deterministic) {
  ProfileSampler a(9), b(9);
  for (int k = 0; k < 100; ++k) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 10.0);
  }
  const auto u = ProfileSampler(3).uniform_profile(4);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(u[i], u[0]);
}

}  // namespace
}  // namespace avgcost::cli
