#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "aavf/harness/config.hpp"
#include "aavf/harness/csv.hpp"
#include "aavf/harness/experiment.hpp"
#include "aavf/harness/trend.hpp"
#include "gtest/gtest.h"

namespace aavf::harness {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            ("aavf_" + std::string(info->test_suite_name()) + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

RunConfig small_run(const std::string& out) {
  RunConfig cfg;
  cfg.two_m = 16;
  cfg.t_end = 1.0;
  cfg.sample_every = 4;
  cfg.output_path = out;
  return cfg;
}

TEST(ConfigTest, Defaults) {
  const RunConfig cfg = parse_config({});
  EXPECT_EQ(cfg.rho, 0.5);
  EXPECT_EQ(cfg.g_coeffs, std::vector<double>{-1.0});
  EXPECT_EQ(cfg.two_m, 128);
  EXPECT_EQ(cfg.h, 0.05);
  EXPECT_EQ(cfg.t_end, 10000.0);
  EXPECT_EQ(cfg.s, 2.0);
  EXPECT_EQ(cfg.quadrature, "midpoint");
  EXPECT_EQ(cfg.fp_tol, 1e-13);
  EXPECT_EQ(cfg.fp_max_iters, 100);
  EXPECT_EQ(cfg.n_steps(), 200000);
}

TEST(ConfigTest, FlagsOverrideDefaults) {
  const RunConfig cfg = parse_config(
      {"--h", "0.1", "--two-m", "64", "--g-poly", "-1,0.5", "--quadrature", "gauss:3"});
  EXPECT_EQ(cfg.h, 0.1);
  EXPECT_EQ(cfg.two_m, 64);
  EXPECT_EQ(cfg.g_coeffs, (std::vector<double>{-1.0, 0.5}));
  EXPECT_EQ(cfg.quadrature_rule().points(), 3);
  EXPECT_EQ(cfg.rho, 0.5);
}

TEST(ConfigTest, Errors) {
  EXPECT_THROW(parse_config({"--two-m", "127"}), UsageError);
  EXPECT_THROW(parse_config({"--h", "-0.1"}), UsageError);
  EXPECT_THROW(parse_config({"--quadrature", "simpson"}), UsageError);
  EXPECT_THROW(parse_config({"--no-such-flag"}), UsageError);
  EXPECT_THROW(parse_config({"--help"}), HelpRequested);
  EXPECT_NE(usage_text().find("--two-m"), std::string::npos);
}

TEST(ConfigTest, FileIsOverriddenByFlags) {
  TempDir dir;
  const auto ini = dir.file("run.ini");
  std::ofstream(ini) << "h = 0.025\ntwo-m = 32\nquadrature = exact\n";
  const RunConfig cfg = parse_config({"--config", ini, "--two-m", "16"});
  EXPECT_EQ(cfg.h, 0.025);
  EXPECT_EQ(cfg.two_m, 16);
  EXPECT_EQ(cfg.quadrature, "exact");
}

TEST(ConfigTest, StepCountIsRobustToRounding) {
  RunConfig cfg;
  cfg.h = 0.1;
  cfg.t_end = 0.3;
  EXPECT_EQ(cfg.n_steps(), 3);
  cfg.t_end = 0.0;
  EXPECT_EQ(cfg.n_steps(), 0);
}

TEST(CsvTest, FormatAndRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(parse_double("0.10000000000000001"), 0.1);
  EXPECT_THROW(parse_double("1.0x"), ParseError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::vector<DiagnosticRow> rows{
      {0.0, 0.002, 0.0, -8e-5, -8e-5, 0.0, 0.0, 0.0, 0.0},
      {1.0, 0.002, 1e-15, -8.1e-5, -8e-5, 0.01, 1e-13, 0.02, nan}};
  std::ostringstream first;
  write_csv(rows, first);
  EXPECT_EQ(first.str().rfind(std::string(kCsvHeader) + "\n", 0), 0u);
  std::istringstream in(first.str());
  const auto back = read_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_TRUE(std::isnan(back[1].errMI));
  EXPECT_EQ(back[1].errK, 0.01);
  std::ostringstream second;
  write_csv(back, second);
  EXPECT_EQ(first.str(), second.str());
}

TEST(CsvTest, Errors) {
  std::istringstream bad_header("t,H\n1,2\n");
  EXPECT_THROW(read_csv(bad_header), ParseError);
  std::istringstream short_row(std::string(kCsvHeader) + "\n1,2,3\n");
  EXPECT_THROW(read_csv(short_row), ParseError);
  EXPECT_THROW(emit_csv({}, "/tmp/unused.csv"), InvalidInput);
  EXPECT_THROW(emit_csv({DiagnosticRow{}}, "/nonexistent/dir/out.csv"), IoError);
  EXPECT_THROW(parse_csv("/nonexistent/in.csv"), IoError);
}

std::vector<DiagnosticRow> synthetic(double (*f)(double)) {
  std::vector<DiagnosticRow> rows;
  for (int i = 0; i <= 100; ++i) {
    const double t = 100.0 * i;
    const double v = f(t);
    rows.push_back({t, 1.0, 0.0, 1.0, 1.0, v, v, v, v});
  }
  return rows;
}

TEST(TrendTest, ConstantDriftPasses) {
  const auto r = trend_test(synthetic([](double) { return 1e-3; }), 2500.0);
  EXPECT_TRUE(r.passed());
  EXPECT_DOUBLE_EQ(r.errMI.ratio(), 1.0);
  EXPECT_NE(r.to_text().find("verdict: PASS"), std::string::npos);
}

TEST(TrendTest, LinearDriftFails) {
  const auto r = trend_test(synthetic([](double t) { return 1e-6 * t; }), 2500.0);
  EXPECT_FALSE(r.passed());
  EXPECT_DOUBLE_EQ(r.errMK.ratio(), 4.0);
  EXPECT_NE(r.to_text().find("verdict: FAIL"), std::string::npos);
}

TEST(TrendTest, NaNColumnFailsAndSplitIsChecked) {
  auto rows = synthetic([](double) { return 1e-3; });
  rows[5].errMI = std::numeric_limits<double>::quiet_NaN();
  const auto r = trend_test(rows, 2500.0);
  EXPECT_EQ(r.errMI.nan_count, 1u);
  EXPECT_FALSE(r.passed());
  EXPECT_THROW(trend_test(rows, 0.0), InvalidParameter);
  EXPECT_THROW(trend_test(rows, 10000.0), InvalidParameter);
  EXPECT_THROW(trend_test(std::vector<DiagnosticRow>{}, 1.0), InvalidInput);
}

TEST(TrendTest, Medians) {
  std::vector<DiagnosticRow> rows;
  for (double v : {4.0, 1.0, 3.0, 2.0}) {
    rows.push_back({static_cast<double>(rows.size()), 0, 0, 0, 0, v, v, v, 2 * v});
  }
  const auto r = trend_test(rows, 1.5);
  EXPECT_EQ(r.errI.median, 2.5);
  EXPECT_EQ(r.errMI.median, 5.0);
  EXPECT_FALSE(r.actions_improved());
  EXPECT_TRUE(r.momentum_improved());
}

TEST(ExperimentTest, ZeroFinalTimeGivesOneRow) {
  TempDir dir;
  RunConfig cfg = small_run(dir.file("zero.csv"));
  cfg.t_end = 0.0;
  std::ostringstream log;
  const auto r = run_experiment(cfg, log);
  ASSERT_EQ(r.exit_code, kOk) << log.str();
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].t, 0.0);
  EXPECT_EQ(parse_csv(cfg.output_path).size(), 1u);
}

TEST(ExperimentTest, RowCountAndDeterminism) {
  TempDir dir;
  std::ostringstream log;
  RunConfig a = small_run(dir.file("a.csv"));
  RunConfig b = small_run(dir.file("b.csv"));
  const auto ra = run_experiment(a, log);
  run_experiment(b, log);
  ASSERT_EQ(ra.exit_code, kOk) << log.str();
  EXPECT_EQ(ra.rows.size(), 1u + 20u / 4u);
  EXPECT_EQ(slurp(a.output_path), slurp(b.output_path));
  EXPECT_NE(log.str().find("rows=6"), std::string::npos);
}

TEST(ExperimentTest, NodalInitialDataFile) {
  TempDir dir;
  const auto ic = dir.file("ic.txt");
  {
    std::ofstream os(ic);
    os.precision(17);
    os << "# u,v at x_k\n";
    for (int n = 0; n < 16; ++n) {
      const double x = -std::numbers::pi + n * std::numbers::pi / 8;
      os << initial_displacement(x) << ',' << initial_velocity(x) << '\n';
    }
  }
  RunConfig cfg = small_run(dir.file("ic.csv"));
  cfg.ic = ic;
  std::ostringstream log;
  const auto from_file = run_experiment(cfg, log);
  cfg.ic = "paper";
  cfg.output_path = dir.file("paper.csv");
  const auto preset = run_experiment(cfg, log);
  ASSERT_EQ(from_file.exit_code, kOk) << log.str();
  EXPECT_NEAR(from_file.rows[0].H, preset.rows[0].H, 1e-6 * preset.rows[0].H);

  std::ofstream(dir.file("short.txt")) << "0,0\n";
  cfg.ic = dir.file("short.txt");
  EXPECT_EQ(run_experiment(cfg, log).exit_code, kUsage);
  cfg.ic = dir.file("missing.txt");
  EXPECT_EQ(run_experiment(cfg, log).exit_code, kIoFailure);
}

TEST(ExperimentTest, SolverFailureExitCode) {
  TempDir dir;
  RunConfig cfg = small_run(dir.file("fail.csv"));
  cfg.fp_max_iters = 1;
  std::ostringstream log;
  EXPECT_EQ(run_experiment(cfg, log).exit_code, kSolverFailure);
  EXPECT_NE(log.str().find("at step 1"), std::string::npos);
}

TEST(ExperimentTest, UnwritableOutput) {
  std::ostringstream log;
  EXPECT_EQ(run_experiment(small_run("/nonexistent/dir/out.csv"), log).exit_code,
            kIoFailure);
}

TEST(ExperimentTest, ResonanceParamsDefaultEpsilon) {
  RunConfig cfg = small_run("unused.csv");
  const Problem prob = build_problem(cfg);
  auto p = resonance_params(cfg, prob);
  EXPECT_EQ(p.M, 8);
  EXPECT_NEAR(p.epsilon, epsilon_estimate(prob.initial, prob.freqs, 2.0), 0.0);
  cfg.epsilon = 0.02;
  EXPECT_EQ(resonance_params(cfg, prob).epsilon, 0.02);
}

TEST(SweepTest, ParsesLinesAndRunsAll) {
  TempDir dir;
  EXPECT_EQ(sweep_line_args("h=0.1 out=x.csv"),
            (std::vector<std::string>{"--h", "0.1", "--out", "x.csv"}));
  EXPECT_THROW(sweep_line_args("h"), UsageError);
  const auto sweep = dir.file("sweep.txt");
  std::ofstream(sweep) << "# two step sizes\nh=0.1 out=" << dir.file("s1.csv")
                       << "\n\nh=0.05 out=" << dir.file("s2.csv") << "\n";
  std::ostringstream log;
  EXPECT_EQ(run_sweep({"--two-m", "16", "--t-end", "1"}, sweep, log), kOk) << log.str();
  EXPECT_EQ(parse_csv(dir.file("s1.csv")).size(), 1u + 10u / 20u);
  EXPECT_EQ(parse_csv(dir.file("s2.csv")).back().t, 1.0);

  std::ofstream(sweep) << "h=0.1 out=" << dir.file("same.csv") << "\nh=0.05 out="
                       << dir.file("same.csv") << "\n";
  EXPECT_THROW(run_sweep({"--two-m", "16"}, sweep, log), UsageError);
  EXPECT_EQ(run_sweep({}, dir.file("missing.txt"), log), kIoFailure);
}

#ifdef AAVF_WAVE_BINARY
int run_cli(const std::string& args, const std::string& stdout_path = "/dev/null") {
  const std::string cmd = std::string("\"") + AAVF_WAVE_BINARY + "\" " + args + " >" +
                          stdout_path + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, ExitCodes) {
  TempDir dir;
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("--two-m 127"), 1);
  EXPECT_EQ(run_cli("--bogus"), 1);
  EXPECT_EQ(run_cli("--two-m 16 --t-end 0.5 --out /nonexistent/dir/x.csv"), 3);
  EXPECT_EQ(run_cli("--two-m 16 --t-end 0.5 --fp-max-iters 1 --out " +
                    dir.file("f.csv")),
            2);
  EXPECT_EQ(run_cli("--two-m 16 --t-end 0.5 --out " + dir.file("ok.csv")), 0);
  EXPECT_EQ(parse_csv(dir.file("ok.csv")).size(), 1u + 10u / 20u);
}

TEST(CliTest, TrendAndResonanceOutput) {
  TempDir dir;
  const auto csv = dir.file("run.csv");
  ASSERT_EQ(run_cli("--two-m 16 --t-end 20 --out " + csv), 0);
  const auto out = dir.file("trend.txt");
  EXPECT_EQ(run_cli("--trend-csv " + csv + " --trend-split 5", out), 0);
  EXPECT_NE(slurp(out).find("verdict:"), std::string::npos);
  EXPECT_EQ(run_cli("--trend-csv " + csv), 1);

  const auto rep = dir.file("res.txt");
  EXPECT_EQ(run_cli("--two-m 8 --resonance-report --epsilon 0.01", rep), 0);
  const std::string text = slurp(rep);
  EXPECT_NE(text.find("M: 4"), std::string::npos);
  EXPECT_NE(text.find("numerical_nonres: l=0 pass"), std::string::npos);
  EXPECT_NE(text.find("verdict:"), std::string::npos);
  EXPECT_EQ(run_cli("--resonance-report"), 1);  // (M+1) N too large
}
#endif

}  // namespace
}  // namespace aavf::harness
