#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aavf/errors.hpp"
#include "aavf/quadrature.hpp"

namespace aavf::harness {

/// Bad command line or config file; maps to exit status 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// --help was given; what() holds the help text.
class HelpRequested : public Error {
 public:
  using Error::Error;
};

/// Defaults reproduce the long-time drift experiment: rho = 0.5, g = -u^2,
/// 2M = 128, h = 0.05 on [0, 10000], s = 2, midpoint quadrature.
struct RunConfig {
  double rho = 0.5;
  std::vector<double> g_coeffs{-1.0};  // coefficients of u^2, u^3, ...
  int two_m = 128;
  double h = 0.05;
  double t_end = 10000.0;
  double s = 2.0;
  std::string quadrature = "midpoint";
  double fp_tol = 1e-13;
  int fp_max_iters = 100;
  long long sample_every = 20;
  std::string output_path = "aavf_run.csv";
  /// "paper" or the path of a two-column `u,v` nodal file.
  std::string ic = "paper";

  std::optional<double> trend_split;
  std::optional<std::string> trend_csv;
  bool semidiscrete_check = false;

  bool resonance_report = false;
  std::optional<double> epsilon;
  int trunc_n = 1;
  double sigma = 1.0;
  double c0 = 1.0;

  std::optional<std::string> sweep;

  Quadrature quadrature_rule() const { return Quadrature::parse(quadrature); }

  /// Number of steps covering [0, t_end].
  long long n_steps() const {
    return static_cast<long long>(std::floor(t_end / h + 1e-9));
  }

  void validate() const {
    if (!(rho > 0.0)) throw UsageError("--rho must be positive");
    if (two_m < 4 || two_m % 2 != 0) {
      throw UsageError("--two-m must be an even integer >= 4, got " +
                       std::to_string(two_m));
    }
    if (!(h > 0.0) || !std::isfinite(h)) throw UsageError("--h must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
      throw UsageError("--t-end must be nonnegative");
    }
    if (!(s >= 0.0)) throw UsageError("--s must be nonnegative");
    if (!(fp_tol > 0.0) || !(fp_tol < 1e-6)) {
      throw UsageError("--fp-tol must lie in (0, 1e-6)");
    }
    if (fp_max_iters < 1) throw UsageError("--fp-max-iters must be >= 1");
    if (sample_every < 1) throw UsageError("--sample-every must be >= 1");
    if (trunc_n < 1) throw UsageError("--trunc-n must be >= 1");
    try {
      (void)quadrature_rule();
    } catch (const ParseError& e) {
      throw UsageError(e.what());
    }
  }
};

namespace detail {

inline void bind_options(CLI::App& app, RunConfig& cfg) {
  app.set_help_flag("--help", "Print this help and exit");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_config("--config", "", "Flat `key = value` file (keys as long flags)");
  app.add_option("--rho", cfg.rho, "Mass parameter rho > 0");
  app.add_option("--g-poly", cfg.g_coeffs,
                 "Coefficients of u^2, u^3, ... in g(u)")
      ->delimiter(',')
      ->allow_extra_args(false);
  app.add_option("--two-m", cfg.two_m, "Number of grid points 2M (even)");
  app.add_option("--h", cfg.h, "Step size");
  app.add_option("--t-end", cfg.t_end, "Final time");
  app.add_option("--s", cfg.s, "Sobolev index of the action weights");
  app.add_option("--quadrature", cfg.quadrature,
                 "exact | midpoint | gauss:<n>");
  app.add_option("--fp-tol", cfg.fp_tol, "Fixed-point relative tolerance");
  app.add_option("--fp-max-iters", cfg.fp_max_iters, "Fixed-point iteration cap");
  app.add_option("--sample-every", cfg.sample_every, "Steps between CSV rows");
  app.add_option("--out", cfg.output_path, "Output CSV path");
  app.add_option("--ic", cfg.ic, "Initial data: paper | <u,v nodal file>");
  app.add_option("--trend-split", cfg.trend_split,
                 "Run the drift trend test with early window [0, t*]");
  app.add_option("--trend-csv", cfg.trend_csv,
                 "Trend-test an existing CSV instead of running");
  app.add_flag("--semidiscrete-check", cfg.semidiscrete_check,
               "Also trend-test an h/16 run as semi-discrete proxy");
  app.add_flag("--resonance-report", cfg.resonance_report,
               "Print the non-resonance report and exit");
  app.add_option("--epsilon", cfg.epsilon,
                 "Smallness parameter (default: estimate from initial data)");
  app.add_option("--trunc-n", cfg.trunc_n, "Truncation number N");
  app.add_option("--sigma", cfg.sigma, "Exponent sigma of the resonance bound");
  app.add_option("--c0", cfg.c0, "Constant C0 of the resonance bound");
  app.add_option("--sweep", cfg.sweep,
                 "File of runs, one line of key=value overrides each");
}

}  // namespace detail

/// Command-line flags override config-file values, which override defaults.
/// `args` excludes the program name.
inline RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"AAVF semilinear wave solver"};
  detail::bind_options(app, cfg);
  // CLI11 expects arguments in reverse order.
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  cfg.validate();
  return cfg;
}

inline std::string usage_text() {
  RunConfig cfg;
  CLI::App app{"AAVF semilinear wave solver"};
  detail::bind_options(app, cfg);
  return app.help();
}

}  // namespace aavf::harness
