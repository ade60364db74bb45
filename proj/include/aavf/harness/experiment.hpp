#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "aavf/errors.hpp"
#include "aavf/harness/config.hpp"
#include "aavf/harness/csv.hpp"
#include "aavf/harness/trend.hpp"
#include "aavf/integrator.hpp"
#include "aavf/resonance.hpp"
#include "aavf/spectral.hpp"
#include "aavf/system.hpp"

namespace aavf::harness {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kSolverFailure = 2,
  kIoFailure = 3,
};

struct Problem {
  Grid grid;
  FrequencyTable freqs;
  SystemSpec spec;
  State initial;
};

/// Reads 2M lines `u,v` of nodal displacement and velocity at x_k,
/// k = -M..M-1. Blank lines and lines starting with '#' are skipped.
inline State read_nodal_initial_state(const std::string& path, const Grid& grid) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open initial-data file '" + path + "'");
  NodalField u, v;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError("initial-data line needs `u,v`: '" + line + "'");
    }
    u.values.push_back(parse_double(std::string_view(line).substr(0, comma)));
    v.values.push_back(parse_double(std::string_view(line).substr(comma + 1)));
  }
  if (u.size() != static_cast<std::size_t>(grid.size())) {
    throw InvalidInput("initial-data file has " + std::to_string(u.size()) +
                       " rows, grid has " + std::to_string(grid.size()) +
                       " nodes");
  }
  return State(dft(u, grid), dft(v, grid), 0.0);
}

inline Problem build_problem(const RunConfig& cfg) {
  const Grid grid = Grid::from_points(cfg.two_m);
  FrequencyTable freqs(cfg.rho, grid.half_modes());
  SystemSpec spec = SystemSpec::from_higher_order(cfg.rho, cfg.g_coeffs);
  State init = cfg.ic == "paper" ? initial_state(grid, freqs)
                                 : read_nodal_initial_state(cfg.ic, grid);
  return {grid, std::move(freqs), std::move(spec), std::move(init)};
}

inline StepperConfig stepper_config(const RunConfig& cfg) {
  StepperConfig sc;
  sc.h = cfg.h;
  sc.quadrature = cfg.quadrature_rule();
  sc.fp_tol = cfg.fp_tol;
  sc.fp_max_iters = cfg.fp_max_iters;
  return sc;
}

struct ExperimentResult {
  int exit_code = kOk;
  std::vector<DiagnosticRow> rows;
  double max_abs_dH_rel = 0.0;
  double max_errMI = 0.0;
  double max_errMK = 0.0;
  bool modified_valid = true;
  std::string message;
};

/// Integrates the configured problem to t_end and writes one CSV row per
/// sample. Never throws for solver or I/O failures; they become exit codes.
inline ExperimentResult run_experiment(const RunConfig& cfg, std::ostream& log) {
  ExperimentResult res;
  try {
    Problem prob = build_problem(cfg);
    const StepperConfig sc = stepper_config(cfg);
    try {
      (void)aavf::detail::modification_factors(prob.freqs, cfg.h);
    } catch (const ResonantStepsize& e) {
      res.modified_valid = false;
      log << "warning: resonant step size (mode " << e.mode()
          << "); modified columns written as NaN\n";
    }
    integrate(prob.initial, prob.spec, prob.freqs, prob.grid, sc,
              cfg.n_steps(), cfg.sample_every, cfg.s,
              [&](const DiagnosticRow& row, const State&) {
                res.rows.push_back(row);
              });
  } catch (const NonConvergence& e) {
    res.exit_code = kSolverFailure;
    res.message = std::string("solver failure: ") + e.what();
    log << res.message << '\n';
    return res;
  } catch (const IoError& e) {
    res.exit_code = kIoFailure;
    res.message = e.what();
    log << "I/O error: " << res.message << '\n';
    return res;
  } catch (const Error& e) {
    res.exit_code = kUsage;
    res.message = e.what();
    log << "error: " << res.message << '\n';
    return res;
  }

  for (const auto& r : res.rows) {
    res.max_abs_dH_rel = std::max(res.max_abs_dH_rel, std::abs(r.dH_rel));
    if (!std::isnan(r.errMI)) res.max_errMI = std::max(res.max_errMI, r.errMI);
    if (!std::isnan(r.errMK)) res.max_errMK = std::max(res.max_errMK, r.errMK);
  }
  try {
    emit_csv(res.rows, cfg.output_path);
  } catch (const Error& e) {
    res.exit_code = kIoFailure;
    res.message = e.what();
    log << "I/O error: " << res.message << '\n';
    return res;
  }
  std::ostringstream summary;
  summary.precision(6);
  summary << "rows=" << res.rows.size()
          << " max|dH_rel|=" << res.max_abs_dH_rel
          << " max errMI=" << res.max_errMI << " max errMK=" << res.max_errMK
          << " out=" << cfg.output_path;
  res.message = summary.str();
  log << res.message << '\n';
  return res;
}

/// Resonance parameters for a run; epsilon defaults to the estimate of the
/// initial data.
inline ResonanceParams resonance_params(const RunConfig& cfg,
                                        const Problem& prob) {
  ResonanceParams p;
  p.h = cfg.h;
  p.M = prob.grid.half_modes();
  p.N = cfg.trunc_n;
  p.sigma = cfg.sigma;
  p.C0 = cfg.c0;
  p.epsilon = cfg.epsilon.value_or(
      std::min(1.0, epsilon_estimate(prob.initial, prob.freqs, cfg.s)));
  return p;
}

/// Splits a sweep line of `key=value` tokens into `--key value` arguments.
inline std::vector<std::string> sweep_line_args(const std::string& line) {
  std::vector<std::string> args;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("sweep token '" + tok + "' is not key=value");
    }
    args.push_back("--" + tok.substr(0, eq));
    args.push_back(tok.substr(eq + 1));
  }
  return args;
}

/// Runs every line of a sweep file as an independent experiment, in parallel.
/// Each line must give its own `out=`. Returns the worst exit code.
inline int run_sweep(const std::vector<std::string>& base_args,
                     const std::string& sweep_path, std::ostream& log) {
  std::ifstream is(sweep_path);
  if (!is) {
    log << "I/O error: cannot open sweep file '" << sweep_path << "'\n";
    return kIoFailure;
  }
  std::vector<RunConfig> configs;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') {
      continue;
    }
    auto args = base_args;
    const auto extra = sweep_line_args(line);
    args.insert(args.end(), extra.begin(), extra.end());
    RunConfig cfg = parse_config(args);
    cfg.sweep.reset();
    for (const auto& other : configs) {
      if (other.output_path == cfg.output_path) {
        throw UsageError("sweep runs share output path '" + cfg.output_path +
                         "'");
      }
    }
    configs.push_back(std::move(cfg));
  }
  std::vector<std::future<std::pair<int, std::string>>> jobs;
  for (const auto& cfg : configs) {
    jobs.push_back(std::async(std::launch::async, [cfg] {
      std::ostringstream local;
      const auto r = run_experiment(cfg, local);
      return std::make_pair(r.exit_code, local.str());
    }));
  }
  int worst = kOk;
  for (auto& job : jobs) {
    auto [code, text] = job.get();
    log << text;
    worst = std::max(worst, code);
  }
  return worst;
}

}  // namespace aavf::harness
