#pragma once

// Adapted average vector field (AAVF) stepping for q'' + Omega^2 q = f(q):
//
//   q1 = phi0 q0 + h phi1 p0 + h^2 phi2 F,
//   p1 = -h Omega^2 phi1 q0 + phi0 p0 + h phi1 F,
//   F  = int_0^1 f((1-s) q0 + s q1) ds,
//
// with phi_l evaluated at (h Omega)^2. The implicit q-equation is solved by
// fixed-point iteration and p1 reuses the F of the last iterate.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "aavf/errors.hpp"
#include "aavf/phi.hpp"
#include "aavf/quadrature.hpp"
#include "aavf/spectral.hpp"
#include "aavf/system.hpp"

namespace aavf {

struct StepperConfig {
  double h = 0.05;
  Quadrature quadrature = Quadrature::exact();
  double fp_tol = 1e-13;
  int fp_max_iters = 100;
  /// When false, running out of iterations returns the last iterate instead
  /// of throwing. Only meant for negative controls.
  bool require_convergence = true;

  void validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw InvalidParameter("step size must be positive");
    }
    if (!(fp_tol > 0.0) || !(fp_tol < 1e-6)) {
      throw InvalidParameter("fixed-point tolerance must lie in (0, 1e-6)");
    }
    if (fp_max_iters < 1) {
      throw InvalidParameter("fixed-point iteration cap must be >= 1");
    }
  }
};

/// Per-mode coefficients of the step for one h, indexed by l = |j|.
struct PhiTable {
  double h = 0.0;
  std::vector<double> cos_h;       // phi0(h^2 w^2) = cos(h w)
  std::vector<double> h_phi1;      // h phi1 = sin(h w) / w
  std::vector<double> h2_phi2;     // h^2 phi2 = (1 - cos(h w)) / w^2
  std::vector<double> w_sin;       // h w^2 phi1 = w sin(h w)
  std::vector<double> phi1;        // sinc(h w)
  std::vector<double> phi2;

  PhiTable(const FrequencyTable& freqs, double step) : h(step) {
    const auto n = freqs.values().size();
    cos_h.resize(n);
    h_phi1.resize(n);
    h2_phi2.resize(n);
    w_sin.resize(n);
    phi1.resize(n);
    phi2.resize(n);
    for (std::size_t l = 0; l < n; ++l) {
      const double w = freqs.values()[l];
      const double v = h * h * w * w;
      cos_h[l] = phi(0, v);
      phi1[l] = phi(1, v);
      phi2[l] = phi(2, v);
      h_phi1[l] = h * phi1[l];
      h2_phi2[l] = h * h * phi2[l];
      w_sin[l] = h * w * w * phi1[l];
    }
  }
};

namespace detail {

// Nodal values of -int_0^1 g((1-s) a + s b) ds.
inline NodalField avf_nodal(const NodalField& a, const NodalField& b,
                            const SystemSpec& spec, const Quadrature& quad) {
  NodalField out(a.size());
  switch (quad.kind()) {
    case Quadrature::Kind::kExactPolynomial:
      for (std::size_t k = 0; k < a.size(); ++k) {
        out[k] = -spec.segment_average(a[k], b[k]);
      }
      break;
    case Quadrature::Kind::kMidpoint:
      for (std::size_t k = 0; k < a.size(); ++k) {
        out[k] = -spec.g(0.5 * (a[k] + b[k]));
      }
      break;
    case Quadrature::Kind::kGauss: {
      const auto& x = quad.nodes();
      const auto& w = quad.weights();
      for (std::size_t k = 0; k < a.size(); ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          acc += w[i] * spec.g((1.0 - x[i]) * a[k] + x[i] * b[k]);
        }
        out[k] = -acc;
      }
      break;
    }
  }
  return out;
}

}  // namespace detail

/// int_0^1 f((1-s) qa + s qb) ds under the given rule.
inline ModeVector avf_integral(const ModeVector& qa, const ModeVector& qb,
                               const SystemSpec& spec, const Grid& grid,
                               const Quadrature& quad) {
  return dft(detail::avf_nodal(idft(qa, grid), idft(qb, grid), spec, quad),
             grid);
}

/// Reusable AAVF stepper for one system and step size.
class AavfStepper {
 public:
  AavfStepper(SystemSpec spec, FrequencyTable freqs, Grid grid,
              StepperConfig cfg)
      : spec_(std::move(spec)),
        freqs_(std::move(freqs)),
        grid_(grid),
        cfg_(std::move(cfg)),
        table_(freqs_, cfg_.h) {
    if (cfg_.h == 0.0 || !std::isfinite(cfg_.h)) {
      throw InvalidParameter("step size must be finite and nonzero");
    }
    if (cfg_.quadrature.kind() == Quadrature::Kind::kExactPolynomial &&
        !spec_.is_polynomial()) {
      throw InvalidParameter("exact quadrature needs a polynomial g");
    }
    if (freqs_.half_modes() != grid_.half_modes()) {
      throw InvalidInput("frequency table and grid disagree on M");
    }
  }

  /// Advances one step of size cfg.h (negative h steps backwards).
  State step(const State& s) {
    const int m = grid_.half_modes();
    if (s.half_modes() != m) throw InvalidInput("state does not match grid");
    const auto slots = s.q.size();

    // Linear predictor phi0 q0 + h phi1 p0, also the fixed-point seed.
    ModeVector base(m);
    for (std::size_t i = 0; i < slots; ++i) {
      const auto l = static_cast<std::size_t>(s.q.mode_of_slot(i));
      base.slots()[i] = table_.cos_h[l] * s.q.slots()[i] +
                        table_.h_phi1[l] * s.p.slots()[i];
    }

    const NodalField start = idft(s.q, grid_);
    const double scale = std::max(s.q.max_abs(), base.max_abs());
    ModeVector current = base;
    ModeVector integral(m);
    double residual = 0.0;
    bool converged = false;
    int iters = 0;
    while (iters < cfg_.fp_max_iters) {
      ++iters;
      integral = dft(
          detail::avf_nodal(start, idft(current, grid_), spec_, cfg_.quadrature),
          grid_);
      residual = 0.0;
      for (std::size_t i = 0; i < slots; ++i) {
        const auto l = static_cast<std::size_t>(s.q.mode_of_slot(i));
        const Complex next =
            base.slots()[i] + table_.h2_phi2[l] * integral.slots()[i];
        residual = std::max(residual, std::abs(next - current.slots()[i]));
        current.slots()[i] = next;
      }
      if (residual <= cfg_.fp_tol * scale) {
        converged = true;
        break;
      }
    }
    last_iterations_ = iters;
    last_residual_ = scale > 0.0 ? residual / scale : residual;
    if (!converged && cfg_.require_convergence) {
      throw NonConvergence("fixed-point iteration did not converge after " +
                               std::to_string(iters) + " iterations",
                           last_residual_);
    }

    State out(m);
    out.q = std::move(current);
    for (std::size_t i = 0; i < slots; ++i) {
      const auto l = static_cast<std::size_t>(s.q.mode_of_slot(i));
      out.p.slots()[i] = -table_.w_sin[l] * s.q.slots()[i] +
                         table_.cos_h[l] * s.p.slots()[i] +
                         table_.h_phi1[l] * integral.slots()[i];
    }
    out.t = s.t + cfg_.h;
    return out;
  }

  int last_iterations() const { return last_iterations_; }
  /// Final fixed-point update size relative to max(|q0|, |predictor|).
  double last_residual() const { return last_residual_; }

  const StepperConfig& config() const { return cfg_; }
  const PhiTable& phi_table() const { return table_; }
  const SystemSpec& spec() const { return spec_; }
  const FrequencyTable& frequencies() const { return freqs_; }
  const Grid& grid() const { return grid_; }

 private:
  SystemSpec spec_;
  FrequencyTable freqs_;
  Grid grid_;
  StepperConfig cfg_;
  PhiTable table_;
  int last_iterations_ = 0;
  double last_residual_ = 0.0;
};

inline State aavf_step(const State& state, const SystemSpec& spec,
                       const FrequencyTable& freqs, const Grid& grid,
                       const StepperConfig& cfg) {
  AavfStepper stepper(spec, freqs, grid, cfg);
  return stepper.step(state);
}

/// Exact flow of the linear system (g = 0): a rotation by h omega_j in every
/// (omega_j q_j, p_j) plane.
inline State exact_linear_step(const State& state, const FrequencyTable& freqs,
                               double h) {
  const int m = state.half_modes();
  State out(m);
  for (std::size_t i = 0; i < state.q.size(); ++i) {
    const int l = state.q.mode_of_slot(i);
    const double w = freqs(l);
    const double c = std::cos(h * w), sn = std::sin(h * w);
    const Complex q = state.q.slots()[i], p = state.p.slots()[i];
    out.q.slots()[i] = c * q + (sn / w) * p;
    out.p.slots()[i] = -w * sn * q + c * p;
  }
  out.t = state.t + h;
  return out;
}

/// max_j |q1 - q0 - tan(h w_j/2)/w_j (p1 + p0)| / max|q0|.
inline double qp_relation_residual(const State& prev, const State& next,
                                   const FrequencyTable& freqs, double h) {
  const int m = prev.half_modes();
  std::vector<double> tan_over_w(static_cast<std::size_t>(m) + 1);
  for (int l = 0; l <= m; ++l) {
    const double w = freqs(l);
    const double half = 0.5 * h * w;
    if (std::abs(std::cos(half)) < 1e-8) {
      throw ResonantStepsize("cos(h omega/2) vanishes in mode " +
                                 std::to_string(l),
                             l);
    }
    tan_over_w[static_cast<std::size_t>(l)] = std::tan(half) / w;
  }
  double r = 0.0;
  for (std::size_t i = 0; i < prev.q.size(); ++i) {
    const auto l = static_cast<std::size_t>(prev.q.mode_of_slot(i));
    const Complex d = next.q.slots()[i] - prev.q.slots()[i] -
                      tan_over_w[l] * (next.p.slots()[i] + prev.p.slots()[i]);
    r = std::max(r, std::abs(d));
  }
  const double scale = prev.q.max_abs();
  return scale > 0.0 ? r / scale : r;
}

using Observer = std::function<void(const DiagnosticRow&, const State&)>;

/// Runs n_steps AAVF steps, reporting every sample_every steps (and at t0).
/// Times are t0 + n h, not accumulated sums. Returns the final state.
inline State integrate(const State& initial, const SystemSpec& spec,
                       const FrequencyTable& freqs, const Grid& grid,
                       const StepperConfig& cfg, std::int64_t n_steps,
                       std::int64_t sample_every, double s,
                       const Observer& observer) {
  if (n_steps < 0) throw InvalidParameter("negative step count");
  if (sample_every < 1) throw InvalidParameter("sample_every must be >= 1");
  AavfStepper stepper(spec, freqs, grid, cfg);
  const DriftMonitor monitor(initial, spec, freqs, grid, cfg.h, s);
  const double t0 = initial.t;
  State state = initial;
  if (observer) observer(monitor.row(state), state);
  for (std::int64_t n = 1; n <= n_steps; ++n) {
    try {
      state = stepper.step(state);
    } catch (const NonConvergence& e) {
      throw NonConvergence(std::string(e.what()) + " at step " +
                               std::to_string(n),
                           e.residual(), n);
    }
    state.t = t0 + static_cast<double>(n) * cfg.h;
    if (observer && n % sample_every == 0) observer(monitor.row(state), state);
  }
  return state;
}

}  // namespace aavf
