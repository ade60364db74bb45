#pragma once

// The semi-discrete wave system q'' + Omega^2 q = f(q), f(q) = -F g(F^{-1} q),
// with its energy, momentum, actions and the step-size dependent modified
// momentum and actions.

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "aavf/errors.hpp"
#include "aavf/phi.hpp"
#include "aavf/spectral.hpp"

namespace aavf {

/// rho together with the nonlinearity g and its potential U (U' = g, U(0) = 0).
///
/// Polynomial nonlinearities are the normal case; an arbitrary callable pair
/// is accepted too but cannot be integrated exactly along a segment.
class SystemSpec {
 public:
  /// `g_coeffs[m]` multiplies u^m. Constant and linear terms must vanish.
  SystemSpec(double rho, std::vector<double> g_coeffs)
      : rho_(rho), g_(std::move(g_coeffs)) {
    if (!(rho > 0.0)) throw InvalidParameter("rho must be positive");
    for (std::size_t m = 0; m < g_.size() && m < 2; ++m) {
      if (g_[m] != 0.0) {
        throw InvalidParameter("g must satisfy g(0) = g'(0) = 0");
      }
    }
    while (!g_.empty() && g_.back() == 0.0) g_.pop_back();
    u_.assign(g_.size() + 1, 0.0);
    for (std::size_t m = 0; m < g_.size(); ++m) u_[m + 1] = g_[m] / (m + 1.0);
  }

  /// From the coefficients of u^2, u^3, ... (the command-line form).
  static SystemSpec from_higher_order(double rho,
                                      const std::vector<double>& c2_up) {
    std::vector<double> g(2, 0.0);
    g.insert(g.end(), c2_up.begin(), c2_up.end());
    return SystemSpec(rho, std::move(g));
  }

  /// g(u) = -u^2, the standard test nonlinearity.
  static SystemSpec quadratic(double rho) { return SystemSpec(rho, {0, 0, -1}); }

  static SystemSpec linear(double rho) { return SystemSpec(rho, {}); }

  static SystemSpec custom(double rho, std::function<double(double)> g,
                           std::function<double(double)> potential) {
    SystemSpec s(rho, {});
    s.g_fn_ = std::move(g);
    s.u_fn_ = std::move(potential);
    return s;
  }

  double rho() const { return rho_; }
  bool is_polynomial() const { return !g_fn_; }
  /// Highest power of g; 0 when g vanishes identically.
  int degree() const { return g_.empty() ? 0 : static_cast<int>(g_.size()) - 1; }
  const std::vector<double>& g_coeffs() const { return g_; }
  const std::vector<double>& potential_coeffs() const { return u_; }

  double g(double u) const { return g_fn_ ? g_fn_(u) : horner(g_, u); }
  double potential(double u) const { return u_fn_ ? u_fn_(u) : horner(u_, u); }

  /// Exact pointwise int_0^1 g((1-s)a + s b) ds for polynomial g, using
  /// int_0^1 ((1-s)a + s b)^m ds = sum_{i<=m} a^i b^{m-i} / (m+1).
  double segment_average(double a, double b) const {
    if (g_fn_) {
      throw InvalidParameter(
          "exact segment integral requires a polynomial nonlinearity");
    }
    double total = 0.0;
    double sym = 1.0;  // sum_{i<=m} a^i b^{m-i}
    double a_pow = 1.0;
    for (std::size_t m = 1; m < g_.size(); ++m) {
      a_pow *= a;
      sym = b * sym + a_pow;
      if (g_[m] != 0.0) total += g_[m] * sym / (m + 1.0);
    }
    return total;
  }

 private:
  static double horner(const std::vector<double>& c, double u) {
    double r = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * u + *it;
    return r;
  }

  double rho_;
  std::vector<double> g_;
  std::vector<double> u_;
  std::function<double(double)> g_fn_;
  std::function<double(double)> u_fn_;
};

/// Positions q and velocities p in frequency space at time t.
struct State {
  ModeVector q;
  ModeVector p;
  double t = 0.0;

  State() = default;
  explicit State(int half_modes) : q(half_modes), p(half_modes) {}
  State(ModeVector q_, ModeVector p_, double t_ = 0.0)
      : q(std::move(q_)), p(std::move(p_)), t(t_) {
    if (q.half_modes() != p.half_modes()) {
      throw InvalidInput("q and p have different lengths");
    }
  }

  int half_modes() const { return q.half_modes(); }
};

/// f(q) = -dft(g(idft q)).
inline ModeVector apply_nonlinearity(const ModeVector& q, const SystemSpec& spec,
                                     const Grid& grid) {
  NodalField u = idft(q, grid);
  for (auto& v : u.values) v = -spec.g(v);
  return dft(u, grid);
}

/// V(q) = (1/2M) sum_k U(u_k).
inline double potential_energy(const ModeVector& q, const SystemSpec& spec,
                               const Grid& grid) {
  const NodalField u = idft(q, grid);
  double sum = 0.0;
  for (double v : u.values) sum += spec.potential(v);
  return sum / static_cast<double>(grid.size());
}

/// H_M = (1/2) sum'_j (|p_j|^2 + omega_j^2 |q_j|^2) + V(q).
inline double energy(const State& state, const SystemSpec& spec,
                     const FrequencyTable& freqs, const Grid& grid) {
  const int m = state.half_modes();
  double quad = 0.0;
  for (int j = -m; j < m; ++j) {
    const double w = freqs(j);
    quad += std::norm(state.p[j]) + w * w * std::norm(state.q[j]);
  }
  return 0.5 * quad + potential_energy(state.q, spec, grid);
}

namespace detail {

// -sum''_j i j factor(j) q_{-j} p_j. The two quarter-weighted boundary terms
// j = +-M cancel for real fields, so the merged entry contributes nothing.
template <typename Factor>
double weighted_momentum(const State& state, Factor factor) {
  const int m = state.half_modes();
  Complex sum = 0.0;
  double magnitude = 0.0;
  for (int j = -m + 1; j < m; ++j) {
    const Complex term =
        Complex(0.0, -static_cast<double>(j) * factor(j)) * state.q[-j] *
        state.p[j];
    sum += term;
    magnitude += std::abs(term);
  }
  if (std::abs(sum.imag()) > 1e-12 * magnitude) {
    throw SymmetryViolation("momentum has imaginary residual " +
                                std::to_string(sum.imag()),
                            std::abs(sum.imag()));
  }
  return sum.real();
}

}  // namespace detail

/// K = -sum''_j i j q_{-j} p_j.
inline double momentum(const State& state) {
  return detail::weighted_momentum(state, [](int) { return 1.0; });
}

/// I_l = omega_l/2 |q_l|^2 + 1/(2 omega_l) |p_l|^2 for l = 0..M.
inline std::vector<double> actions(const State& state,
                                   const FrequencyTable& freqs) {
  const int m = state.half_modes();
  std::vector<double> out(static_cast<std::size_t>(m) + 1);
  for (int l = 0; l <= m; ++l) {
    const double w = freqs(l);
    out[static_cast<std::size_t>(l)] =
        0.5 * w * std::norm(state.q[l]) + 0.5 / w * std::norm(state.p[l]);
  }
  return out;
}

/// cos(h omega/2) / sinc(h omega/2); throws ResonantStepsize when
/// |sinc(h omega/2)| < 1e-8.
inline double modification_factor(double h, double omega) {
  const double x = 0.5 * h * omega;
  const double s = sinc(x);
  if (std::abs(s) < 1e-8) {
    throw ResonantStepsize("sinc(h omega/2) vanishes for omega = " +
                               std::to_string(omega),
                           -1);
  }
  return std::cos(x) / s;
}

namespace detail {

inline std::vector<double> modification_factors(const FrequencyTable& freqs,
                                                double h) {
  std::vector<double> out;
  out.reserve(freqs.values().size());
  for (std::size_t l = 0; l < freqs.values().size(); ++l) {
    try {
      out.push_back(modification_factor(h, freqs.values()[l]));
    } catch (const ResonantStepsize& e) {
      throw ResonantStepsize(e.what(), static_cast<int>(l));
    }
  }
  return out;
}

}  // namespace detail

inline std::vector<double> modified_actions(const State& state,
                                            const FrequencyTable& freqs,
                                            double h) {
  const auto factors = detail::modification_factors(freqs, h);
  auto out = actions(state, freqs);
  for (std::size_t l = 0; l < out.size(); ++l) out[l] *= factors[l];
  return out;
}

inline double modified_momentum(const State& state, const FrequencyTable& freqs,
                                double h) {
  const auto factors = detail::modification_factors(freqs, h);
  return detail::weighted_momentum(state, [&](int j) {
    return factors[static_cast<std::size_t>(std::abs(j))];
  });
}

/// Displacement and velocity profiles of the standard long-time experiment.
inline double initial_displacement(double x) {
  const double y = x / std::numbers::pi;
  return 0.1 * (y - 1) * (y - 1) * (y - 1) * (y + 1) * (y + 1);
}

inline double initial_velocity(double x) {
  const double y = x / std::numbers::pi;
  return 0.01 * y * (y - 1) * (y + 1) * (y + 1);
}

inline State initial_state(const Grid& grid, const FrequencyTable& freqs) {
  if (freqs.half_modes() != grid.half_modes()) {
    throw InvalidInput("frequency table and grid disagree on M");
  }
  NodalField u(static_cast<std::size_t>(grid.size()));
  NodalField v(static_cast<std::size_t>(grid.size()));
  for (int n = 0; n < grid.size(); ++n) {
    const double x = grid.node_at_slot(n);
    u[static_cast<std::size_t>(n)] = initial_displacement(x);
    v[static_cast<std::size_t>(n)] = initial_velocity(x);
  }
  return State(dft(u, grid), dft(v, grid), 0.0);
}

/// (||q||_{s+1}^2 + ||p||_s^2)^{1/2}, the smallness parameter of the data.
inline double epsilon_estimate(const State& state, const FrequencyTable& freqs,
                               double s) {
  const double a = sobolev_norm(state.q, freqs, s + 1.0);
  const double b = sobolev_norm(state.p, freqs, s);
  return std::sqrt(a * a + b * b);
}

/// Relative drifts of momentum and actions against a reference state.
struct DriftValues {
  double errK = 0.0;
  double errMK = 0.0;
  double errI = 0.0;
  double errMI = 0.0;
  /// Momentum errors are absolute because |K(ref)| < 1e-30.
  bool momentum_absolute = false;
  /// The modified pair is NaN because the step size is resonant.
  bool modified_valid = true;
};

namespace detail {

inline double relative_or_absolute(double value, double ref, bool& absolute) {
  const double diff = std::abs(value - ref);
  if (std::abs(ref) < 1e-30) {
    absolute = true;
    return diff;
  }
  return diff / std::abs(ref);
}

inline double weighted_action_drift(const std::vector<double>& now,
                                    const std::vector<double>& ref,
                                    const std::vector<double>& weights) {
  double num = 0.0, den = 0.0;
  for (std::size_t l = 0; l < now.size(); ++l) {
    num += weights[l] * std::abs(now[l] - ref[l]);
    den += weights[l] * std::abs(ref[l]);
  }
  if (den == 0.0) return num;
  return num / den;
}

}  // namespace detail

/// errK, errMK, errI, errMI with action weights omega_l^{2s+1}.
inline DriftValues drift_functionals(const State& state, const State& ref,
                                     const FrequencyTable& freqs, double h,
                                     double s) {
  DriftValues d;
  bool abs_k = false;
  d.errK = detail::relative_or_absolute(momentum(state), momentum(ref), abs_k);

  std::vector<double> weights;
  weights.reserve(freqs.values().size());
  for (double w : freqs.values()) weights.push_back(std::pow(w, 2.0 * s + 1.0));
  d.errI = detail::weighted_action_drift(actions(state, freqs),
                                         actions(ref, freqs), weights);
  try {
    d.errMK = detail::relative_or_absolute(modified_momentum(state, freqs, h),
                                           modified_momentum(ref, freqs, h),
                                           abs_k);
    d.errMI = detail::weighted_action_drift(modified_actions(state, freqs, h),
                                            modified_actions(ref, freqs, h),
                                            weights);
  } catch (const ResonantStepsize&) {
    d.errMK = d.errMI = std::numeric_limits<double>::quiet_NaN();
    d.modified_valid = false;
  }
  d.momentum_absolute = abs_k;
  return d;
}

/// One sampled time of a trajectory.
struct DiagnosticRow {
  double t = 0.0;
  double H = 0.0;
  double dH_rel = 0.0;
  double K = 0.0;
  double Khat = 0.0;
  double errK = 0.0;
  double errMK = 0.0;
  double errI = 0.0;
  double errMI = 0.0;

  bool operator==(const DiagnosticRow&) const = default;
};

/// Produces DiagnosticRows against a fixed reference state.
class DriftMonitor {
 public:
  DriftMonitor(State ref, SystemSpec spec, FrequencyTable freqs, Grid grid,
               double h, double s)
      : ref_(std::move(ref)),
        spec_(std::move(spec)),
        freqs_(std::move(freqs)),
        grid_(grid),
        h_(h),
        s_(s),
        h0_(energy(ref_, spec_, freqs_, grid_)) {}

  DiagnosticRow row(const State& state) const {
    DiagnosticRow r;
    r.t = state.t;
    r.H = energy(state, spec_, freqs_, grid_);
    r.dH_rel = (r.H - h0_) / std::max(1.0, std::abs(h0_));
    r.K = momentum(state);
    try {
      r.Khat = modified_momentum(state, freqs_, h_);
    } catch (const ResonantStepsize&) {
      r.Khat = std::numeric_limits<double>::quiet_NaN();
    }
    const DriftValues d = drift_functionals(state, ref_, freqs_, h_, s_);
    r.errK = d.errK;
    r.errMK = d.errMK;
    r.errI = d.errI;
    r.errMI = d.errMI;
    return r;
  }

  double initial_energy() const { return h0_; }

 private:
  State ref_;
  SystemSpec spec_;
  FrequencyTable freqs_;
  Grid grid_;
  double h_;
  double s_;
  double h0_;
};

}  // namespace aavf
