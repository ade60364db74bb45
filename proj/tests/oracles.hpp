#pragma once

// Test-only reference computations. Everything here is written against the
// defining formulas with O(M^2) direct sums in long double and shares no code
// path with the library beyond its data types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "aavf/resonance.hpp"
#include "aavf/spectral.hpp"
#include "aavf/system.hpp"

namespace aavf::testing {

using LComplex = std::complex<long double>;

/// Coefficients c_j, j = -M..M-1, stored at index j + M.
using LModes = std::vector<LComplex>;

inline long double node(int k, int m) {
  return static_cast<long double>(k) * std::numbers::pi_v<long double> / m;
}

/// c_j = (1/2M) sum_{k=-M}^{M-1} w_k exp(-i j x_k); w[n] holds k = n - M.
inline LModes direct_dft(const std::vector<long double>& w, int m) {
  LModes c(static_cast<std::size_t>(2 * m));
  for (int j = -m; j < m; ++j) {
    LComplex sum = 0;
    for (int k = -m; k < m; ++k) {
      const long double a = -j * node(k, m);
      sum += w[static_cast<std::size_t>(k + m)] * LComplex(std::cos(a), std::sin(a));
    }
    c[static_cast<std::size_t>(j + m)] = sum / static_cast<long double>(2 * m);
  }
  return c;
}

/// w_k = sum_{j=-M}^{M-1} c_j exp(i j x_k) (merged boundary entry, weight 1).
inline std::vector<LComplex> direct_idft(const LModes& c, int m) {
  std::vector<LComplex> w(static_cast<std::size_t>(2 * m));
  for (int k = -m; k < m; ++k) {
    LComplex sum = 0;
    for (int j = -m; j < m; ++j) {
      const long double a = j * node(k, m);
      sum += c[static_cast<std::size_t>(j + m)] * LComplex(std::cos(a), std::sin(a));
    }
    w[static_cast<std::size_t>(k + m)] = sum;
  }
  return w;
}

inline LModes to_long(const ModeVector& v) {
  const int m = v.half_modes();
  LModes out(static_cast<std::size_t>(2 * m));
  for (int j = -m; j < m; ++j) out[static_cast<std::size_t>(j + m)] = LComplex(v[j]);
  return out;
}

inline ModeVector from_long(const LModes& c, int m) {
  ModeVector out(m);
  for (int j = -m; j < m; ++j) {
    const auto z = c[static_cast<std::size_t>(j + m)];
    out[j] = Complex(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  return out;
}

/// 5-point Gauss-Legendre on [0, 1]; exact for polynomials of degree <= 9.
inline long double segment_average_gl5(const std::vector<double>& g_coeffs,
                                       long double a, long double b) {
  static const long double x[5] = {
      0.0L, -0.538469310105683091036314420700208805L,
      0.538469310105683091036314420700208805L,
      -0.906179845938663992797626878299392965L,
      0.906179845938663992797626878299392965L};
  static const long double w[5] = {
      0.568888888888888888888888888888888889L,
      0.478628670499366468041291514835638192L,
      0.478628670499366468041291514835638192L,
      0.236926885056189087514264040719917363L,
      0.236926885056189087514264040719917363L};
  long double total = 0;
  for (int i = 0; i < 5; ++i) {
    const long double s = 0.5L * (1.0L + x[i]);
    const long double u = (1 - s) * a + s * b;
    long double g = 0, pw = 1;
    for (double c : g_coeffs) {
      g += c * pw;
      pw *= u;
    }
    total += 0.5L * w[i] * g;
  }
  return total;
}

/// AAVF step with exact segment integrals, iterated in long double to a
/// relative update of `tol`; p1 and the last q-update use the integral at the
/// converged q1.
struct OracleStep {
  LModes q, p;
  int iterations = 0;
};

inline OracleStep aavf_step_oracle(const State& s, const SystemSpec& spec,
                                   double rho, double h, long double tol,
                                   int max_iters) {
  const int m = s.half_modes();
  const auto n = static_cast<std::size_t>(2 * m);
  const LModes q0 = to_long(s.q), p0 = to_long(s.p);
  std::vector<long double> w(n), c0(n), s1(n), s2(n);
  for (int j = -m; j < m; ++j) {
    const auto i = static_cast<std::size_t>(j + m);
    w[i] = std::sqrt(static_cast<long double>(rho) + static_cast<long double>(j) * j);
    const long double th = h * w[i];
    c0[i] = std::cos(th);
    s1[i] = std::sin(th) / w[i];               // h phi1
    const long double sh = std::sin(th / 2);
    s2[i] = 2 * sh * sh / (w[i] * w[i]);       // h^2 phi2
  }
  auto to_real = [&](const LModes& c) {
    const auto z = direct_idft(c, m);
    std::vector<long double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = z[i].real();
    return r;
  };
  const auto a = to_real(q0);
  auto integral = [&](const LModes& q1) {
    const auto b = to_real(q1);
    std::vector<long double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = -segment_average_gl5(spec.g_coeffs(), a[i], b[i]);
    }
    return direct_dft(g, m);
  };
  LModes base(n), q(n);
  long double scale = 0;
  for (std::size_t i = 0; i < n; ++i) {
    base[i] = c0[i] * q0[i] + s1[i] * p0[i];
    scale = std::max(scale, std::abs(q0[i]));
  }
  q = base;
  OracleStep out;
  LModes F;
  for (int it = 0; it < max_iters; ++it) {
    F = integral(q);
    long double res = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const LComplex next = base[i] + s2[i] * F[i];
      res = std::max(res, std::abs(next - q[i]));
      q[i] = next;
    }
    out.iterations = it + 1;
    if (res <= tol * scale) break;
  }
  F = integral(q);
  out.q.resize(n);
  out.p.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.q[i] = base[i] + s2[i] * F[i];
    out.p[i] = -w[i] * std::sin(static_cast<long double>(h) * w[i]) * q0[i] +
               c0[i] * p0[i] + s1[i] * F[i];
  }
  return out;
}

// Box enumeration over [-2N, 2N]^{M+1} with the inequality written out inline.
inline std::vector<NearResonantPair> near_resonant_brute_force(
    double rho, const ResonanceParams& p) {
  auto w = [rho](int l) { return std::sqrt(static_cast<long double>(rho) + 1.0L * l * l); };
  const int dim = p.M + 1, b = 2 * p.N, width = 2 * b + 1;
  long long total = 1;
  for (int i = 0; i < dim; ++i) total *= width;
  std::vector<NearResonantPair> out;
  for (int j = -p.M; j <= p.M; ++j) {
    const long double wj = w(j);
    for (long long code = 0; code < total; ++code) {
      std::vector<int> k(static_cast<std::size_t>(dim));
      long long c = code;
      int norm = 0;
      long double kw = 0;
      for (int l = 0; l < dim; ++l) {
        k[static_cast<std::size_t>(l)] = static_cast<int>(c % width) - b;
        c /= width;
        norm += std::abs(k[static_cast<std::size_t>(l)]);
        kw += k[static_cast<std::size_t>(l)] * w(l);
      }
      if (norm > b) continue;
      bool is_unit = true;
      for (int l = 0; l < dim; ++l) {
        const int want = l == std::abs(j) ? 1 : 0;
        if (std::abs(k[static_cast<std::size_t>(l)]) != want) is_unit = false;
      }
      if (is_unit && norm == 1) continue;
      const long double lhs =
          std::fabs(std::sin(0.5L * p.h * (wj - kw)) * std::sin(0.5L * p.h * (wj + kw)));
      const long double rhs =
          std::sqrt(static_cast<long double>(p.epsilon)) * p.h * p.h * (wj + std::fabs(kw));
      if (lhs < rhs) out.push_back({j, KVector(k)});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace aavf::testing
