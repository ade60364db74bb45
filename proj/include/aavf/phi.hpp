#pragma once

// phi_l(v) = sum_k (-1)^k v^k / (2k+l)!, l = 0, 1, 2, the scalar functions of
// v = (h omega)^2 that build the trigonometric step:
//   phi_0 = cos(sqrt v), phi_1 = sin(sqrt v)/sqrt v, phi_2 = (1 - cos sqrt v)/v.

#include <cmath>
#include <string>

#include "aavf/errors.hpp"

namespace aavf {

/// Below this argument the truncated series is used.
inline constexpr double kPhiSeriesCutoff = 1e-4;

/// Truncated series through k = 4.
inline double phi_series(int l, double v) {
  double fact = 1.0;  // (2k+l)!
  for (int i = 2; i <= l; ++i) fact *= i;
  double term = 1.0 / fact;
  double sum = term;
  for (int k = 1; k <= 4; ++k) {
    const int a = 2 * k + l - 1, b = 2 * k + l;
    term *= -v / (static_cast<double>(a) * b);
    sum += term;
  }
  return sum;
}

/// Closed forms; phi_2 uses 2 sin^2(x/2)/x^2 to avoid cancellation.
inline double phi_closed(int l, double v) {
  const double x = std::sqrt(v);
  switch (l) {
    case 0:
      return std::cos(x);
    case 1:
      return std::sin(x) / x;
    default: {
      const double s = std::sin(0.5 * x);
      return 2.0 * s * s / v;
    }
  }
}

inline double phi(int l, double v) {
  if (l < 0 || l > 2) {
    throw InvalidParameter("phi index must be 0, 1 or 2, got " +
                           std::to_string(l));
  }
  if (!(v >= 0.0)) throw InvalidParameter("phi argument must be nonnegative");
  return v < kPhiSeriesCutoff ? phi_series(l, v) : phi_closed(l, v);
}

/// sin(x)/x with sinc(0) = 1.
inline double sinc(double x) { return phi(1, x * x); }

}  // namespace aavf
