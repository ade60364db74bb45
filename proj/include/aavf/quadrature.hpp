#pragma once

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "aavf/errors.hpp"

namespace aavf {

/// Rule used for the averaged-vector-field integral over sigma in [0, 1].
class Quadrature {
 public:
  enum class Kind { kExactPolynomial, kMidpoint, kGauss };

  static Quadrature exact() { return Quadrature(Kind::kExactPolynomial, 0); }
  static Quadrature midpoint() { return Quadrature(Kind::kMidpoint, 1); }
  static Quadrature gauss(int points) {
    if (points < 1) {
      throw InvalidParameter("Gauss rule needs at least one point");
    }
    return Quadrature(Kind::kGauss, points);
  }

  /// Accepts "exact", "midpoint" or "gauss:<n>".
  static Quadrature parse(std::string_view text) {
    if (text == "exact") return exact();
    if (text == "midpoint") return midpoint();
    constexpr std::string_view prefix = "gauss:";
    if (text.substr(0, prefix.size()) == prefix) {
      const auto digits = text.substr(prefix.size());
      int n = 0;
      const auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), n);
      if (ec == std::errc() && ptr == digits.data() + digits.size() && n >= 1) {
        return gauss(n);
      }
    }
    throw ParseError("unknown quadrature '" + std::string(text) +
                     "' (expected exact, midpoint or gauss:<n>)");
  }

  Kind kind() const { return kind_; }
  int points() const { return static_cast<int>(nodes_.size()); }

  /// Nodes on [0, 1]; empty for the exact rule.
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  std::string to_string() const {
    switch (kind_) {
      case Kind::kExactPolynomial:
        return "exact";
      case Kind::kMidpoint:
        return "midpoint";
      default:
        return "gauss:" + std::to_string(points());
    }
  }

  bool operator==(const Quadrature& o) const {
    return kind_ == o.kind_ && nodes_.size() == o.nodes_.size();
  }

 private:
  Quadrature(Kind kind, int points) : kind_(kind) {
    if (kind == Kind::kMidpoint) {
      nodes_ = {0.5};
      weights_ = {1.0};
    } else if (kind == Kind::kGauss) {
      gauss_legendre(points);
    }
  }

  // Newton iteration on P_n from the Chebyshev-like initial guesses, then
  // mapped from [-1, 1] to [0, 1].
  void gauss_legendre(int n) {
    nodes_.assign(static_cast<std::size_t>(n), 0.0);
    weights_.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        if (n == 1) p0 = 1.0;
        const double pn = (n == 1) ? x : p1;
        dp = n * (x * pn - p0) / (x * x - 1.0);
        const double dx = pn / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      const auto lo = static_cast<std::size_t>(i);
      const auto hi = static_cast<std::size_t>(n - 1 - i);
      nodes_[lo] = 0.5 * (1.0 - x);
      nodes_[hi] = 0.5 * (1.0 + x);
      weights_[lo] = weights_[hi] = 0.5 * w;
    }
    if (n % 2 == 1) nodes_[static_cast<std::size_t>(n / 2)] = 0.5;
  }

  Kind kind_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace aavf
