#pragma once

// Evaluation of the non-resonance inequalities for a given step size and the
// enumeration of near-resonant index pairs (j, k).
//
// k = (k_0, ..., k_M) is an integer vector over the mode magnitudes,
// ||k|| = sum |k_l| and k.omega = sum k_l omega_l. <j> is the unit vector at
// position |j|.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "aavf/errors.hpp"
#include "aavf/phi.hpp"
#include "aavf/spectral.hpp"

namespace aavf {

struct ResonanceParams {
  double epsilon = 1e-2;
  double h = 0.05;
  int N = 1;        // truncation number; k is enumerated up to ||k|| <= 2N
  int M = 1;
  double sigma = 1.0;
  double C0 = 1.0;

  void validate() const {
    if (N < 1) throw InvalidParameter("truncation number N must be >= 1");
    if (!(epsilon >= 0.0) || epsilon > 1.0) {
      throw InvalidParameter("epsilon must lie in [0, 1]");
    }
    if (!(h > 0.0)) throw InvalidParameter("step size must be positive");
    if (M < 0) throw InvalidParameter("M must be nonnegative");
  }
};

class KVector {
 public:
  KVector() = default;
  explicit KVector(std::vector<int> k) : k_(std::move(k)) {}

  /// The unit vector <j> of length M + 1.
  static KVector unit(int j, int half_modes) {
    std::vector<int> k(static_cast<std::size_t>(half_modes) + 1, 0);
    k[static_cast<std::size_t>(std::abs(j))] = 1;
    return KVector(std::move(k));
  }

  const std::vector<int>& entries() const { return k_; }
  int operator[](std::size_t l) const { return k_[l]; }
  std::size_t size() const { return k_.size(); }

  int norm() const {
    int n = 0;
    for (int v : k_) n += std::abs(v);
    return n;
  }

  double dot(const FrequencyTable& freqs) const {
    double s = 0.0;
    for (std::size_t l = 0; l < k_.size(); ++l) {
      s += k_[l] * freqs(static_cast<int>(l));
    }
    return s;
  }

  KVector operator-() const {
    auto k = k_;
    for (auto& v : k) v = -v;
    return KVector(std::move(k));
  }

  auto operator<=>(const KVector&) const = default;

 private:
  std::vector<int> k_;
};

struct NearResonantPair {
  int j;
  KVector k;
  auto operator<=>(const NearResonantPair&) const = default;
};

namespace detail {

inline double sine_product(double h, double omega_j, double k_dot_omega) {
  return std::abs(std::sin(0.5 * h * (omega_j - k_dot_omega)) *
                  std::sin(0.5 * h * (omega_j + k_dot_omega)));
}

inline void enumerate_rec(std::vector<int>& k, std::size_t pos, int budget,
                          std::vector<KVector>& out) {
  if (pos == k.size()) {
    out.emplace_back(k);
    return;
  }
  for (int v = -budget; v <= budget; ++v) {
    k[pos] = v;
    enumerate_rec(k, pos + 1, budget - std::abs(v), out);
  }
  k[pos] = 0;
}

}  // namespace detail

/// All k of length M + 1 with ||k|| <= max_norm, in lexicographic order.
inline std::vector<KVector> enumerate_k(int half_modes, int max_norm) {
  std::vector<int> k(static_cast<std::size_t>(half_modes) + 1, 0);
  std::vector<KVector> out;
  detail::enumerate_rec(k, 0, max_norm, out);
  return out;
}

/// |sin(h/2 (w_j - k.w)) sin(h/2 (w_j + k.w))| >= eps^{1/2} h^2 (w_j + |k.w|).
inline bool check_pair_nonres(int j, const KVector& k,
                              const FrequencyTable& freqs,
                              const ResonanceParams& params) {
  const double wj = freqs(j);
  const double kw = k.dot(freqs);
  const double lhs = detail::sine_product(params.h, wj, kw);
  const double rhs =
      std::sqrt(params.epsilon) * params.h * params.h * (wj + std::abs(kw));
  return lhs >= rhs;
}

/// Every (j, k) with |j| <= M, ||k|| <= 2N, k != +-<j> that fails
/// check_pair_nonres, sorted by j then k. Refuses (M+1) N > 20.
inline std::vector<NearResonantPair> near_resonant_set(
    const FrequencyTable& freqs, const ResonanceParams& params) {
  params.validate();
  if ((params.M + 1) * params.N > 20) {
    throw TooLarge("near-resonant enumeration limited to (M+1) N <= 20, got " +
                   std::to_string((params.M + 1) * params.N));
  }
  if (params.M > freqs.half_modes()) {
    throw InvalidInput("frequency table shorter than M");
  }
  const auto candidates = enumerate_k(params.M, 2 * params.N);
  std::vector<NearResonantPair> out;
  for (int j = -params.M; j <= params.M; ++j) {
    const KVector unit = KVector::unit(j, params.M);
    const KVector neg = -unit;
    for (const auto& k : candidates) {
      if (k == unit || k == neg) continue;
      if (!check_pair_nonres(j, k, freqs, params)) out.push_back({j, k});
    }
  }
  return out;
}

/// Per l = 0..M: |sin(h omega_l)| >= h eps^{1/2}.
inline std::vector<bool> check_numerical_nonres(const FrequencyTable& freqs,
                                                const ResonanceParams& params) {
  std::vector<bool> out;
  const int m = std::min(params.M, freqs.half_modes());
  for (int l = 0; l <= m; ++l) {
    out.push_back(std::abs(std::sin(params.h * freqs(l))) >=
                  params.h * std::sqrt(params.epsilon));
  }
  return out;
}

/// Two-mode condition for j = j1 + j2, k = s1 <j1> + s2 <j2>:
/// |sin(h/2 (w_j - k.w)) sin(h/2 (w_j + k.w))| >= c h^2 |2 phi2(h^2 w_j^2)|.
inline bool check_two_mode_nonres(int j1, int j2, std::pair<int, int> signs,
                                  const FrequencyTable& freqs,
                                  const ResonanceParams& params, double c) {
  const int j = j1 + j2;
  if (std::abs(j) > params.M || std::abs(j1) > params.M ||
      std::abs(j2) > params.M) {
    throw InvalidParameter("two-mode indices exceed M");
  }
  if (std::abs(signs.first) != 1 || std::abs(signs.second) != 1) {
    throw InvalidParameter("signs must be +1 or -1");
  }
  std::vector<int> k(static_cast<std::size_t>(params.M) + 1, 0);
  k[static_cast<std::size_t>(std::abs(j1))] += signs.first;
  k[static_cast<std::size_t>(std::abs(j2))] += signs.second;
  const double wj = freqs(j);
  const double lhs = detail::sine_product(params.h, wj, KVector(k).dot(freqs));
  const double h = params.h;
  const double rhs = c * h * h * std::abs(2.0 * phi(2, h * h * wj * wj));
  return lhs >= rhs;
}

/// omega_j^sigma / omega^{sigma |k|} * eps^{||k||/2}.
inline double resonance_weight(const NearResonantPair& pair,
                               const FrequencyTable& freqs,
                               const ResonanceParams& params) {
  double log_den = 0.0;
  for (std::size_t l = 0; l < pair.k.size(); ++l) {
    log_den += std::abs(pair.k[l]) * std::log(freqs(static_cast<int>(l)));
  }
  return std::exp(params.sigma * (std::log(freqs(pair.j)) - log_den)) *
         std::pow(params.epsilon, 0.5 * pair.k.norm());
}

/// Supremum of resonance_weight over a set; 0 for the empty set.
inline double resonance_sup(const std::vector<NearResonantPair>& set,
                            const FrequencyTable& freqs,
                            const ResonanceParams& params) {
  double sup = 0.0;
  for (const auto& p : set) sup = std::max(sup, resonance_weight(p, freqs, params));
  return sup;
}

struct ResonanceReport {
  ResonanceParams params;
  std::vector<NearResonantPair> near_resonant;
  std::vector<double> weights;  // resonance_weight per near-resonant pair
  std::vector<bool> numerical_nonres;
  double sup = 0.0;
  double threshold = 0.0;  // C0 eps^N
  bool verdict = true;     // sup <= threshold

  std::string to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "epsilon: " << params.epsilon << '\n'
       << "h: " << params.h << '\n'
       << "N: " << params.N << '\n'
       << "M: " << params.M << '\n'
       << "sigma: " << params.sigma << '\n'
       << "C0: " << params.C0 << '\n'
       << "near_resonant_count: " << near_resonant.size() << '\n';
    for (std::size_t i = 0; i < near_resonant.size(); ++i) {
      os << "near_resonant: j=" << near_resonant[i].j << " k=[";
      const auto& k = near_resonant[i].k.entries();
      for (std::size_t l = 0; l < k.size(); ++l) {
        os << (l ? "," : "") << k[l];
      }
      os << "] weight=" << weights[i] << '\n';
    }
    for (std::size_t l = 0; l < numerical_nonres.size(); ++l) {
      os << "numerical_nonres: l=" << l << ' '
         << (numerical_nonres[l] ? "pass" : "fail") << '\n';
    }
    os << "sup: " << sup << '\n'
       << "threshold: " << threshold << '\n'
       << "verdict: " << (verdict ? "pass" : "fail") << '\n';
    return os.str();
  }
};

inline ResonanceReport resonance_report(const FrequencyTable& freqs,
                                        const ResonanceParams& params) {
  ResonanceReport r;
  r.params = params;
  r.near_resonant = near_resonant_set(freqs, params);
  for (const auto& p : r.near_resonant) {
    r.weights.push_back(resonance_weight(p, freqs, params));
  }
  r.numerical_nonres = check_numerical_nonres(freqs, params);
  r.sup = resonance_sup(r.near_resonant, freqs, params);
  r.threshold = params.C0 * std::pow(params.epsilon, params.N);
  r.verdict = r.sup <= r.threshold;
  return r;
}

}  // namespace aavf
