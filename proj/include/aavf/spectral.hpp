#pragma once

// Periodic collocation grid on [-pi, pi), the discrete Fourier pair between
// nodal samples and Fourier coefficients, and weighted Sobolev norms.
//
// Coefficients are indexed j = -M..M-1. The single stored j = -M entry stands
// for the merged +-M boundary pair of the trigonometric interpolant; for real
// fields it is real. Sums over modes use
//   prime weights:        1 for |j| < M, 1   for the merged entry
//   double-prime weights: 1 for |j| < M, 1/2 for the merged entry.
//
// Forward transform: c_j = (1/2M) sum_k w_k exp(-i j x_k), x_k = k pi / M.
// Inverse:           w_k = sum'_j c_j exp(i j x_k).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <fftw3.h>

#include "aavf/errors.hpp"

namespace aavf {

using Complex = std::complex<double>;

class Grid {
 public:
  explicit Grid(int half_modes) : half_modes_(half_modes) {
    if (half_modes < 2) {
      throw InvalidInput("grid needs 2M >= 4 points, got 2M = " +
                         std::to_string(2 * half_modes));
    }
  }

  /// Builds a grid from the point count 2M, which must be even.
  static Grid from_points(int two_m) {
    if (two_m % 2 != 0) {
      throw InvalidInput("point count must be even, got " +
                         std::to_string(two_m));
    }
    return Grid(two_m / 2);
  }

  int half_modes() const { return half_modes_; }
  int size() const { return 2 * half_modes_; }

  /// x_k = k pi / M for k = -M..M-1.
  double node(int k) const { return k * std::numbers::pi / half_modes_; }

  /// Node of storage slot n (n = 0..2M-1 holds k = n - M).
  double node_at_slot(int n) const { return node(n - half_modes_); }

 private:
  int half_modes_;
};

/// Real samples at the grid nodes; slot n holds the value at x_{n-M}.
struct NodalField {
  std::vector<double> values;

  NodalField() = default;
  explicit NodalField(std::size_t n) : values(n, 0.0) {}
  explicit NodalField(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t n) { return values[n]; }
  double operator[](std::size_t n) const { return values[n]; }
};

/// Fourier coefficients c_j, j = -M..M-1, kept in FFT order
/// (storage slot j mod 2M). Index M is accepted as an alias of the merged
/// boundary entry -M.
class ModeVector {
 public:
  ModeVector() = default;
  explicit ModeVector(int half_modes)
      : half_modes_(half_modes),
        coeffs_(static_cast<std::size_t>(2 * half_modes)) {}

  int half_modes() const { return half_modes_; }
  std::size_t size() const { return coeffs_.size(); }

  Complex& operator[](int j) { return coeffs_[slot(j)]; }
  const Complex& operator[](int j) const { return coeffs_[slot(j)]; }

  Complex& at(int j) {
    check_index(j);
    return coeffs_[slot(j)];
  }
  const Complex& at(int j) const {
    check_index(j);
    return coeffs_[slot(j)];
  }

  /// Raw storage in FFT order.
  std::span<Complex> slots() { return coeffs_; }
  std::span<const Complex> slots() const { return coeffs_; }

  /// |j| of the mode held in storage slot i.
  int mode_of_slot(std::size_t i) const {
    const int n = static_cast<int>(i);
    return n <= half_modes_ ? n : 2 * half_modes_ - n;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  /// max_j |c_j - conj(c_{-j})| together with |Im c_{-M}|.
  double symmetry_residual() const {
    double r = 0.0;
    const int m = half_modes_;
    for (int j = -m + 1; j < m; ++j) {
      r = std::max(r, std::abs((*this)[j] - std::conj((*this)[-j])));
    }
    if (m > 0) r = std::max(r, std::abs((*this)[-m].imag()));
    return r;
  }

  ModeVector& operator+=(const ModeVector& o) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  ModeVector& operator-=(const ModeVector& o) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  ModeVector& operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }
  friend ModeVector operator+(ModeVector a, const ModeVector& b) {
    return a += b;
  }
  friend ModeVector operator-(ModeVector a, const ModeVector& b) {
    return a -= b;
  }
  friend ModeVector operator*(double s, ModeVector a) { return a *= s; }

  bool operator==(const ModeVector&) const = default;

 private:
  std::size_t slot(int j) const {
    const int n = 2 * half_modes_;
    return static_cast<std::size_t>(((j % n) + n) % n);
  }
  void check_index(int j) const {
    if (j < -half_modes_ || j > half_modes_) {
      throw InvalidInput("mode index " + std::to_string(j) +
                         " outside [-M, M]");
    }
  }

  int half_modes_ = 0;
  std::vector<Complex> coeffs_;
};

/// omega_j = sqrt(rho + j^2) for |j| <= M.
class FrequencyTable {
 public:
  FrequencyTable(double rho, int half_modes) : rho_(rho), half_modes_(half_modes) {
    if (!(rho > 0.0)) {
      throw InvalidParameter("rho must be positive, got " +
                             std::to_string(rho));
    }
    if (half_modes < 0) throw InvalidParameter("negative mode count");
    omega_.resize(static_cast<std::size_t>(half_modes) + 1);
    for (int l = 0; l <= half_modes; ++l) {
      omega_[static_cast<std::size_t>(l)] =
          std::sqrt(rho + static_cast<double>(l) * l);
    }
  }

  double rho() const { return rho_; }
  int half_modes() const { return half_modes_; }
  double operator()(int j) const {
    return omega_[static_cast<std::size_t>(std::abs(j))];
  }
  /// omega_l for l = 0..M.
  std::span<const double> values() const { return omega_; }

 private:
  double rho_;
  int half_modes_;
  std::vector<double> omega_;
};

inline FrequencyTable build_frequencies(double rho, int half_modes) {
  return FrequencyTable(rho, half_modes);
}

namespace detail {

// Real-data FFTW plans, one pair per length. Planning is serialised; execution
// through the new-array interface is safe from any thread.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  struct Pair {
    fftw_plan forward;   // r2c
    fftw_plan backward;  // c2r
  };

  const Pair& get(int n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<double> real(static_cast<std::size_t>(n));
    std::vector<fftw_complex> half(static_cast<std::size_t>(n / 2 + 1));
    constexpr unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Pair p{fftw_plan_dft_r2c_1d(n, real.data(), half.data(), flags),
           fftw_plan_dft_c2r_1d(n, half.data(), real.data(), flags)};
    return plans_.emplace(n, p).first->second;
  }

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

 private:
  FftPlans() = default;
  ~FftPlans() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

  std::mutex mutex_;
  std::map<int, Pair> plans_;
};

inline fftw_complex* as_fftw(Complex* p) {
  return reinterpret_cast<fftw_complex*>(p);
}

// Inverse transform of an exactly Hermitian coefficient vector. Only slots
// 0..M are read.
inline std::vector<double> hermitian_synthesis(const ModeVector& modes) {
  const int m = modes.half_modes();
  const int n = 2 * m;
  std::vector<Complex> half(static_cast<std::size_t>(m + 1));
  for (int j = 0; j <= m; ++j) {
    // Node k = slot - M, so exp(i j x_k) = (-1)^j exp(2 pi i j slot / 2M).
    const Complex c = (j == m) ? Complex(modes[-m].real(), 0.0) : modes[j];
    half[static_cast<std::size_t>(j)] = (j % 2 == 0) ? c : -c;
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  fftw_execute_dft_c2r(FftPlans::instance().get(n).backward,
                       as_fftw(half.data()), out.data());
  return out;
}

}  // namespace detail

/// Forward transform. The result is exactly Hermitian.
inline ModeVector dft(const NodalField& field, const Grid& grid) {
  const int m = grid.half_modes();
  const int n = grid.size();
  if (field.size() != static_cast<std::size_t>(n)) {
    throw InvalidInput("nodal field has " + std::to_string(field.size()) +
                       " samples, grid needs " + std::to_string(n));
  }
  std::vector<double> in = field.values;
  std::vector<Complex> half(static_cast<std::size_t>(m + 1));
  fftw_execute_dft_r2c(detail::FftPlans::instance().get(n).forward, in.data(),
                       detail::as_fftw(half.data()));
  ModeVector out(m);
  const double scale = 1.0 / n;
  for (int j = 0; j < m; ++j) {
    const Complex c = half[static_cast<std::size_t>(j)] * scale;
    out[j] = (j % 2 == 0) ? c : -c;
    if (j > 0) out[-j] = std::conj(out[j]);
  }
  const double boundary = half[static_cast<std::size_t>(m)].real() * scale;
  out[-m] = Complex((m % 2 == 0) ? boundary : -boundary, 0.0);
  return out;
}

/// Inverse transform. Throws SymmetryViolation when the synthesised field has
/// an imaginary part above 1e-8 of its real magnitude; otherwise the imaginary
/// part is discarded.
inline NodalField idft(const ModeVector& modes, const Grid& grid) {
  const int m = grid.half_modes();
  if (modes.half_modes() != m) {
    throw InvalidInput("mode vector has 2M = " + std::to_string(modes.size()) +
                       ", grid has 2M = " + std::to_string(grid.size()));
  }
  if (modes.symmetry_residual() == 0.0) {
    return NodalField(detail::hermitian_synthesis(modes));
  }
  // Split c = a + i b with a, b Hermitian; the synthesis is A + i B.
  ModeVector herm(m), anti(m);
  for (int j = -m; j < m; ++j) {
    const Complex c = modes[j];
    const Complex cr = std::conj(modes[-j]);
    herm[j] = 0.5 * (c + cr);
    anti[j] = Complex(0.0, -0.5) * (c - cr);
  }
  NodalField re(detail::hermitian_synthesis(herm));
  const auto im = detail::hermitian_synthesis(anti);
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t i = 0; i < im.size(); ++i) {
    max_re = std::max(max_re, std::abs(re[i]));
    max_im = std::max(max_im, std::abs(im[i]));
  }
  if (max_im > 1e-8 * max_re) {
    throw SymmetryViolation(
        "inverse transform has imaginary residual " + std::to_string(max_im),
        max_im);
  }
  return re;
}

/// (sum''_j omega_j^{2s} |c_j|^2)^{1/2}.
inline double sobolev_norm(const ModeVector& modes, const FrequencyTable& freqs,
                           double s) {
  if (!(s >= 0.0)) {
    throw InvalidParameter("Sobolev index must be nonnegative");
  }
  const int m = modes.half_modes();
  double sum = 0.0;
  for (int j = -m; j < m; ++j) {
    const double weight = (j == -m) ? 0.5 : 1.0;
    sum += weight * std::pow(freqs(j), 2.0 * s) * std::norm(modes[j]);
  }
  return std::sqrt(sum);
}

}  // namespace aavf
