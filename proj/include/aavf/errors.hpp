#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace aavf {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed data (length mismatch, wrong grid size).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Out-of-range scalar parameter (rho <= 0, s < 0, bad phi index).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A coefficient vector that should describe a real field does not.
class SymmetryViolation : public Error {
 public:
  SymmetryViolation(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// sinc(h*omega/2) or cos(h*omega/2) vanishes for some mode.
class ResonantStepsize : public Error {
 public:
  ResonantStepsize(const std::string& what, int mode)
      : Error(what), mode_(mode) {}
  int mode() const { return mode_; }

 private:
  int mode_;
};

/// Fixed-point iteration of the implicit step did not converge.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double residual,
                 std::int64_t step = -1)
      : Error(what), residual_(residual), step_(step) {}
  double residual() const { return residual_; }
  /// Index of the failing step inside integrate(), -1 for a single step.
  std::int64_t step() const { return step_; }

 private:
  double residual_;
  std::int64_t step_;
};

/// Enumeration request beyond the desk-scale bound.
class TooLarge : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace aavf
