#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace dynsamp {

#ifdef DYNSAMP_LONG_DOUBLE
using Real = long double;
#else
using Real = double;
#endif
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

/// Incompatible sizes or representations between two operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument outside the domain of the operation (negative time, bad index).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A model does not satisfy one of its structural assumptions.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reading or writing a report file failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Composite quadrature did not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, Real achieved, Real requested)
      : std::runtime_error(what + " (achieved " + std::to_string(achieved) +
                           ", requested " + std::to_string(requested) + ")"),
        achieved_(achieved),
        requested_(requested) {}

  Real achieved() const noexcept { return achieved_; }
  Real requested() const noexcept { return requested_; }

 private:
  Real achieved_;
  Real requested_;
};

/// Enough significant digits for an exact round trip of Real.
inline std::string format_real(Real x) {
  char buf[48];
#ifdef DYNSAMP_LONG_DOUBLE
  std::snprintf(buf, sizeof buf, "%.21Lg", x);
#else
  std::snprintf(buf, sizeof buf, "%.17g", x);
#endif
  return buf;
}

/// e(t) = (e^t - 1)/t with e(0) = 1; the mean of e^{s} over s in [0, t].
inline Real e_func(Real t) {
  if (std::abs(t) < Real(1e-5)) {
    return 1 + t / 2 + t * t / 6 + t * t * t / 24;
  }
  return std::expm1(t) / t;
}

}  // namespace dynsamp
