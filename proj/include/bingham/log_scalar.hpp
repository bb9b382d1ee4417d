// Nonnegative reals stored as natural logarithms.
#pragma once

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace bingham {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// A nonnegative quantity held as log(value); -inf encodes exactly zero.
struct LogScalar {
  double log_value = kNegInf;

  static constexpr LogScalar zero() { return LogScalar{kNegInf}; }
  static constexpr LogScalar one() { return LogScalar{0.0}; }
  static LogScalar from_value(double v) {
    if (v < 0.0 || std::isnan(v)) {
      throw std::invalid_argument("LogScalar: value must be nonnegative");
    }
    return LogScalar{std::log(v)};
  }

  bool is_zero() const { return log_value == kNegInf; }
  double value() const { return std::exp(log_value); }

  friend LogScalar operator*(LogScalar a, LogScalar b) {
    if (a.is_zero() || b.is_zero()) return zero();
    return LogScalar{a.log_value + b.log_value};
  }
  friend LogScalar operator/(LogScalar a, LogScalar b) {
    if (b.is_zero()) throw std::domain_error("LogScalar: division by zero");
    if (a.is_zero()) return zero();
    return LogScalar{a.log_value - b.log_value};
  }
  friend LogScalar operator+(LogScalar a, LogScalar b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double hi = std::max(a.log_value, b.log_value);
    const double lo = std::min(a.log_value, b.log_value);
    return LogScalar{hi + std::log1p(std::exp(lo - hi))};
  }
  friend bool operator==(LogScalar a, LogScalar b) = default;
  friend auto operator<=>(LogScalar a, LogScalar b) { return a.log_value <=> b.log_value; }
};

/// log(sum(exp(x))) with the max-shift; -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> xs) {
  double hi = kNegInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  if (hi == std::numeric_limits<double>::infinity()) return hi;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - hi);
  return hi + std::log(s);
}

inline LogScalar log_sum(std::span<const LogScalar> xs) {
  double hi = kNegInf;
  for (auto x : xs) hi = std::max(hi, x.log_value);
  if (hi == kNegInf) return LogScalar::zero();
  double s = 0.0;
  for (auto x : xs) s += std::exp(x.log_value - hi);
  return LogScalar{hi + std::log(s)};
}

inline double log_gamma(double x) { return boost::math::lgamma(x); }

inline double log_factorial(long k) { return log_gamma(static_cast<double>(k) + 1.0); }

inline double log_binomial(long n, long k) {
  if (k < 0 || k > n) return kNegInf;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

}  // namespace bingham
