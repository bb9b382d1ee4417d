// Beta function and regularized incomplete beta I_z(a, b).
#pragma once

#include "bingham/log_scalar.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bingham {

inline double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("log_beta: arguments must be positive");
  }
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

namespace detail {

/// I_z(a, b) given z and zc = 1 - z separately. The complement is used above
/// the median so that zc keeps its full precision.
inline double reg_incomplete_beta(double z, double zc, double a, double b) {
  if (z <= 0.0) return 0.0;
  if (zc <= 0.0) return 1.0;
  return z <= 0.5 ? boost::math::ibeta(a, b, z) : boost::math::ibetac(b, a, zc);
}

}  // namespace detail

/// Regularized incomplete beta I_z(a, b) = B(z; a, b) / B(a, b).
inline double reg_incomplete_beta(double z, double a, double b) {
  if (!(z >= 0.0 && z <= 1.0)) {
    throw std::invalid_argument("reg_incomplete_beta: z must lie in [0, 1]");
  }
  return detail::reg_incomplete_beta(z, 1.0 - z, a, b);
}

}  // namespace bingham
