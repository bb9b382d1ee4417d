// Moments of quadratic forms x^T M x, M = diag(lambda) PSD, under the standard
// Gaussian and under the uniform measure on the sphere.
//
// With S(n) = E[(x^T M x)^n] / (n! 2^n) for x ~ N(0, I), S(0) = 1 and
//
//     S(n) = 1/(2n) * sum_{i=1..n} Tr(M^i) S(n - i),
//
// and since x = |x| * u with u uniform on the sphere and independent of |x|,
//
//     E_u[(u^T M u)^n] = n! 2^n S(n) / prod_{i<n} (m + 2i).
//
// Everything is stored as logarithms; all terms are nonnegative.
#pragma once

#include "bingham/log_scalar.hpp"

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bingham {

struct MomentTable {
  std::vector<double> lambda;
  int n_max = 0;
  std::vector<LogScalar> log_S;           // log S(k), k = 0..n_max
  std::vector<LogScalar> log_trace_pow;   // log Tr(M^i), i = 1..n_max (index i-1)
};

namespace detail {

inline void require_nonnegative(std::span<const double> lambda, const char* who) {
  for (double l : lambda) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      throw std::invalid_argument(std::string(who) +
                                  ": eigenvalues must be finite and nonnegative");
    }
  }
}

}  // namespace detail

/// Entry i-1 holds log sum_j lambda_j^i for i = 1..i_max.
inline std::vector<LogScalar> trace_powers(std::span<const double> lambda, int i_max) {
  detail::require_nonnegative(lambda, "trace_powers");
  if (i_max < 1) throw std::invalid_argument("trace_powers: i_max must be >= 1");
  std::vector<double> logs;
  logs.reserve(lambda.size());
  for (double l : lambda) logs.push_back(std::log(l));

  std::vector<LogScalar> out(static_cast<std::size_t>(i_max));
  std::vector<double> terms(lambda.size());
  for (int i = 1; i <= i_max; ++i) {
    for (std::size_t j = 0; j < logs.size(); ++j) terms[j] = i * logs[j];
    out[static_cast<std::size_t>(i - 1)] = LogScalar{log_sum_exp(terms)};
  }
  return out;
}

namespace detail {

/// log S(k) for k = 0..n_max into `out`.
///
/// Every product Tr(M^i) S(k-i) carries the common factor rho^k with
/// rho = max(lambda), so the sums are accumulated on the rescaled sequence
/// S(k) / rho^k, which is bounded by binom(k + m/2 - 1, k). When that bound
/// could overflow a double, the sums fall back to a per-term max-shifted
/// log-sum-exp over log Tr(M^i) + log S(k - i).
inline void log_S_table(std::span<const double> lambda, int n_max, std::span<double> out) {
  out[0] = 0.0;
  if (n_max == 0) return;
  double rho = 0.0;
  for (double l : lambda) rho = std::max(rho, l);
  if (rho == 0.0) {  // M = 0: S(k) = 0 for k >= 1
    for (int k = 1; k <= n_max; ++k) out[static_cast<std::size_t>(k)] = kNegInf;
    return;
  }

  const double log_rho = std::log(rho);
  const double half_m = 0.5 * static_cast<double>(lambda.size());
  const double log_bound = log_gamma(n_max + half_m) - log_gamma(half_m) - log_factorial(n_max);

  if (log_bound < 600.0) {
    // Tr((M / rho)^i) by repeated multiplication; every ratio is in [0, 1].
    Eigen::VectorXd trace = Eigen::VectorXd::Zero(n_max);
    for (double l : lambda) {
      const double r = l / rho;
      double p = 1.0;
      for (int i = 0; i < n_max && p > 0.0; ++i) {
        p *= r;
        trace(i) += p;
      }
    }
    // rev(n_max - j) = S(j) / rho^j, so the convolution is a forward dot product.
    Eigen::VectorXd rev = Eigen::VectorXd::Zero(n_max + 1);
    rev(n_max) = 1.0;
    for (int k = 1; k <= n_max; ++k) {
      const double sk = trace.head(k).dot(rev.segment(n_max - k + 1, k)) / (2.0 * k);
      rev(n_max - k) = sk;
      out[static_cast<std::size_t>(k)] = std::log(sk) + k * log_rho;
    }
    return;
  }

  const std::vector<LogScalar> log_trace = trace_powers(lambda, n_max);
  std::vector<double> terms(static_cast<std::size_t>(n_max));
  for (int k = 1; k <= n_max; ++k) {
    for (int i = 1; i <= k; ++i) {
      terms[static_cast<std::size_t>(i - 1)] =
          log_trace[static_cast<std::size_t>(i - 1)].log_value + out[static_cast<std::size_t>(k - i)];
    }
    const double lse = log_sum_exp(std::span<const double>(terms.data(), static_cast<std::size_t>(k)));
    out[static_cast<std::size_t>(k)] = lse - std::log(2.0 * k);
  }
}

}  // namespace detail

/// Builds S(0..n_max) bottom-up in O(n_max^2).
inline MomentTable gaussian_qf_moments(std::span<const double> lambda, int n_max) {
  detail::require_nonnegative(lambda, "gaussian_qf_moments");
  if (n_max < 0) throw std::invalid_argument("gaussian_qf_moments: n_max must be >= 0");

  MomentTable t;
  t.lambda.assign(lambda.begin(), lambda.end());
  t.n_max = n_max;
  std::vector<double> logs(static_cast<std::size_t>(n_max) + 1);
  detail::log_S_table(lambda, n_max, logs);
  t.log_S.reserve(logs.size());
  for (double v : logs) t.log_S.push_back(LogScalar{v});
  if (n_max > 0) t.log_trace_pow = trace_powers(lambda, n_max);
  return t;
}

/// log E_{x ~ N(0, I_d)} ||x||^{2n} = sum_{i<n} log(d + 2i).
inline LogScalar gaussian_norm_moment_log(int d, int n) {
  if (d < 1 || n < 0) throw std::invalid_argument("gaussian_norm_moment_log: need d >= 1, n >= 0");
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::log(static_cast<double>(d) + 2.0 * i);
  return LogScalar{s};
}

/// Sphere moments E_u[(u^T M u)^k], k = 0..k_max, for u uniform on S^{m-1}.
/// The dimension-only normalization log(k! 2^k) - log prod_{i<k}(m + 2i) is
/// computed once, so repeated evaluation for different lambda of the same
/// length only pays for the S(k) recursion.
class SphereMoments {
 public:
  SphereMoments(int m, int k_max) : m_(m), k_max_(k_max) {
    if (m < 1) throw std::invalid_argument("SphereMoments: dimension must be >= 1");
    if (k_max < 0) throw std::invalid_argument("SphereMoments: k_max must be >= 0");
    norm_.assign(static_cast<std::size_t>(k_max) + 1, 0.0);
    double acc = 0.0;
    for (int k = 1; k <= k_max; ++k) {
      // k! 2^k / prod_{i<k}(m + 2i) = prod_{i<k} (i + 1) / (i + m/2)
      acc += std::log((k) / (k - 1 + 0.5 * m));
      norm_[static_cast<std::size_t>(k)] = acc;
    }
  }

  int dim() const { return m_; }
  int k_max() const { return k_max_; }

  std::vector<double> log_expectations(std::span<const double> lambda) const {
    if (static_cast<int>(lambda.size()) != m_) {
      throw std::invalid_argument("SphereMoments: expected " + std::to_string(m_) +
                                  " eigenvalues, got " + std::to_string(lambda.size()));
    }
    detail::require_nonnegative(lambda, "sphere_qf_expectation_log");
    std::vector<double> out(static_cast<std::size_t>(k_max_) + 1, 0.0);

    bool constant = true;
    for (double l : lambda) constant = constant && (l == lambda[0]);
    if (constant) {
      // S^0 = {-1, 1}, or M = cI: u^T M u = c identically.
      const double lc = std::log(lambda[0]);
      for (int k = 1; k <= k_max_; ++k) out[static_cast<std::size_t>(k)] = lambda[0] == 0.0 ? kNegInf : k * lc;
      return out;
    }
    detail::log_S_table(lambda, k_max_, out);
    for (int k = 1; k <= k_max_; ++k) out[static_cast<std::size_t>(k)] += norm_[static_cast<std::size_t>(k)];
    return out;
  }

 private:
  int m_;
  int k_max_;
  std::vector<double> norm_;
};

/// log E_{u uniform on S^{m-1}} [(u^T diag(lambda) u)^k], m = lambda.size().
inline LogScalar sphere_qf_expectation_log(std::span<const double> lambda, int k) {
  if (lambda.empty()) throw std::invalid_argument("sphere_qf_expectation_log: empty lambda");
  if (k < 0) throw std::invalid_argument("sphere_qf_expectation_log: k must be >= 0");
  SphereMoments sm(static_cast<int>(lambda.size()), k);
  return LogScalar{sm.log_expectations(lambda)[static_cast<std::size_t>(k)]};
}

/// log of the surface measure of S^{d-1}, 2 pi^{d/2} / Gamma(d/2).
inline double log_sphere_surface(int d) {
  if (d < 1) throw std::invalid_argument("log_sphere_surface: d must be >= 1");
  return std::log(2.0) + 0.5 * d * std::log(std::numbers::pi) - log_gamma(0.5 * d);
}

}  // namespace bingham
