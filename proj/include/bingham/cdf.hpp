// One-coordinate marginal of the polynomial proposal
//
//     q(x) ∝ (x^T diag(a_head, lambda_rest) x)^n   on S^{m-1}.
//
// Writing x = (t, sqrt(1 - t^2) y) with y on S^{m-2}, the marginal density of
// t is
//
//     f(t) ∝ (1 - t^2)^alpha * sum_k C(n,k) a_head^{n-k} t^{2(n-k)} (1-t^2)^k E_y[(y^T L y)^k]
//
// with alpha = (m - 3) / 2 from the disintegration of the sphere measure and
// L = diag(lambda_rest). Substituting u = t^2, each term integrates to a
// regularized incomplete beta in u with parameters a_k = n - k + 1/2,
// b_k = k + alpha + 1, so the CDF is a nonnegative mixture of incomplete betas.
#pragma once

#include "bingham/incomplete_beta.hpp"
#include "bingham/log_scalar.hpp"
#include "bingham/moments.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bingham {

struct MarginalTerm {
  double log_weight = kNegInf;  // log C(n,k) + (n-k) log a_head + log E_k + log(B(a_k, b_k) / 2)
  double a = 0.0;
  double b = 0.0;
};

/// Dimension- and exponent-dependent parts of a marginal, shared by every
/// marginal with the same (n, m).
class MarginalLayout {
 public:
  MarginalLayout(int n, int m) : n_(n), m_(m), sphere_(m >= 2 ? m - 1 : 1, n) {
    if (n < 1) throw std::invalid_argument("MarginalLayout: n must be >= 1");
    if (m < 2) throw std::invalid_argument("MarginalLayout: m must be >= 2");
    alpha_ = 0.5 * (m - 3);
    const auto count = static_cast<std::size_t>(n) + 1;
    a_.resize(count);
    b_.resize(count);
    log_beta_.resize(count);
    log_coef_.resize(count);
    log_a_beta_.resize(count);
    a_beta_ratio_.assign(count, 0.0);
    for (int k = 0; k <= n; ++k) {
      const auto i = static_cast<std::size_t>(k);
      a_[i] = (n - k) + 0.5;
      b_[i] = k + alpha_ + 1.0;
      log_beta_[i] = log_beta(a_[i], b_[i]);
      log_coef_[i] = log_binomial(n, k) + log_beta_[i] - std::log(2.0);
      log_a_beta_[i] = std::log(a_[i]) + log_beta_[i];
      if (k > 0) a_beta_ratio_[i] = std::exp(log_a_beta_[i - 1] - log_a_beta_[i]);
    }
  }

  int n() const { return n_; }
  int m() const { return m_; }
  double alpha() const { return alpha_; }
  double a(int k) const { return a_[static_cast<std::size_t>(k)]; }
  double b(int k) const { return b_[static_cast<std::size_t>(k)]; }
  double log_coef(int k) const { return log_coef_[static_cast<std::size_t>(k)]; }
  // log(a_k B(a_k, b_k)) and a_{k-1} B(a_{k-1}, b_{k-1}) / (a_k B(a_k, b_k))
  double log_a_beta(int k) const { return log_a_beta_[static_cast<std::size_t>(k)]; }
  double a_beta_ratio(int k) const { return a_beta_ratio_[static_cast<std::size_t>(k)]; }
  const SphereMoments& sphere() const { return sphere_; }

 private:
  int n_;
  int m_;
  double alpha_ = 0.0;
  SphereMoments sphere_;
  std::vector<double> a_, b_, log_beta_, log_coef_, log_a_beta_, a_beta_ratio_;
};

/// Unnormalized CDF on [0, 1]: H(t) = sum_k exp(w_k) I_{t^2}(a_k, b_k), with
/// H(1) = exp(log_total). The full CDF on [-1, 1] follows from evenness.
struct MarginalCDF {
  int n = 0;
  int m = 0;
  double alpha = 0.0;
  std::vector<MarginalTerm> terms;
  double log_total = kNegInf;

  // Evaluation cache over the active range [k_lo, k_hi] of weights within
  // 60 nats of log_total, indexed by k - k_lo.
  int k_lo = 0;
  int k_hi = -1;
  std::vector<double> log_scale;  // log(tail_k / tail_lo) - log(a_k B(a_k, b_k))
  std::vector<double> step;       // exp(log_scale[k] - log_scale[k-1])
};

inline constexpr double kWeightCutoff = 60.0;

inline MarginalCDF build_marginal(const MarginalLayout& layout, double a_head,
                                  std::span<const double> lambda_rest) {
  const int n = layout.n();
  const int m = layout.m();
  if (static_cast<int>(lambda_rest.size()) != m - 1) {
    throw std::invalid_argument("build_marginal: expected " + std::to_string(m - 1) +
                                " trailing eigenvalues, got " + std::to_string(lambda_rest.size()));
  }
  if (!(a_head > 0.0) || !std::isfinite(a_head)) {
    throw std::invalid_argument("build_marginal: a_head must be positive");
  }
  for (double l : lambda_rest) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw std::invalid_argument("build_marginal: lambda_rest must be positive");
    }
  }

  const std::vector<double> sphere = layout.sphere().log_expectations(lambda_rest);
  const double log_head = std::log(a_head);

  MarginalCDF out;
  out.n = n;
  out.m = m;
  out.alpha = layout.alpha();
  out.terms.resize(static_cast<std::size_t>(n) + 1);
  std::vector<double> logs(out.terms.size());
  for (int k = 0; k <= n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double w = layout.log_coef(k) + (n - k) * log_head + sphere[i];
    out.terms[i] = MarginalTerm{w, layout.a(k), layout.b(k)};
    logs[i] = w;
  }
  out.log_total = log_sum_exp(logs);

  const double cutoff = out.log_total - kWeightCutoff;
  int lo = 0;
  while (lo <= n && logs[static_cast<std::size_t>(lo)] < cutoff) ++lo;
  int hi = n;
  while (hi >= lo && logs[static_cast<std::size_t>(hi)] < cutoff) --hi;
  out.k_lo = lo;
  out.k_hi = hi;

  const auto active = static_cast<std::size_t>(hi - lo + 1);
  // tail_k = sum_{j=k..hi} exp(w_j - log_total), accumulated from the top.
  std::vector<double> tail(active, 0.0);
  double run = 0.0;
  for (int k = hi; k >= lo; --k) {
    run += std::exp(logs[static_cast<std::size_t>(k)] - out.log_total);
    tail[static_cast<std::size_t>(k - lo)] = run;
  }
  out.log_scale.resize(active);
  out.step.assign(active, 0.0);
  const double log_tail_lo = std::log(tail[0]);
  for (int k = lo; k <= hi; ++k) {
    const auto i = static_cast<std::size_t>(k - lo);
    out.log_scale[i] = std::log(tail[i]) - log_tail_lo - layout.log_a_beta(k);
    if (i > 0) out.step[i] = tail[i] / tail[i - 1] * layout.a_beta_ratio(k);
  }
  return out;
}

/// Convenience overload that builds the (n, m) layout on the fly.
inline MarginalCDF build_marginal(double a_head, std::span<const double> lambda_rest, int n, int m) {
  if (m < 2) throw std::invalid_argument("build_marginal: m must be >= 2");
  if (n < 1) throw std::invalid_argument("build_marginal: n must be >= 1");
  return build_marginal(MarginalLayout(n, m), a_head, lambda_rest);
}

namespace detail {

/// H(s) / H(1) for s in (0, 1), where x = s^2 and xc = 1 - s^2.
///
/// Uses I_x(a_k, b_k) = I_x(a_{k-1}, b_{k-1}) + x^{a_k} (1-x)^{b_k - 1} / (a_k B(a_k, b_k)),
/// valid because a_k + b_k does not depend on k. Only the lowest active term
/// needs a full incomplete beta evaluation; the rest are positive increments, and
/// sum_k W_k I_k = I_lo * tail_lo + sum_{k > lo} inc_k * tail_k.
/// Consecutive increments differ by the factor (xc / x) * step[k], so exp is
/// only needed to re-anchor the product chain.
inline double normalized_half_cdf(const MarginalCDF& cdf, double s) {
  constexpr double kNegligible = -40.0;
  constexpr int kAnchorEvery = 16;

  const double x = s * s;
  const double xc = (1.0 - s) * (1.0 + s);
  const double log_x = std::log(x);
  const double log_xc = std::log(xc);
  const double ratio = xc / x;

  const int lo = cdf.k_lo;
  const auto& t_lo = cdf.terms[static_cast<std::size_t>(lo)];
  double acc = detail::reg_incomplete_beta(x, xc, t_lo.a, t_lo.b);

  double v = 0.0;
  int since_anchor = kAnchorEvery;
  for (int k = lo + 1; k <= cdf.k_hi; ++k) {
    const auto& t = cdf.terms[static_cast<std::size_t>(k)];
    const auto i = static_cast<std::size_t>(k - lo);
    const double e = t.a * log_x + (t.b - 1.0) * log_xc + cdf.log_scale[i];
    if (e <= kNegligible) {
      since_anchor = kAnchorEvery;
      continue;
    }
    if (since_anchor >= kAnchorEvery) {
      v = std::exp(e);
      since_anchor = 0;
    } else {
      v *= ratio * cdf.step[i];
      ++since_anchor;
    }
    acc += v;
  }
  return std::min(acc, 1.0);
}

}  // namespace detail

/// Normalized CDF G(t) on [-1, 1]; G(-1) = 0, G(0) = 1/2, G(1) = 1.
inline double cdf_eval(const MarginalCDF& cdf, double t) {
  if (!(t >= -1.0 && t <= 1.0)) {
    throw std::invalid_argument("cdf_eval: t must lie in [-1, 1]");
  }
  if (t == 0.0) return 0.5;
  if (t == 1.0) return 1.0;
  if (t == -1.0) return 0.0;
  const double h = detail::normalized_half_cdf(cdf, std::abs(t));
  return t > 0.0 ? 0.5 + 0.5 * h : 0.5 - 0.5 * h;
}

/// G^{-1}(r), solved on |t| in [0, 1] with the bracketing TOMS 748 method.
/// Stops once the bracket is narrower than 1e-15 or |G(t) - r| <= tolerance.
inline double invert_cdf(const MarginalCDF& cdf, double r, double tolerance = 1e-13) {
  if (!(r > 0.0 && r < 1.0)) {
    throw std::invalid_argument("invert_cdf: r must lie in (0, 1)");
  }
  if (r == 0.5) return 0.0;
  const double sign = r > 0.5 ? 1.0 : -1.0;
  const double target = std::abs(2.0 * r - 1.0);

  constexpr std::uintmax_t kMaxIter = 200;
  constexpr double kWidth = 1e-15;
  const auto residual = [&](double s) {
    if (s <= 0.0) return -target;
    if (s >= 1.0) return 1.0 - target;
    const double diff = detail::normalized_half_cdf(cdf, s) - target;
    return 0.5 * std::abs(diff) <= tolerance ? 0.0 : diff;
  };
  const auto narrow = [](double a, double b) { return b - a <= kWidth; };

  std::uintmax_t iters = kMaxIter;
  const auto [lo, hi] = boost::math::tools::toms748_solve(residual, 0.0, 1.0, -target, 1.0 - target,
                                                          narrow, iters);
  if (iters >= kMaxIter && !narrow(lo, hi)) {
    throw std::runtime_error("invert_cdf: root finding did not converge");
  }
  return sign * 0.5 * (lo + hi);
}

}  // namespace bingham
