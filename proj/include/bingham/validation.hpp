// Independent oracles and statistical checks for the sampler.
//
// The quadrature oracles integrate exp(x^T A x) directly over the circle or
// the 2-sphere and never touch the proposal machinery, so they can certify
// the sampler's output distribution at small dimension.
#pragma once

#include "bingham/linalg.hpp"
#include "bingham/random.hpp"
#include "bingham/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bingham {

/// Tabulated CDF of one coordinate, linearly interpolated between nodes.
struct OracleCDF {
  std::vector<double> grid;    // ascending, grid.front() == -1, grid.back() == 1
  std::vector<double> values;  // nondecreasing, 0 ... 1
  std::string built_for;

  double operator()(double t) const {
    if (t <= grid.front()) return values.front();
    if (t >= grid.back()) return values.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), t);
    const auto j = static_cast<std::size_t>(it - grid.begin());
    const double t0 = grid[j - 1], t1 = grid[j];
    const double w = t1 > t0 ? (t - t0) / (t1 - t0) : 0.0;
    return values[j - 1] + w * (values[j] - values[j - 1]);
  }

  /// Quantile by inverse linear interpolation.
  double inverse(double u) const {
    if (u <= values.front()) return grid.front();
    if (u >= values.back()) return grid.back();
    const auto it = std::upper_bound(values.begin(), values.end(), u);
    const auto j = static_cast<std::size_t>(it - values.begin());
    const double v0 = values[j - 1], v1 = values[j];
    const double w = v1 > v0 ? (u - v0) / (v1 - v0) : 0.0;
    return grid[j - 1] + w * (grid[j] - grid[j - 1]);
  }
};

namespace detail {

// Cumulative composite Simpson over 2N panels of width h; entry j holds the
// integral up to node 2j.
inline std::vector<double> cumulative_simpson(std::span<const double> f, double h) {
  const std::size_t panels = f.size() - 1;
  std::vector<double> out(panels / 2 + 1, 0.0);
  for (std::size_t j = 1; j < out.size(); ++j) {
    const std::size_t k = 2 * j;
    out[j] = out[j - 1] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
  }
  return out;
}

}  // namespace detail

/// CDF of coordinate `coord` under p(x) ∝ exp(x^T A x) for d = 2 or 3 by
/// dense quadrature. The returned table has grid_size + 1 nodes.
inline OracleCDF oracle_marginal_cdf(const SymmetricMatrix& a, int coord, int grid_size = 10'000) {
  const Eigen::Index d = a.dim();
  if (d != 2 && d != 3) throw std::invalid_argument("oracle_marginal_cdf: only d = 2 or 3");
  if (coord < 0 || coord >= d) throw std::invalid_argument("oracle_marginal_cdf: coordinate out of range");
  if (grid_size < 2) throw std::invalid_argument("oracle_marginal_cdf: grid_size must be >= 2");
  const double top = eigendecompose(a).values(d - 1);
  const auto density = [&](const Vector& x) { return std::exp(quadratic_form(a, x) - top); };

  const std::size_t panels = 2 * static_cast<std::size_t>(grid_size);
  std::vector<double> f(panels + 1);
  OracleCDF out;
  out.built_for = "d=" + std::to_string(d) + " coord=" + std::to_string(coord);
  out.grid.resize(static_cast<std::size_t>(grid_size) + 1);

  if (d == 2) {
    // x_coord = cos(theta). P(x_coord <= cos(theta0)) integrates theta over
    // [theta0, 2 pi - theta0]; fold that onto [theta0, pi].
    const int other = 1 - coord;
    const double h = std::numbers::pi / static_cast<double>(panels);
    Vector x(2);
    for (std::size_t j = 0; j <= panels; ++j) {
      const double th = h * static_cast<double>(panels - j);  // pi down to 0
      x(coord) = std::cos(th);
      x(other) = std::sin(th);
      double v = density(x);
      x(other) = -x(other);
      v += density(x);
      f[j] = v;
    }
    const std::vector<double> c = detail::cumulative_simpson(f, h);
    out.values.resize(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) {
      out.grid[j] = std::cos(h * static_cast<double>(panels - 2 * j));
      out.values[j] = c[j] / c.back();
    }
  } else {
    // Integrating over t = cos(polar angle) absorbs the sin Jacobian, so the
    // marginal of t is the azimuthal integral; the periodic trapezoid rule in
    // psi converges geometrically.
    constexpr int kAzimuth = 512;
    const int o1 = (coord + 1) % 3;
    const int o2 = (coord + 2) % 3;
    const double h = 2.0 / static_cast<double>(panels);
    Vector x(3);
    for (std::size_t j = 0; j <= panels; ++j) {
      const double t = std::clamp(-1.0 + h * static_cast<double>(j), -1.0, 1.0);
      const double s = std::sqrt(std::max(0.0, (1.0 - t) * (1.0 + t)));
      double acc = 0.0;
      for (int k = 0; k < kAzimuth; ++k) {
        const double psi = 2.0 * std::numbers::pi * k / kAzimuth;
        x(coord) = t;
        x(o1) = s * std::cos(psi);
        x(o2) = s * std::sin(psi);
        acc += density(x);
      }
      f[j] = acc / kAzimuth;
    }
    const std::vector<double> c = detail::cumulative_simpson(f, h);
    out.values.resize(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) {
      out.grid[j] = std::clamp(-1.0 + 2.0 * h * static_cast<double>(j), -1.0, 1.0);
      out.values[j] = c[j] / c.back();
    }
  }
  out.grid.front() = -1.0;
  out.grid.back() = 1.0;
  return out;
}

/// sup_t |F_N(t) - F(t)| for the empirical CDF of `samples`.
inline double ks_statistic(std::vector<double> samples, const OracleCDF& oracle) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  if (samples.front() < oracle.grid.front() - 1e-12 || samples.back() > oracle.grid.back() + 1e-12) {
    throw std::invalid_argument("ks_statistic: samples outside the oracle range");
  }
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = oracle(samples[i]);
    worst = std::max({worst, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return worst;
}

/// Asymptotic one-sample Kolmogorov critical value at the 1% level.
inline double ks_critical_1pct(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

struct AcceptanceReport {
  double rate = 0.0;
  double sigma = 0.0;  // binomial standard error of rate
  long proposals = 0;
  bool pass = false;
};

/// Acceptance rate of the rejection loop; passes when it falls inside
/// [e^-1 - 3 sigma, e^-1/2 + 3 sigma].
inline AcceptanceReport acceptance_rate_check(const SymmetricMatrix& a, long proposals, const SamplerConfig& cfg = {}) {
  if (proposals < 1000) throw std::invalid_argument("acceptance_rate_check: need at least 1000 proposals");
  const AcceptanceCount c = count_acceptances(a, proposals, cfg);
  AcceptanceReport r;
  r.proposals = c.proposals;
  r.rate = c.rate();
  r.sigma = std::sqrt(r.rate * (1.0 - r.rate) / static_cast<double>(c.proposals));
  r.pass = r.rate >= std::exp(-1.0) - 3.0 * r.sigma && r.rate <= std::exp(-0.5) + 3.0 * r.sigma;
  return r;
}

struct RatioReport {
  double sigma_sq = 0.0;
  double best_ratio = 1.0;
  double best_omega = 1.0;
};

/// omega = 10^(j/100), j = -1600..1600; contains omega = 1 exactly.
inline std::vector<double> default_omega_grid() {
  std::vector<double> out;
  out.reserve(3201);
  for (int j = -1600; j <= 1600; ++j) out.push_back(std::pow(10.0, j / 100.0));
  return out;
}

/// On the circle, compares q(theta) ∝ exp(sigma_sq cos^2 theta) with angular
/// central Gaussians p(theta) ∝ 1 / (cos^2 theta + omega sin^2 theta), both
/// normalized on a 1000-point grid, and returns the smallest worst-case
/// ratio max(p/q, q/p) over the omega grid.
inline RatioReport angular_gaussian_worst_ratio(double sigma_sq, std::span<const double> omega_grid) {
  if (omega_grid.empty()) throw std::invalid_argument("angular_gaussian_worst_ratio: empty omega grid");
  for (double w : omega_grid) {
    if (!(w > 0.0)) throw std::invalid_argument("angular_gaussian_worst_ratio: omega must be positive");
  }
  constexpr int kGrid = 1000;
  std::vector<double> c2(kGrid), s2(kGrid), q(kGrid);
  double q_sum = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double th = std::numbers::pi * i / kGrid;  // both densities have period pi
    c2[static_cast<std::size_t>(i)] = std::cos(th) * std::cos(th);
    s2[static_cast<std::size_t>(i)] = std::sin(th) * std::sin(th);
    // shifted by sigma_sq so the maximum is 1
    q[static_cast<std::size_t>(i)] = std::exp(sigma_sq * (c2[static_cast<std::size_t>(i)] - 1.0));
    q_sum += q[static_cast<std::size_t>(i)];
  }
  for (double& v : q) v *= kGrid / q_sum;

  RatioReport out;
  out.sigma_sq = sigma_sq;
  out.best_ratio = std::numeric_limits<double>::infinity();
  std::vector<double> p(kGrid);
  for (double w : omega_grid) {
    double p_sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = 1.0 / (c2[i] + w * s2[i]);
      p_sum += p[i];
    }
    double worst = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double pn = p[i] * kGrid / p_sum;
      worst = std::max({worst, pn / q[i], q[i] / pn});
    }
    if (worst < out.best_ratio) {
      out.best_ratio = worst;
      out.best_omega = w;
    }
  }
  return out;
}

/// Reference sampler for small gaps: uniform proposals on the sphere accepted
/// with probability exp(x^T A x - lambda_max). Shares nothing with the
/// polynomial proposal.
template <class Rng>
std::vector<Vector> naive_rejection_sample(const SymmetricMatrix& a, long count, Rng& rng) {
  const double top = eigendecompose(a).values(a.dim() - 1);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<long>(out.size()) < count) {
    Vector x = uniform_on_sphere(a.dim(), rng);
    if (std::log(rng.uniform()) < quadratic_form(a, x) - top) out.push_back(std::move(x));
  }
  return out;
}

/// Coordinate `coord` of every sample.
inline std::vector<double> coordinate(const std::vector<Vector>& samples, Eigen::Index coord) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& x : samples) out.push_back(x(coord));
  return out;
}

}  // namespace bingham
