// Named self-check suites behind `bingham validate`. Each check reports a
// statistic, the threshold it is compared against, and pass/fail. Suites are
// sized to finish in seconds; the full-size runs live in the acceptance tests.
#pragma once

#include "bingham/cdf.hpp"
#include "bingham/moments.hpp"
#include "bingham/posterior.hpp"
#include "bingham/sampler.hpp"
#include "bingham/validation.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bingham {

struct CheckResult {
  std::string test;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

using SuiteReport = std::vector<CheckResult>;

namespace detail {

inline CheckResult at_most(std::string name, double stat, double threshold) {
  return {std::move(name), stat, threshold, stat <= threshold};
}

inline CheckResult at_least(std::string name, double stat, double threshold) {
  return {std::move(name), stat, threshold, stat >= threshold};
}

inline double relative_error(double got, double want) {
  if (want == 0.0) return std::abs(got);
  return std::abs(got - want) / std::abs(want);
}

}  // namespace detail

/// P(cos theta <= t) under q(theta) ∝ (a cos^2 theta + l sin^2 theta)^n on
/// the circle, by adaptive Gauss-Kronrod over theta in [acos t, pi].
inline double circle_power_cdf(double a, double l, int n, double t) {
  using boost::math::quadrature::gauss_kronrod;
  const auto f = [&](double th) {
    const double c = std::cos(th), s = std::sin(th);
    const double base = (a * c * c + l * s * s) / std::max(a, l);
    return std::pow(base, n);
  };
  const double total = gauss_kronrod<double, 61>::integrate(f, 0.0, std::numbers::pi, 15, 1e-15);
  const double part = gauss_kronrod<double, 61>::integrate(f, std::acos(t), std::numbers::pi, 15, 1e-15);
  return part / total;
}

inline SuiteReport moments_suite(std::uint64_t seed) {
  SuiteReport out;
  double worst = 0.0;
  for (int d = 1; d <= 10; ++d) {
    for (double c : {0.5, 1.0, 3.0}) {
      const std::vector<double> lambda(static_cast<std::size_t>(d), c);
      const MomentTable t = gaussian_qf_moments(lambda, 50);
      double log_want = 0.0;
      for (int n = 1; n <= 50; ++n) {
        log_want += std::log(c) + std::log(d + 2.0 * (n - 1)) - std::log(2.0 * n);
        const double got = t.log_S[static_cast<std::size_t>(n)].log_value;
        worst = std::max(worst, std::abs(std::expm1(got - log_want)));
      }
    }
  }
  out.push_back(detail::at_most("moments.scalar_identity_rel_error", worst, 1e-12));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  std::uniform_int_distribution<int> dim(1, 10);
  worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> lambda(static_cast<std::size_t>(dim(rng)));
    for (double& l : lambda) l = unif(rng);
    double tr = 0.0, tr2 = 0.0;
    for (double l : lambda) {
      tr += l;
      tr2 += l * l;
    }
    const MomentTable t = gaussian_qf_moments(lambda, 2);
    // E[(x^T M x)^2] = 2! 2^2 S(2)
    const double got = 8.0 * t.log_S[2].value();
    worst = std::max(worst, detail::relative_error(got, tr * tr + 2.0 * tr2));
  }
  out.push_back(detail::at_most("moments.second_moment_rel_error", worst, 1e-12));

  worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> lambda(static_cast<std::size_t>(dim(rng)));
    double tr = 0.0;
    for (double& l : lambda) tr += (l = unif(rng));
    const double got = sphere_qf_expectation_log(lambda, 1).value();
    worst = std::max(worst, detail::relative_error(got, tr / static_cast<double>(lambda.size())));
  }
  out.push_back(detail::at_most("moments.sphere_first_moment_rel_error", worst, 1e-12));
  return out;
}

inline SuiteReport cdf_suite(std::uint64_t seed) {
  SuiteReport out;
  const std::vector<double> ones2{1.0, 1.0};
  const std::vector<double> ones1{1.0};
  const MarginalCDF sphere2 = build_marginal(1.0, ones2, 5, 3);
  const MarginalCDF circle = build_marginal(1.0, ones1, 5, 2);
  double worst_u = 0.0, worst_a = 0.0;
  for (int i = 1; i < 200; ++i) {
    const double t = -1.0 + i / 100.0;
    worst_u = std::max(worst_u, std::abs(cdf_eval(sphere2, t) - 0.5 * (t + 1.0)));
    worst_a = std::max(worst_a, std::abs(cdf_eval(circle, t) - (1.0 - std::acos(t) / std::numbers::pi)));
  }
  out.push_back(detail::at_most("cdf.uniform_sphere_reduction", worst_u, 1e-12));
  out.push_back(detail::at_most("cdf.arcsine_circle_reduction", worst_a, 1e-12));

  const std::vector<double> rest{1.2};
  const MarginalCDF g = build_marginal(1.0, rest, 25, 2);
  double worst_q = 0.0;
  for (int i = 1; i < 40; ++i) {
    const double t = -1.0 + i / 20.0;
    worst_q = std::max(worst_q, std::abs(cdf_eval(g, t) - circle_power_cdf(1.0, 1.2, 25, t)));
  }
  out.push_back(detail::at_most("cdf.circle_quadrature_agreement", worst_q, 1e-10));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::vector<double> rest3{1.3, 2.1, 1.05};
  const MarginalCDF h = build_marginal(1.7, rest3, 100, 4);
  double worst_r = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double r = std::clamp(unif(rng), 1e-9, 1.0 - 1e-9);
    worst_r = std::max(worst_r, std::abs(cdf_eval(h, invert_cdf(h, r)) - r));
  }
  out.push_back(detail::at_most("cdf.inversion_roundtrip", worst_r, 1e-12));

  double drop = 0.0;
  double prev = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double v = cdf_eval(h, -1.0 + i / 1000.0);
    drop = std::max(drop, prev - v);
    prev = v;
  }
  out.push_back(detail::at_most("cdf.monotone_max_drop", drop, 0.0));
  return out;
}

inline SuiteReport sampler_suite(std::uint64_t seed) {
  SuiteReport out;
  SamplerConfig cfg;
  cfg.seed = seed;

  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = -1.0, lowest = 0.0;
    for (int rep = 0; rep < 10'000; ++rep) {
      const int d = 2 + rep % 9;
      const double gap = 30.0 * unif(rng);
      Vector dvec(d);
      dvec(0) = 0.0;
      dvec(d - 1) = gap;
      for (int i = 1; i < d - 1; ++i) dvec(i) = gap * unif(rng);
      const int n = std::max(1, static_cast<int>(std::ceil(gap * gap)));
      Vector z(d);
      for (int i = 0; i < d; ++i) z(i) = unif(rng) - 0.5;
      z.normalize();
      const double r = log_accept_ratio(dvec, n, z);
      worst = std::max(worst, r);
      lowest = std::min(lowest, r);
    }
    out.push_back(detail::at_most("sampler.log_ratio_max", worst, -0.5 + 1e-12));
    out.push_back(detail::at_least("sampler.log_ratio_min", lowest, -1.0));
  }

  const struct {
    int d;
    double gap;
    const char* label;
  } cases[] = {{2, 0.5, "d2_gap0.5"}, {5, 5.0, "d5_gap5"}, {3, 10.0, "d3_gap10"}};
  for (const auto& [d, gap, label] : cases) {
    Vector diag = Vector::LinSpaced(d, 0.0, gap);
    const AcceptanceReport rep = acceptance_rate_check(SymmetricMatrix::diagonal(diag), 4000, cfg);
    CheckResult c{std::string("sampler.acceptance_rate_") + label, rep.rate,
                  std::exp(-1.0) - 3.0 * rep.sigma, rep.pass};
    out.push_back(c);
  }

  const long count = 20'000;
  {
    const SymmetricMatrix a = SymmetricMatrix::diagonal(Vector::LinSpaced(2, 0.0, 4.0));
    const SampleBatch b = sample_bingham(a, count, cfg);
    for (int c = 0; c < 2; ++c) {
      const double ks = ks_statistic(coordinate(b.samples, c), oracle_marginal_cdf(a, c));
      out.push_back(detail::at_most("sampler.ks_d2_coord" + std::to_string(c), ks, ks_critical_1pct(count)));
    }
  }
  {
    Vector diag(3);
    diag << 0.0, 2.0, 5.0;
    const SymmetricMatrix a = SymmetricMatrix::diagonal(diag);
    const SampleBatch b = sample_bingham(a, count, cfg);
    for (int c = 0; c < 3; ++c) {
      const double ks = ks_statistic(coordinate(b.samples, c), oracle_marginal_cdf(a, c, 4000));
      out.push_back(detail::at_most("sampler.ks_d3_coord" + std::to_string(c), ks, ks_critical_1pct(count)));
    }
  }
  return out;
}

inline SuiteReport posterior_suite(std::uint64_t seed) {
  SuiteReport out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector x0(5);
  for (int i = 0; i < 5; ++i) x0(i) = normal(rng);
  x0.normalize();
  PhiloxEngine noise(seed, 1u << 20);
  const Observation obs = generate_synthetic(x0, 0.05, noise);
  SamplerConfig cfg;
  cfg.seed = seed;
  const PosteriorSummary s = mmse_estimate(posterior_sample(obs, 2000, cfg));
  out.push_back(detail::at_least("posterior.planted_overlap", std::abs(s.top_direction.dot(x0)), 0.99));
  out.push_back(detail::at_most("posterior.trace_error", std::abs(s.mmse.trace() - 1.0), 1e-12));

  const Observation flat{SymmetricMatrix::identity(4), 1.0};
  const PosteriorSummary u = mmse_estimate(posterior_sample(flat, 2000, cfg));
  const double dev = (u.mmse - Matrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff();
  out.push_back(detail::at_most("posterior.identity_mmse_max_deviation", dev, 4.0 * 0.25 / std::sqrt(2000.0)));
  return out;
}

inline SuiteReport ratio_suite(std::uint64_t) {
  SuiteReport out;
  const std::vector<double> grid = default_omega_grid();
  double prev = 0.0;
  bool increasing = true;
  for (double s2 : {0.0, 4.0, 16.0, 36.0}) {
    const RatioReport r = angular_gaussian_worst_ratio(s2, grid);
    out.push_back(detail::at_least("ratio.best_ratio_sigma_sq_" + std::to_string(static_cast<int>(s2)),
                                   r.best_ratio, 1.0));
    if (s2 > 0.0) increasing = increasing && r.best_ratio > prev;
    prev = r.best_ratio;
  }
  out.push_back({"ratio.strictly_increasing", increasing ? 1.0 : 0.0, 1.0, increasing});
  out.push_back(detail::at_least("ratio.best_ratio_at_36", prev, 10.0));
  return out;
}

inline const std::map<std::string, std::function<SuiteReport(std::uint64_t)>>& validation_suites() {
  static const std::map<std::string, std::function<SuiteReport(std::uint64_t)>> suites{
      {"moments", moments_suite}, {"cdf", cdf_suite},     {"sampler", sampler_suite},
      {"posterior", posterior_suite}, {"ratio", ratio_suite},
  };
  return suites;
}

/// Runs one suite, or every suite for "all". Throws std::out_of_range for an
/// unknown name.
inline SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  const auto& suites = validation_suites();
  if (name == "all") {
    SuiteReport out;
    for (const auto& [_, fn] : suites) {
      SuiteReport part = fn(seed);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  const auto it = suites.find(name);
  if (it == suites.end()) throw std::out_of_range("unknown suite '" + name + "'");
  return it->second(seed);
}

}  // namespace bingham
