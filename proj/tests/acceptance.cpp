// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include "bingham/bingham.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace bingham;
using bingham::testing::random_unit;
using bingham::testing::random_with_gap;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// acceptance rate inside [0.348, 0.627] for 10 random matrices, 2e4 proposals each
void criterion_1() {
  std::mt19937_64 rng(1001);
  struct Case { int d; double gap; };
  std::vector<Case> cases;
  for (int d : {2, 5, 10})
    for (double gap : {0.5, 5.0, 25.0}) cases.push_back({d, gap});
  cases.push_back({7, 12.0});

  const auto t0 = Clock::now();
  double lo = 1.0, hi = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    SamplerConfig cfg;
    cfg.seed = 10 + i;
    const double rate = count_acceptances(random_with_gap(cases[i].d, cases[i].gap, rng), 20'000, cfg).rate();
    lo = std::min(lo, rate);
    hi = std::max(hi, rate);
    ok = ok && rate >= 0.348 && rate <= 0.627;
  }
  const double secs = seconds_since(t0);
  report(1, ok && secs < 60.0, fmt("rates in [%.4f, %.4f], %.1f s", lo, hi, secs));
}

// log acceptance ratio in [-1, -0.5] for random z and D
void criterion_2() {
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  long violations = 0;
  double lo = 0.0, hi = -2.0;
  for (int rep = 0; rep < 10'000; ++rep) {
    const int d = 2 + static_cast<int>(unif(rng) * 9);
    const double gap = 30.0 * unif(rng);
    Vector D(d);
    for (int i = 0; i < d; ++i) D(i) = gap * unif(rng);
    D(0) = 0.0;
    D(d - 1) = gap;
    const int n = static_cast<int>(std::max(1.0, std::ceil(gap * gap)));
    const Vector z = random_unit(d, rng);
    const double zdz = (z.array().square() * D.array()).sum();
    const double r = -1.0 + zdz - n * std::log1p(zdz / n);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    if (r < -1.0 - 1e-12 || r > -0.5 + 1e-12) ++violations;
  }
  report(2, violations == 0, fmt("range [%.6f, %.6f], %.0f violations", lo, hi, static_cast<double>(violations)));
}

// KS on every coordinate at 1e5 samples against the quadrature oracle
void criterion_3() {
  constexpr long kCount = 100'000;
  const double crit = ks_critical_1pct(kCount);
  Vector a2(2), a3(3);
  a2 << 0, 4;
  a3 << 0, 2, 5;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const Vector& diag : {a2, a3}) {
    const SymmetricMatrix a = SymmetricMatrix::diagonal(diag);
    SamplerConfig cfg;
    cfg.seed = 1003;
    const SampleBatch b = sample_bingham(a, kCount, cfg);
    for (Eigen::Index c = 0; c < diag.size(); ++c) {
      worst = std::max(worst, ks_statistic(coordinate(b.samples, c), oracle_marginal_cdf(a, c)));
    }
  }
  const double secs = seconds_since(t0);
  report(3, worst < crit && secs < 300.0, fmt("worst KS %.5f vs %.5f, %.1f s", worst, crit, secs));
}

// moment recursion against closed forms
void criterion_4() {
  double worst_scalar = 0.0;
  for (int d = 1; d <= 10; ++d) {
    for (double c : {0.1, 1.0, 3.0, 25.0}) {
      const MomentTable t = gaussian_qf_moments(std::vector<double>(static_cast<std::size_t>(d), c), 50);
      double want = 0.0;
      for (int n = 0; n <= 50; ++n) {
        if (n > 0) want += std::log(c) + std::log(d + 2.0 * (n - 1)) - std::log(2.0 * n);
        worst_scalar = std::max(worst_scalar,
                                std::abs(std::expm1(t.log_S[static_cast<std::size_t>(n)].log_value - want)));
      }
    }
  }
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> unif(0.0, 5.0);
  double worst_second = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> lambda(1 + rep % 10);
    double tr = 0.0, tr2 = 0.0;
    for (double& l : lambda) {
      l = unif(rng);
      tr += l;
      tr2 += l * l;
    }
    const double got = 8.0 * gaussian_qf_moments(lambda, 2).log_S[2].value();
    const double want = tr * tr + 2.0 * tr2;
    worst_second = std::max(worst_second, std::abs(got - want) / want);
  }
  report(4, worst_scalar <= 1e-12 && worst_second <= 1e-12,
         fmt("cI rel err %.2e, second moment rel err %.2e", worst_scalar, worst_second));
}

// with D = 0 the inversion proposal is uniform on the sphere
void criterion_5() {
  constexpr long kCount = 100'000;
  const double crit = ks_critical_1pct(kCount);
  double worst = 0.0;
  for (int d : {2, 3}) {
    SpectrumShift s;
    s.V = Matrix::Identity(d, d);
    s.D = Vector::Zero(d);
    const ProposalSampler q(s);
    PhiloxEngine rng(1005, static_cast<std::uint64_t>(d));
    std::vector<Vector> xs;
    xs.reserve(kCount);
    for (long i = 0; i < kCount; ++i) xs.push_back(q(rng));
    for (int c = 0; c < d; ++c) {
      const auto cdf = d == 2 ? std::function<double(double)>(
                                    [](double t) { return std::asin(std::clamp(t, -1.0, 1.0)) / std::numbers::pi + 0.5; })
                              : std::function<double(double)>([](double t) { return 0.5 * (t + 1.0); });
      worst = std::max(worst, bingham::testing::ks_against(coordinate(xs, c), cdf));
    }
  }
  report(5, worst < crit, fmt("worst KS %.5f vs %.5f", worst, crit));
}

// planted recovery at d = 5, gamma = 0.05
void criterion_6() {
  std::mt19937_64 rng(1006);
  const Vector x0 = random_unit(5, rng);
  PhiloxEngine e(1006);
  const Observation obs = generate_synthetic(x0, 0.05, e);
  SamplerConfig cfg;
  cfg.seed = 1006;
  const auto t0 = Clock::now();
  const PosteriorSummary s = mmse_estimate(posterior_sample(obs, 10'000, cfg));
  const double overlap = std::abs(s.top_direction.dot(x0));
  const double trace_err = std::abs(s.mmse.trace() - 1.0);
  report(6, overlap > 0.99 && trace_err <= 1e-12,
         fmt("overlap %.5f, trace error %.2e, %.1f s", overlap, trace_err, seconds_since(t0)));
}

// angular Gaussian worst-case ratio grows with sigma^2
void criterion_7() {
  const auto grid = default_omega_grid();
  std::vector<double> ratios;
  for (double s2 : {0.0, 4.0, 16.0, 36.0}) ratios.push_back(angular_gaussian_worst_ratio(s2, grid).best_ratio);
  bool increasing = true;
  for (std::size_t i = 1; i < ratios.size(); ++i) increasing = increasing && ratios[i] > ratios[i - 1];
  char buf[256];
  std::snprintf(buf, sizeof buf, "ratios %.4g %.4g %.4g %.4g", ratios[0], ratios[1], ratios[2], ratios[3]);
  report(7, increasing && ratios.back() > 10.0, buf);
}

// d = 10, gap = 25: 1e3 samples in under 10 minutes, <= 3 proposals each on average
void criterion_8() {
  std::mt19937_64 rng(1008);
  const SymmetricMatrix a = random_with_gap(10, 25.0, rng);
  SamplerConfig cfg;
  cfg.seed = 1008;
  const auto t0 = Clock::now();
  const SampleBatch b = sample_bingham(a, 1000, cfg);
  const double secs = seconds_since(t0);
  double mean = 0.0;
  for (long p : b.proposals_used) mean += static_cast<double>(p) / 1000.0;
  report(8, secs < 600.0 && mean <= 3.0, fmt("%.1f s, %.3f proposals per sample", secs, mean));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  return failures == 0 ? 0 : 1;
}
