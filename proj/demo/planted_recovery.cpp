// Plants a unit vector, observes it through Gaussian noise at several noise
// levels, and reports how well the posterior MMSE estimate recovers it.
#include "bingham/bingham.hpp"

#include <cstdio>
#include <random>

int main() {
  constexpr int d = 5;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  bingham::Vector x0(d);
  for (int i = 0; i < d; ++i) x0(i) = normal(rng);
  x0.normalize();

  std::printf("%8s %8s %10s %10s\n", "gamma", "gap", "overlap", "accept");
  for (double gamma : {0.05, 0.1, 0.2, 0.5, 1.0}) {
    bingham::PhiloxEngine noise(1, 0);
    const bingham::Observation obs = bingham::generate_synthetic(x0, gamma, noise);
    bingham::SamplerConfig cfg;
    cfg.seed = 11;
    const auto batch = bingham::posterior_sample(obs, 2000, cfg);
    const auto summary = bingham::mmse_estimate(batch);
    std::printf("%8.3f %8.2f %10.4f %10.3f\n", gamma, batch.gap, std::abs(summary.top_direction.dot(x0)),
                batch.total_acceptance_rate);
  }
}
