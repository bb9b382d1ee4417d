// Rank-1 matrix inference with a uniform prior on the sphere.
//
// Observing Y = x x^T + N with Gaussian noise of scale gamma, the posterior
// over unit x is p(x | Y) ∝ exp(x^T Y x / (2 gamma^2)), a Bingham
// distribution, so posterior expectations can be estimated from exact
// samples. Y does not need to come from the planted model.
#pragma once

#include "bingham/linalg.hpp"
#include "bingham/sampler.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace bingham {

struct Observation {
  SymmetricMatrix Y;
  double gamma = 1.0;
};

struct PosteriorSummary {
  Matrix mmse;           // posterior mean of x x^T
  Vector top_direction;  // leading eigenvector of mmse, sign arbitrary
  long sample_count = 0;
};

inline SymmetricMatrix build_posterior(const Observation& obs) {
  if (!(obs.gamma > 0.0) || !std::isfinite(obs.gamma)) {
    throw std::invalid_argument("build_posterior: gamma must be positive");
  }
  return obs.Y.scaled(1.0 / (2.0 * obs.gamma * obs.gamma));
}

/// Y = x0 x0^T + gamma (G + G^T) / 2 with G standard normal entries.
template <class Rng>
Observation generate_synthetic(const Vector& x0, double gamma, Rng& rng) {
  if (x0.size() < 1 || std::abs(x0.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("generate_synthetic: x0 must be a unit vector");
  }
  if (!(gamma >= 0.0)) throw std::invalid_argument("generate_synthetic: gamma must be >= 0");
  const Eigen::Index d = x0.size();
  std::normal_distribution<double> normal;
  Matrix g(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = normal(rng);
  Matrix y = x0 * x0.transpose();
  if (gamma > 0.0) y += gamma * 0.5 * (g + g.transpose());
  return Observation{SymmetricMatrix(y), gamma};
}

inline SampleBatch posterior_sample(const Observation& obs, long count, const SamplerConfig& cfg = {}) {
  return sample_bingham(build_posterior(obs), count, cfg);
}

inline PosteriorSummary mmse_estimate(const SampleBatch& batch) {
  if (batch.samples.empty()) throw std::invalid_argument("mmse_estimate: empty batch");
  const Eigen::Index d = batch.samples.front().size();
  Matrix acc = Matrix::Zero(d, d);
  for (const Vector& x : batch.samples) {
    if (x.size() != d) throw std::invalid_argument("mmse_estimate: mixed dimensions");
    acc.noalias() += x * x.transpose();
  }
  PosteriorSummary out;
  out.sample_count = static_cast<long>(batch.samples.size());
  out.mmse = acc / static_cast<double>(out.sample_count);
  out.mmse = 0.5 * (out.mmse + out.mmse.transpose());
  const EigenDecomposition eig = eigendecompose(SymmetricMatrix(out.mmse));
  out.top_direction = eig.vectors.col(d - 1);
  return out;
}

}  // namespace bingham
