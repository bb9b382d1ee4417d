#pragma once

#include "bingham/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace bingham::testing {

inline Matrix random_orthogonal(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix g(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // fix column signs so q is Haar-distributed
  for (Eigen::Index j = 0; j < d; ++j) {
    if (qr.matrixQR()(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

/// Q diag(lambda) Q^T with lambda spread over [offset, offset + gap], both
/// endpoints present.
inline SymmetricMatrix random_with_gap(Eigen::Index d, double gap, std::mt19937_64& rng, double offset = 0.0) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector lambda(d);
  for (Eigen::Index i = 0; i < d; ++i) lambda(i) = offset + gap * unif(rng);
  lambda(0) = offset;
  if (d > 1) lambda(d - 1) = offset + gap;
  const Matrix q = random_orthogonal(d, rng);
  return SymmetricMatrix(q * lambda.asDiagonal() * q.transpose());
}

inline Vector random_unit(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector x(d);
  for (Eigen::Index i = 0; i < d; ++i) x(i) = normal(rng);
  return x.normalized();
}

/// One-sample KS distance against a continuous CDF given in closed form.
inline double ks_against(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    worst = std::max({worst, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return worst;
}

inline double ks_crit(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

}  // namespace bingham::testing
