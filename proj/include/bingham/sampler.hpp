// Exact sampling from the Bingham distribution p(x) ∝ exp(x^T A x) on the
// unit sphere by rejection from the polynomial proposal
//
//     q(z) ∝ (z^T (I + D/n) z)^n,   D = Λ - λ_min I,  n = max(1, ceil(gap^2)).
//
// For unit z, n log(1 + z^T D z / n) lies in [z^T D z - gap^2 / (2n), z^T D z],
// so accepting with probability exp(-1 + z^T D z) / (z^T (I + D/n) z)^n never
// exceeds e^{-1/2} and accepts on average with probability at least e^{-1}.
#pragma once

#include "bingham/cdf.hpp"
#include "bingham/linalg.hpp"
#include "bingham/random.hpp"

#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace bingham {

struct SpectrumShift {
  Matrix V;   // eigenvectors of A, columns in ascending eigenvalue order
  Vector D;   // lambda - lambda_min; D(0) == 0
  int n = 1;  // proposal exponent
  double gap = 0.0;
};

/// How proposals are drawn. Both draw exactly from q; `automatic` uses
/// inversion up to kInversionMaxExponent and the mixture form above it.
enum class ProposalMethod { automatic, inversion, mixture };

struct SamplerConfig {
  std::uint64_t seed = 0;
  ProposalMethod proposal = ProposalMethod::automatic;
  long max_rejections = 1'000'000;
  double cdf_tolerance = 1e-13;
  unsigned threads = 1;

  void validate() const {
    if (max_rejections < 1) throw std::invalid_argument("SamplerConfig: max_rejections must be >= 1");
    if (!(cdf_tolerance > 0.0 && cdf_tolerance <= 1e-6)) {
      throw std::invalid_argument("SamplerConfig: cdf_tolerance must lie in (0, 1e-6]");
    }
  }
};

struct SampleBatch {
  std::vector<Vector> samples;
  std::vector<long> proposals_used;
  std::uint64_t seed = 0;
  double total_acceptance_rate = 1.0;
  int n = 1;
  double gap = 0.0;
};

inline constexpr int kMaxProposalExponent = 10'000'000;
inline constexpr int kInversionMaxExponent = 2'500;

inline SpectrumShift shift_spectrum(const EigenDecomposition& eig) {
  const Eigen::Index d = eig.values.size();
  if (d < 1 || eig.vectors.rows() != d || eig.vectors.cols() != d) {
    throw std::invalid_argument("shift_spectrum: malformed decomposition");
  }
  SpectrumShift s;
  s.V = eig.vectors;
  s.D = eig.values.array() - eig.values(0);
  s.gap = s.D(d - 1);
  const double n = std::max(1.0, std::ceil(s.gap * s.gap));
  if (!(n <= kMaxProposalExponent)) {
    throw std::invalid_argument("shift_spectrum: spectral gap " + std::to_string(s.gap) +
                                " needs proposal exponent above " +
                                std::to_string(kMaxProposalExponent));
  }
  s.n = static_cast<int>(n);
  return s;
}

/// Diagonal of the conditional proposal once the leading coordinate fixes
/// y_head: y^2 D[0] + (1 - y^2) D[1..].
inline Vector conditional_diag(const Vector& d_cur, double y_head) {
  if (d_cur.size() < 2) throw std::invalid_argument("conditional_diag: need at least 2 entries");
  const double y2 = y_head * y_head;
  const double rest = (1.0 - y_head) * (1.0 + y_head);
  Vector out(d_cur.size() - 1);
  for (Eigen::Index i = 1; i < d_cur.size(); ++i) {
    out(i - 1) = std::max(0.0, y2 * d_cur(0) + rest * d_cur(i));
  }
  return out;
}

/// log of e^{-1} exp(z^T D z) / (z^T (I + D/n) z)^n. Always in
/// [-1, -1 + max(D)^2 / (2n)]; a positive value means a broken invariant.
inline double log_accept_ratio(const Vector& d, int n, const Vector& z) {
  // z is taken as projected onto the sphere, so rounding in |z| does not leak in
  const double q = quadratic_form(d, z) / z.squaredNorm();
  const double excess = q - n * std::log1p(q / n);
  const double r = -1.0 + std::max(0.0, excess);
  if (r > 1e-12) {
    throw std::logic_error("log_accept_ratio: positive log ratio " + std::to_string(r));
  }
  return std::min(r, 0.0);
}

/// Draws from q(z) ∝ (z^T (I + D/n) z)^n one coordinate at a time.
class ProposalSampler {
 public:
  explicit ProposalSampler(SpectrumShift shift, double cdf_tolerance = 1e-13)
      : shift_(std::move(shift)), tolerance_(cdf_tolerance) {
    const auto d = static_cast<int>(shift_.D.size());
    for (int m = 2; m <= d; ++m) layouts_.emplace_back(shift_.n, m);
  }

  const SpectrumShift& shift() const { return shift_; }

  template <class Rng>
  Vector operator()(Rng& rng) const {
    const auto d = static_cast<int>(shift_.D.size());
    const double n = shift_.n;
    Vector z(d);
    Vector d_cur = shift_.D;
    double radius = 1.0;
    std::vector<double> lambda_rest;
    for (int i = 0; i < d; ++i) {
      const int m = d - i;
      if (m == 1) {
        z(i) = rng.coin() ? radius : -radius;
        break;
      }
      lambda_rest.resize(static_cast<std::size_t>(m - 1));
      for (int j = 1; j < m; ++j) lambda_rest[static_cast<std::size_t>(j - 1)] = 1.0 + d_cur(j) / n;
      const MarginalCDF cdf = build_marginal(layouts_[static_cast<std::size_t>(m - 2)],
                                             1.0 + d_cur(0) / n, lambda_rest);
      const double y = invert_cdf(cdf, rng.uniform(), tolerance_);
      z(i) = y * radius;
      radius *= std::sqrt((1.0 - y) * (1.0 + y));
      d_cur = conditional_diag(d_cur, y);
    }
    return z / z.norm();
  }

 private:
  SpectrumShift shift_;
  double tolerance_;
  std::vector<MarginalLayout> layouts_;
};

template <class Rng>
Vector sample_proposal(const SpectrumShift& shift, Rng& rng, double cdf_tolerance = 1e-13) {
  return ProposalSampler(shift, cdf_tolerance)(rng);
}

/// Draws from the same q through its multinomial expansion
///
///     (sum_i c_i z_i^2)^n = sum_{|k| = n} n! / prod k_i! * prod c_i^{k_i} z_i^{2 k_i},   c = 1 + D/n.
///
/// Given k, z_i^2 ~ Dirichlet(k_i + 1/2) with independent signs, and k itself
/// has weight prod_i c_i^{k_i} Gamma(k_i + 1/2) / k_i!. The weights factor over
/// coordinates, so k is drawn one coordinate at a time from suffix
/// convolutions tabulated once per matrix: O(d n^2) setup, O(d n) per draw.
class MixtureProposalSampler {
 public:
  explicit MixtureProposalSampler(SpectrumShift shift) : shift_(std::move(shift)) {
    const auto d = static_cast<std::size_t>(shift_.D.size());
    const auto n = static_cast<std::size_t>(shift_.n);
    const double top = 1.0 + shift_.D(shift_.D.size() - 1) / shift_.n;
    // g_i(j) = (c_i / top)^j binom(2j, j) / 4^j
    coef_.assign(d, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n) + 1));
    for (std::size_t i = 0; i < d; ++i) {
      const double r = (1.0 + shift_.D(static_cast<Eigen::Index>(i)) / shift_.n) / top;
      double g = 1.0;
      for (std::size_t j = 0; j <= n && g > 0.0; ++j) {
        coef_[i](static_cast<Eigen::Index>(j)) = g;
        g *= r * (static_cast<double>(j) + 0.5) / static_cast<double>(j + 1);
      }
    }
    // suffix_[i](j): total weight of k_i + ... + k_{d-1} = j
    suffix_.assign(d, Eigen::VectorXd());
    suffix_[d - 1] = coef_[d - 1];
    for (std::size_t i = d - 1; i-- > 0;) {
      const auto top_index = static_cast<Eigen::Index>(n);
      const Eigen::VectorXd next_rev = suffix_[i + 1].reverse();
      Eigen::VectorXd out(top_index + 1);
      for (Eigen::Index j = 0; j <= top_index; ++j) {
        // sum_{l <= j} coef_i(l) next(j - l), with next(j - l) = next_rev(n - j + l)
        out(j) = coef_[i].head(j + 1).dot(next_rev.segment(top_index - j, j + 1));
      }
      suffix_[i] = std::move(out);
    }
  }

  const SpectrumShift& shift() const { return shift_; }

  template <class Rng>
  Vector operator()(Rng& rng) const {
    const auto d = static_cast<Eigen::Index>(shift_.D.size());
    Vector z(d);
    long remaining = shift_.n;
    double norm_sq = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      long k = remaining;
      if (i + 1 < d) {
        const Eigen::VectorXd& coef = coef_[static_cast<std::size_t>(i)];
        const Eigen::VectorXd& next = suffix_[static_cast<std::size_t>(i + 1)];
        const double target = rng.uniform() * suffix_[static_cast<std::size_t>(i)](remaining);
        double acc = 0.0;
        long last_positive = 0;
        k = -1;
        for (long j = 0; j <= remaining; ++j) {
          const double w = coef(j) * next(remaining - j);
          if (w > 0.0) last_positive = j;
          acc += w;
          if (acc > target) {
            k = j;
            break;
          }
        }
        if (k < 0) k = last_positive;  // rounding left target just above the sum
      }
      remaining -= k;
      std::gamma_distribution<double> gamma(static_cast<double>(k) + 0.5);
      const double g = gamma(rng);
      norm_sq += g;
      z(i) = rng.coin() ? std::sqrt(g) : -std::sqrt(g);
    }
    return z / std::sqrt(norm_sq);
  }

 private:
  SpectrumShift shift_;
  std::vector<Eigen::VectorXd> coef_;
  std::vector<Eigen::VectorXd> suffix_;
};

/// The configured proposal engine for one matrix.
class Proposal {
 public:
  Proposal(const SpectrumShift& shift, const SamplerConfig& cfg) {
    const bool mixture = cfg.proposal == ProposalMethod::mixture ||
                         (cfg.proposal == ProposalMethod::automatic && shift.n > kInversionMaxExponent);
    if (mixture) {
      mixture_.emplace(shift);
    } else {
      inversion_.emplace(shift, cfg.cdf_tolerance);
    }
  }

  template <class Rng>
  Vector operator()(Rng& rng) const {
    return inversion_ ? (*inversion_)(rng) : (*mixture_)(rng);
  }

 private:
  std::optional<ProposalSampler> inversion_;
  std::optional<MixtureProposalSampler> mixture_;
};

template <class Rng>
Vector uniform_on_sphere(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector g(d);
  double norm = 0.0;
  while (norm == 0.0) {
    for (Eigen::Index i = 0; i < d; ++i) g(i) = normal(rng);
    norm = g.norm();
  }
  return g / norm;
}

namespace detail {

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

/// Draws `count` independent samples. Sample i uses stream i of the seed.
inline SampleBatch sample_bingham(const SymmetricMatrix& a, long count, const SamplerConfig& cfg = {}) {
  if (count < 1) throw std::invalid_argument("sample_bingham: count must be >= 1");
  if (!a.is_finite()) throw std::invalid_argument("sample_bingham: matrix has non-finite entries");
  cfg.validate();

  const SpectrumShift shift = shift_spectrum(eigendecompose(a));
  const auto total = static_cast<std::size_t>(count);
  SampleBatch batch;
  batch.seed = cfg.seed;
  batch.n = shift.n;
  batch.gap = shift.gap;
  batch.samples.resize(total);
  batch.proposals_used.assign(total, 1);

  if (shift.gap == 0.0) {
    detail::parallel_for(total, cfg.threads, [&](std::size_t i) {
      PhiloxEngine rng(cfg.seed, i);
      batch.samples[i] = uniform_on_sphere(a.dim(), rng);
    });
    batch.total_acceptance_rate = 1.0;
    return batch;
  }

  const Proposal proposal(shift, cfg);
  detail::parallel_for(total, cfg.threads, [&](std::size_t i) {
    PhiloxEngine rng(cfg.seed, i);
    for (long tries = 1; tries <= cfg.max_rejections; ++tries) {
      const Vector z = proposal(rng);
      const double log_u = std::log(rng.uniform());
      if (log_u < log_accept_ratio(shift.D, shift.n, z)) {
        batch.samples[i] = rotate(shift.V, z);
        batch.proposals_used[i] = tries;
        return;
      }
    }
    throw std::runtime_error("sample_bingham: no proposal accepted after " +
                             std::to_string(cfg.max_rejections) + " tries");
  });

  long proposals = 0;
  for (long p : batch.proposals_used) proposals += p;
  batch.total_acceptance_rate = static_cast<double>(count) / static_cast<double>(proposals);
  return batch;
}

struct AcceptanceCount {
  long proposals = 0;
  long accepted = 0;
  double rate() const { return proposals > 0 ? static_cast<double>(accepted) / proposals : 0.0; }
};

/// Runs exactly `proposals` accept/reject trials on stream 0 of the seed,
/// without the uniform short-circuit for a zero gap.
inline AcceptanceCount count_acceptances(const SymmetricMatrix& a, long proposals, const SamplerConfig& cfg = {}) {
  if (proposals < 1) throw std::invalid_argument("count_acceptances: proposals must be >= 1");
  cfg.validate();
  const SpectrumShift shift = shift_spectrum(eigendecompose(a));
  const Proposal proposal(shift, cfg);
  PhiloxEngine rng(cfg.seed, 0);
  AcceptanceCount out;
  for (long i = 0; i < proposals; ++i) {
    const Vector z = proposal(rng);
    const double log_u = std::log(rng.uniform());
    ++out.proposals;
    if (log_u < log_accept_ratio(shift.D, shift.n, z)) ++out.accepted;
  }
  return out;
}

}  // namespace bingham
