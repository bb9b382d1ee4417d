// Symmetric eigendecomposition and the small amount of dense linear algebra
// the sampler needs.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace bingham {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense real symmetric matrix. Any input is replaced by (M + M^T) / 2 on
/// construction, which leaves x^T M x unchanged.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;

  explicit SymmetricMatrix(const Matrix& m) {
    if (m.rows() != m.cols()) {
      throw std::invalid_argument("SymmetricMatrix: matrix is not square (" +
                                  std::to_string(m.rows()) + "x" +
                                  std::to_string(m.cols()) + ")");
    }
    if (m.rows() < 1) {
      throw std::invalid_argument("SymmetricMatrix: dimension must be >= 1");
    }
    entries_ = 0.5 * (m + m.transpose());
  }

  static SymmetricMatrix identity(Eigen::Index d) {
    return SymmetricMatrix(Matrix::Identity(d, d));
  }
  static SymmetricMatrix diagonal(const Vector& diag) {
    return SymmetricMatrix(Matrix(diag.asDiagonal()));
  }

  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  bool is_finite() const { return entries_.allFinite(); }

  /// True when the raw input differs from its symmetrization.
  static bool needs_symmetrization(const Matrix& m) {
    return m.rows() == m.cols() && !(m.array() == m.transpose().array()).all();
  }

  SymmetricMatrix shifted(double c) const {
    Matrix m = entries_;
    m.diagonal().array() += c;
    return SymmetricMatrix(m);
  }

  SymmetricMatrix scaled(double c) const { return SymmetricMatrix(c * entries_); }

 private:
  Matrix entries_;
};

struct EigenDecomposition {
  Matrix vectors;  // columns are eigenvectors
  Vector values;   // ascending
};

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace detail

/// Cyclic Jacobi eigendecomposition. Sweeps over all (p, q) pairs until the
/// off-diagonal Frobenius norm drops to 1e-13 * ||A||_F. Eigenvalues are
/// returned ascending; ties keep their original index order.
inline EigenDecomposition eigendecompose(const SymmetricMatrix& sym) {
  if (!sym.is_finite()) {
    throw std::invalid_argument("eigendecompose: matrix has non-finite entries");
  }
  const Eigen::Index d = sym.dim();
  Matrix a = sym.entries();
  Matrix v = Matrix::Identity(d, d);

  const double target = 1e-13 * a.norm();
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (detail::off_diagonal_norm(a) <= target) break;
    for (Eigen::Index p = 0; p < d - 1; ++p) {
      for (Eigen::Index q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle chosen so that the (p, q) entry vanishes; t is the
        // smaller root of t^2 + 2 theta t - 1 = 0.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = a(p, p);
        const double aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index r = 0; r < d; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = arp - s * (arq + tau * arp);
          a(p, r) = a(r, p);
          a(r, q) = arq + s * (arp - tau * arq);
          a(q, r) = a(r, q);
        }
        for (Eigen::Index r = 0; r < d; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  EigenDecomposition out{Matrix(d, d), Vector(d)};
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src);
    out.vectors.col(k) = v.col(src);
  }
  return out;
}

inline double quadratic_form(const SymmetricMatrix& m, const Vector& x) {
  if (x.size() != m.dim()) {
    throw std::invalid_argument("quadratic_form: dimension mismatch");
  }
  return x.dot(m.entries() * x);
}

/// x^T diag(d) x.
inline double quadratic_form(const Vector& diag, const Vector& x) {
  if (x.size() != diag.size()) {
    throw std::invalid_argument("quadratic_form: dimension mismatch");
  }
  return (diag.array() * x.array().square()).sum();
}

/// Returns V z, renormalized when rounding has moved the norm away from 1.
inline Vector rotate(const Matrix& v, const Vector& z) {
  if (v.cols() != z.size() || v.rows() != v.cols()) {
    throw std::invalid_argument("rotate: dimension mismatch");
  }
  Vector x = v * z;
  const double norm = x.norm();
  if (std::abs(norm - 1.0) > 1e-12 && norm > 0.0) x /= norm;
  return x;
}

}  // namespace bingham
