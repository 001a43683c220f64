#pragma once

// Dense symmetric-positive-definite kernel: Cholesky factor with cached
// log-determinant, triangular solves, and a central-difference divergence
// for matrix-valued fields.

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace metrodiff {

template <int N>
using Vector = Eigen::Matrix<double, N, 1>;

template <int N>
using Matrix = Eigen::Matrix<double, N, N>;

/// Raised when a matrix handed to the SPD kernel is not symmetric positive
/// definite (non-finite entry, asymmetry above tolerance, or a non-positive
/// pivot).
class NotSpdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relative asymmetry accepted before a matrix is rejected outright. Below it
/// the matrix is averaged with its transpose.
inline constexpr double kSymmetryTolerance = 1e-12;

/// Lower-triangular factor L of an SPD matrix M = L L^T.
///
/// `log_det` is log det L = (1/2) log det M. The integrator uses L as the
/// noise coefficient B_h, so det B_h = exp(log_det) is positive by
/// construction.
template <int N>
struct CholeskyFactor {
  Matrix<N> lower;
  double log_det = 0.0;

  [[nodiscard]] int dim() const { return static_cast<int>(lower.rows()); }
};

namespace detail {

inline std::string not_spd_message(const char* what, Eigen::Index k) {
  return std::string("matrix is not SPD: ") + what + " at index " + std::to_string(k);
}

template <int N>
std::optional<std::string> symmetrize_in_place(Matrix<N>& m) {
  if (m.rows() != m.cols()) return std::string("matrix is not square");
  if (!m.allFinite()) return std::string("matrix has non-finite entries");
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    return std::string("matrix is not symmetric (relative asymmetry ") +
           std::to_string(asym / scale) + ")";
  }
  m = 0.5 * (m + m.transpose()).eval();
  return std::nullopt;
}

// Column-oriented Cholesky-Crout. Returns the index of the first failing
// pivot, or -1 on success.
template <int N>
Eigen::Index factor_lower(const Matrix<N>& m, Matrix<N>& lower, double& log_det) {
  const Eigen::Index n = m.rows();
  lower.setZero(n, n);
  log_det = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = m(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= lower(j, k) * lower(j, k);
    if (!(pivot > 0.0) || !std::isfinite(pivot)) return j;
    const double d = std::sqrt(pivot);
    lower(j, j) = d;
    log_det += std::log(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / d;
    }
  }
  return -1;
}

template <int N>
void check_rhs(const CholeskyFactor<N>& f, Eigen::Index size) {
  if (size != f.lower.rows()) {
    throw std::invalid_argument("dimension mismatch: factor is " + std::to_string(f.lower.rows()) +
                                "x" + std::to_string(f.lower.rows()) + ", rhs has " +
                                std::to_string(size) + " entries");
  }
}

}  // namespace detail

/// Factorizes `m`, returning nothing when it is not SPD. Used on hot paths
/// where a failed factorization is an ordinary outcome (rejected proposal).
template <int N>
[[nodiscard]] std::optional<CholeskyFactor<N>> try_cholesky(Matrix<N> m) {
  if (detail::symmetrize_in_place(m)) return std::nullopt;
  CholeskyFactor<N> f;
  if (detail::factor_lower(m, f.lower, f.log_det) >= 0) return std::nullopt;
  return f;
}

template <int N>
[[nodiscard]] CholeskyFactor<N> cholesky(Matrix<N> m) {
  if (auto err = detail::symmetrize_in_place(m)) throw NotSpdError(*err);
  CholeskyFactor<N> f;
  if (const auto k = detail::factor_lower(m, f.lower, f.log_det); k >= 0) {
    throw NotSpdError(detail::not_spd_message("non-positive pivot", k));
  }
  return f;
}

/// Solves L y = rhs by forward substitution.
template <int N>
[[nodiscard]] Vector<N> solve(const CholeskyFactor<N>& f, const Vector<N>& rhs) {
  detail::check_rhs(f, rhs.size());
  Vector<N> y = rhs;
  const Eigen::Index n = rhs.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = y(i);
    for (Eigen::Index k = 0; k < i; ++k) s -= f.lower(i, k) * y(k);
    y(i) = s / f.lower(i, i);
  }
  return y;
}

/// Solves L^T y = rhs by back substitution.
template <int N>
[[nodiscard]] Vector<N> solve_transpose(const CholeskyFactor<N>& f, const Vector<N>& rhs) {
  detail::check_rhs(f, rhs.size());
  Vector<N> y = rhs;
  const Eigen::Index n = rhs.size();
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double s = y(i);
    for (Eigen::Index k = i + 1; k < n; ++k) s -= f.lower(k, i) * y(k);
    y(i) = s / f.lower(i, i);
  }
  return y;
}

/// Solves (L L^T) x = rhs.
template <int N>
[[nodiscard]] Vector<N> full_solve(const CholeskyFactor<N>& f, const Vector<N>& rhs) {
  return solve_transpose(f, solve(f, rhs));
}

/// Inverse of the factored matrix, symmetrized.
template <int N>
[[nodiscard]] Matrix<N> inverse(const CholeskyFactor<N>& f) {
  const Eigen::Index n = f.lower.rows();
  Matrix<N> inv(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    inv.col(j) = full_solve(f, Vector<N>(Vector<N>::Unit(n, j)));
  }
  return 0.5 * (inv + inv.transpose());
}

[[nodiscard]] inline double default_divergence_step(double x_norm) { return 1e-5 * (1.0 + x_norm); }

/// Central-difference approximation of (div M)_i = sum_j dM_ij/dx_j.
///
/// `field` maps a point to a square matrix of the point's dimension.
template <class Field, int N>
[[nodiscard]] Vector<N> numeric_divergence(Field&& field, const Vector<N>& x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("divergence step must be positive");
  const Eigen::Index n = x.size();
  Vector<N> div = Vector<N>::Zero(n);
  Vector<N> probe = x;
  for (Eigen::Index j = 0; j < n; ++j) {
    probe(j) = x(j) + step;
    const Matrix<N> plus = field(probe);
    probe(j) = x(j) - step;
    const Matrix<N> minus = field(probe);
    probe(j) = x(j);
    if (!plus.allFinite() || !minus.allFinite()) {
      throw std::domain_error("non-finite field evaluation in numeric_divergence");
    }
    div += (plus.col(j) - minus.col(j)) / (2.0 * step);
  }
  return div;
}

}  // namespace metrodiff
