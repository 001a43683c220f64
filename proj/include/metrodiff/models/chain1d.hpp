#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "metrodiff/linalg.hpp"
#include "metrodiff/model.hpp"

namespace metrodiff {

struct Chain1dParams {
  int n_beads = 8;
  double mu = 1.0;       // solvent viscosity
  double length = 1.0;   // interval length L
  double epsilon = 1.0;  // FENE energy constant
  double ell = 1.0;      // FENE rest length; the experiment tables fix only L

  bool operator==(const Chain1dParams&) const = default;
};

/// Initial bead positions of the 8-bead lattice experiment.
inline std::vector<double> chain1d_default_initial() { return {0.1, 0.11, 0.33, 0.34, 0.56, 0.57, 0.79, 0.81}; }

/// Equilibrium tick marks of the 8-bead lattice experiment.
inline std::vector<double> chain1d_equilibrium_ticks() { return {0.1, 0.21, 0.33, 0.44, 0.55, 0.67, 0.79, 0.9}; }

/// FENE spring energy; +inf outside (0, 2 ell).
[[nodiscard]] inline double fene_energy(double r, const Chain1dParams& p) {
  if (!(r > 0.0 && r < 2.0 * p.ell)) return kInfiniteEnergy;
  const double s = r / (2.0 * p.ell);
  const double arg = 1.0 - s * s - (1.0 - s) * (1.0 - s);
  return -0.5 * p.epsilon * std::log(arg);
}

/// dU/dr of the FENE spring, for r in (0, 2 ell).
[[nodiscard]] inline double fene_derivative(double r, const Chain1dParams& p) {
  const double s = r / (2.0 * p.ell);
  return -p.epsilon * (1.0 - 2.0 * s) / (4.0 * p.ell * s * (1.0 - s));
}

namespace detail {

// Gap k (0..n) between bead k and bead k+1, with ghosts q_0 = 0, q_{n+1} = L.
template <int N>
double chain_gap(const Vector<N>& q, Eigen::Index k, const Chain1dParams& p) {
  const Eigen::Index n = q.size();
  const double left = k == 0 ? 0.0 : q(k - 1);
  const double right = k == n ? p.length : q(k);
  return right - left;
}

}  // namespace detail

/// Tridiagonal friction matrix of beads on (0, L) with ghost walls.
template <int N>
[[nodiscard]] Matrix<N> friction_matrix(const Vector<N>& q, const Chain1dParams& p) {
  const Eigen::Index n = q.size();
  Matrix<N> gamma = Matrix<N>::Zero(n, n);
  for (Eigen::Index k = 0; k <= n; ++k) {
    if (!(detail::chain_gap(q, k, p) > 0.0)) {
      throw OutOfDomainError("friction_matrix: beads are not strictly ordered in (0, L) at gap " +
                             std::to_string(k));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    gamma(i, i) = p.mu / detail::chain_gap(q, i, p) + p.mu / detail::chain_gap(q, i + 1, p);
    if (i + 1 < n) {
      gamma(i, i + 1) = -p.mu / detail::chain_gap(q, i + 1, p);
      gamma(i + 1, i) = gamma(i, i + 1);
    }
  }
  return gamma;
}

template <int N>
[[nodiscard]] Matrix<N> chain1d_mobility(const Vector<N>& q, const Chain1dParams& p) {
  return inverse(cholesky(friction_matrix(q, p)));
}

/// Beads on a line, joined to each other and to the walls at 0 and L by FENE
/// springs. The friction matrix Gamma is tridiagonal and M = Gamma^{-1}.
template <int N = Eigen::Dynamic>
class Chain1d : public Model<Chain1d<N>, N> {
  using Base = Model<Chain1d<N>, N>;

 public:
  using typename Base::MobilityMatrix;
  using typename Base::Point;
  static constexpr std::string_view kName = "chain1d";

  explicit Chain1d(Chain1dParams p = {}) : p_(p) {
    if (p_.n_beads < 1) throw std::invalid_argument("chain1d: n_beads must be at least 1");
    if (N != Eigen::Dynamic && N != p_.n_beads) throw std::invalid_argument("chain1d: n_beads does not match N");
    if (!(p_.mu > 0.0 && p_.length > 0.0 && p_.epsilon > 0.0 && p_.ell > 0.0)) {
      throw std::invalid_argument("chain1d: mu, length, epsilon and ell must be positive");
    }
  }

  [[nodiscard]] Eigen::Index dim() const { return p_.n_beads; }
  [[nodiscard]] std::string_view name() const { return kName; }
  [[nodiscard]] const Chain1dParams& params() const { return p_; }

  [[nodiscard]] bool inside(const Point& q) const {
    for (Eigen::Index k = 0; k <= q.size(); ++k) {
      const double gap = detail::chain_gap(q, k, p_);
      if (!(gap > 0.0 && gap < 2.0 * p_.ell)) return false;
    }
    return true;
  }

  [[nodiscard]] double energy_inside(const Point& q) const {
    double u = 0.0;
    for (Eigen::Index k = 0; k <= q.size(); ++k) u += fene_energy(detail::chain_gap(q, k, p_), p_);
    return u;
  }

  /// U(q1) - U(q0) spring by spring, from the displacement q1 - q0 and log1p.
  [[nodiscard]] double energy_difference_inside(const Point& q0, const Point& q1) const {
    const Eigen::Index n = q0.size();
    const Point d = q1 - q0;
    double du = 0.0;
    for (Eigen::Index k = 0; k <= n; ++k) {
      const double dr = (k == n ? 0.0 : d(k)) - (k == 0 ? 0.0 : d(k - 1));
      const double s0 = detail::chain_gap(q0, k, p_) / (2.0 * p_.ell);
      const double ds = dr / (2.0 * p_.ell);
      const double arg0 = 2.0 * s0 * (1.0 - s0);
      const double darg = 2.0 * ds * (1.0 - 2.0 * s0 - ds);
      du += -0.5 * p_.epsilon * std::log1p(darg / arg0);
    }
    return du;
  }

  [[nodiscard]] Point grad_inside(const Point& q) const {
    const Eigen::Index n = q.size();
    Point g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      g(i) = fene_derivative(detail::chain_gap(q, i, p_), p_) - fene_derivative(detail::chain_gap(q, i + 1, p_), p_);
    }
    return g;
  }

  [[nodiscard]] MobilityMatrix mobility_inside(const Point& q) const { return chain1d_mobility(q, p_); }

  [[nodiscard]] Point default_initial() const {
    const auto v = chain1d_default_initial();
    if (static_cast<int>(v.size()) != p_.n_beads) throw std::invalid_argument("chain1d: no default initial state");
    return Eigen::Map<const Point>(v.data(), p_.n_beads);
  }

 private:
  Chain1dParams p_;
};

}  // namespace metrodiff
