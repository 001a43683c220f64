#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string_view>
#include <utility>

#include "metrodiff/linalg.hpp"
#include "metrodiff/model.hpp"

namespace metrodiff {

enum class SpringKind { wlc, hookean };

/// Bead-spring DNA chain in a solvent. Lengths in micrometres, time in
/// seconds, energies in the units of thermal_energy.
struct RpyChainParams {
  int n_beads = 11;
  double bead_radius = 0.077;        // R_b
  double max_spring = 2.1;           // ell, maximum spring length
  double kuhn = 0.1;                 // b_k
  double viscosity = 1e-9;           // eta_s
  double thermal_energy = 4.11e-9;   // 1/beta
  SpringKind spring = SpringKind::wlc;

  [[nodiscard]] double zeta() const { return 6.0 * std::numbers::pi * viscosity * bead_radius; }
  [[nodiscard]] double hookean_stiffness() const { return 3.0 * thermal_energy / (kuhn * max_spring); }

  bool operator==(const RpyChainParams&) const = default;
};

class ZeroSeparationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Far branch (r > 2 R_b) of the pair-mobility scalars (C1, C2).
[[nodiscard]] inline std::pair<double, double> rpy_far_coefficients(double r, double bead_radius) {
  const double a = bead_radius / r;
  return {0.75 * a + 0.5 * a * a * a, 0.75 * a - 1.5 * a * a * a};
}

/// Near branch (r <= 2 R_b), regularized for overlapping beads.
[[nodiscard]] inline std::pair<double, double> rpy_near_coefficients(double r, double bead_radius) {
  const double s = r / bead_radius;
  return {1.0 - 9.0 / 32.0 * s, 3.0 / 32.0 * s};
}

[[nodiscard]] inline std::pair<double, double> rpy_coefficients(double r, double bead_radius) {
  return r > 2.0 * bead_radius ? rpy_far_coefficients(r, bead_radius) : rpy_near_coefficients(r, bead_radius);
}

/// Off-diagonal 3x3 block (1/zeta)(C1 I + C2 qhat qhat^T) for separation q.
[[nodiscard]] inline Matrix<3> rpy_block(const Vector<3>& q, const RpyChainParams& p) {
  const double r = q.norm();
  if (!(r > 0.0)) throw ZeroSeparationError("rpy_block: zero bead separation");
  const auto [c1, c2] = rpy_coefficients(r, p.bead_radius);
  const Vector<3> u = q / r;
  const Matrix<3> uu = u * u.transpose();
  return (c1 * Matrix<3>::Identity() + c2 * uu) / p.zeta();
}

/// Worm-like-chain spring energy; +inf for r >= ell.
[[nodiscard]] inline double wlc_energy(double r, const RpyChainParams& p) {
  if (!(r >= 0.0 && r < p.max_spring)) return kInfiniteEnergy;
  const double l = p.max_spring;
  return p.thermal_energy / (2.0 * p.kuhn) * (l * l / (l - r) - r + 2.0 * r * r / l);
}

[[nodiscard]] inline double wlc_derivative(double r, const RpyChainParams& p) {
  const double l = p.max_spring;
  const double d = l - r;
  return p.thermal_energy / (2.0 * p.kuhn) * (l * l / (d * d) - 1.0 + 4.0 * r / l);
}

/// Assembled 3N x 3N mobility. Coincident beads use the r -> 0 limit of the
/// near branch, which is (1/zeta) I.
[[nodiscard]] inline Matrix<Eigen::Dynamic> rpy_mobility(const Vector<Eigen::Dynamic>& x, const RpyChainParams& p) {
  const Eigen::Index nb = x.size() / 3;
  const double inv_zeta = 1.0 / p.zeta();
  Matrix<Eigen::Dynamic> m(x.size(), x.size());
  for (Eigen::Index i = 0; i < nb; ++i) {
    m.block<3, 3>(3 * i, 3 * i) = inv_zeta * Matrix<3>::Identity();
    for (Eigen::Index j = i + 1; j < nb; ++j) {
      const Vector<3> q = x.segment<3>(3 * i) - x.segment<3>(3 * j);
      const Matrix<3> b = q.squaredNorm() > 0.0 ? rpy_block(q, p) : Matrix<3>(inv_zeta * Matrix<3>::Identity());
      m.block<3, 3>(3 * i, 3 * j) = b;
      m.block<3, 3>(3 * j, 3 * i) = b;
    }
  }
  return m;
}

/// Bead-spring chain with pairwise Rotne-Prager-Yamakawa hydrodynamics and
/// WLC (or Hookean) springs between consecutive beads. State layout is
/// (x_1, y_1, z_1, x_2, ...).
class RpyChain : public Model<RpyChain, Eigen::Dynamic> {
 public:
  static constexpr std::string_view kName = "rpy_chain";

  explicit RpyChain(RpyChainParams p = {}) : p_(p) {
    if (p_.n_beads < 2) throw std::invalid_argument("rpy_chain: n_beads must be at least 2");
    if (!(p_.bead_radius > 0.0 && p_.max_spring > 0.0 && p_.kuhn > 0.0 && p_.viscosity > 0.0 &&
          p_.thermal_energy > 0.0)) {
      throw std::invalid_argument("rpy_chain: physical parameters must be positive");
    }
  }

  [[nodiscard]] Eigen::Index dim() const { return 3 * p_.n_beads; }
  [[nodiscard]] std::string_view name() const { return kName; }
  [[nodiscard]] const RpyChainParams& params() const { return p_; }

  [[nodiscard]] bool inside(const Point& x) const {
    if (p_.spring == SpringKind::hookean) return true;
    for (int i = 0; i + 1 < p_.n_beads; ++i) {
      if (!(bond(x, i).norm() < p_.max_spring)) return false;
    }
    return true;
  }

  [[nodiscard]] double energy_inside(const Point& x) const {
    double u = 0.0;
    for (int i = 0; i + 1 < p_.n_beads; ++i) {
      const double r = bond(x, i).norm();
      u += p_.spring == SpringKind::wlc ? wlc_energy(r, p_) : 0.5 * p_.hookean_stiffness() * r * r;
    }
    return u;
  }

  [[nodiscard]] Point grad_inside(const Point& x) const {
    Point g = Point::Zero(dim());
    for (int i = 0; i + 1 < p_.n_beads; ++i) {
      const Vector<3> q = bond(x, i);
      Vector<3> f;
      if (p_.spring == SpringKind::hookean) {
        f = p_.hookean_stiffness() * q;
      } else {
        const double r = q.norm();
        f = r > 0.0 ? Vector<3>(wlc_derivative(r, p_) / r * q) : Vector<3>::Zero();
      }
      g.segment<3>(3 * (i + 1)) += f;
      g.segment<3>(3 * i) -= f;
    }
    return g;
  }

  [[nodiscard]] MobilityMatrix mobility_inside(const Point& x) const { return rpy_mobility(x, p_); }

  /// Straight chain along the x axis with the given bead spacing.
  [[nodiscard]] Point straight_chain(double spacing = 1.5) const {
    Point x = Point::Zero(dim());
    for (int i = 0; i < p_.n_beads; ++i) x(3 * i) = spacing * i;
    return x;
  }

 private:
  [[nodiscard]] static Vector<3> bond(const Point& x, int i) { return x.segment<3>(3 * (i + 1)) - x.segment<3>(3 * i); }

  RpyChainParams p_;
};

}  // namespace metrodiff
