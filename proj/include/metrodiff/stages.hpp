#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "metrodiff/linalg.hpp"
#include "metrodiff/model.hpp"
#include "metrodiff/parallel.hpp"

namespace metrodiff {

enum class DriftKind { zero, euler, midpoint, rk2, rk3 };
enum class NoiseKind { frozen, rk2, rk3 };
enum class A12Kind { fixed, patched, optimized };

/// Two-stage drift coefficients. Defaults are the Ralston values.
struct Rk2Drift {
  double b1 = 5.0 / 8.0;
  double b2 = -3.0 / 8.0;
  double b3 = -3.0 / 8.0;
  double b4 = 9.0 / 8.0;
  double a12 = 2.0 / 3.0;

  /// Member of the second-order family with b4 a12^2 = 1/2 and b2 = b3.
  [[nodiscard]] static Rk2Drift from_a12(double a12) {
    if (!(a12 > 0.0)) throw std::invalid_argument("rk2 drift: a12 must be positive");
    Rk2Drift s;
    s.a12 = a12;
    s.b4 = 0.5 / (a12 * a12);
    s.b2 = 0.5 / a12 - s.b4;
    s.b3 = s.b2;
    s.b1 = 1.0 - s.b4 - 2.0 * s.b2;
    return s;
  }

  bool operator==(const Rk2Drift&) const = default;
};

/// Three-stage drift coefficients. Defaults are Kutta's third-order method.
struct Rk3Drift {
  double b1 = 1.0 / 6.0;
  double b2 = 2.0 / 3.0;
  double b3 = 1.0 / 6.0;
  double a12 = 0.5;
  double a31 = -1.0;
  double a32 = 2.0;

  bool operator==(const Rk3Drift&) const = default;
};

struct DriftScheme {
  DriftKind kind = DriftKind::rk2;
  Rk2Drift rk2;
  Rk3Drift rk3;

  [[nodiscard]] static DriftScheme zero() { return {DriftKind::zero, {}, {}}; }
  [[nodiscard]] static DriftScheme euler() { return {DriftKind::euler, {}, {}}; }
  [[nodiscard]] static DriftScheme midpoint() { return {DriftKind::midpoint, {}, {}}; }
  [[nodiscard]] static DriftScheme ralston() { return {DriftKind::rk2, {}, {}}; }
  [[nodiscard]] static DriftScheme kutta() { return {DriftKind::rk3, {}, {}}; }

  /// The rk2 scheme with stage fraction a12. Returns *this unchanged when
  /// a12 already matches; otherwise the b coefficients are re-derived from
  /// the second-order family.
  [[nodiscard]] DriftScheme with_a12(double a12) const {
    if (kind != DriftKind::rk2) throw std::invalid_argument("a12 can only be varied for the rk2 drift");
    if (a12 == rk2.a12) return *this;
    DriftScheme out = *this;
    out.rk2 = Rk2Drift::from_a12(a12);
    return out;
  }

  bool operator==(const DriftScheme&) const = default;
};

struct Rk2Noise {
  double d1 = 0.25;
  double d2 = 0.75;
  double c12 = 2.0 / 3.0;

  bool operator==(const Rk2Noise&) const = default;
};

/// Three-stage noise coefficients, coupled to the Kutta drift (d = b, c = a).
struct Rk3Noise {
  double d1 = 1.0 / 6.0;
  double d2 = 2.0 / 3.0;
  double d3 = 1.0 / 6.0;
  double c12 = 0.5;
  double c31 = -1.0;
  double c32 = 2.0;

  bool operator==(const Rk3Noise&) const = default;
};

struct NoiseScheme {
  NoiseKind kind = NoiseKind::rk2;
  Rk2Noise rk2;
  Rk3Noise rk3;

  [[nodiscard]] static NoiseScheme frozen() { return {NoiseKind::frozen, {}, {}}; }
  [[nodiscard]] static NoiseScheme optimal_rk2() { return {NoiseKind::rk2, {}, {}}; }
  [[nodiscard]] static NoiseScheme coupled_rk3() { return {NoiseKind::rk3, {}, {}}; }

  bool operator==(const NoiseScheme&) const = default;
};

inline constexpr std::array<double, 3> kPatchedCandidates{2.0 / 3.0, 1.0, 0.5};
inline constexpr double kOptimizedLower = 0.5;
inline constexpr double kOptimizedUpper = 1.0;
inline constexpr double kOptimizedTolerance = 1e-4;
inline constexpr int kOptimizedGridPoints = 9;

struct A12Policy {
  A12Kind kind = A12Kind::fixed;
  std::optional<double> value;  // fixed only; unset means the drift scheme's own a12

  [[nodiscard]] static A12Policy fixed(std::optional<double> v = std::nullopt) { return {A12Kind::fixed, v}; }
  [[nodiscard]] static A12Policy patched() { return {A12Kind::patched, std::nullopt}; }
  [[nodiscard]] static A12Policy optimized() { return {A12Kind::optimized, std::nullopt}; }

  bool operator==(const A12Policy&) const = default;
};

namespace detail {

template <DiffusionModel M>
typename M::Point staged_drift(const M& m, const typename M::Point& x) {
  return m.evaluate(x).drift();
}

}  // namespace detail

/// G_h(x) for the drift scheme, given the model evaluation `e0` at x.
template <DiffusionModel M>
[[nodiscard]] typename M::Point eval_Gh(const DriftScheme& s, const M& m, const typename M::Point& x,
                                        const PointEval<M::kStaticDim>& e0, double h) {
  using Point = typename M::Point;
  switch (s.kind) {
    case DriftKind::zero:
      return Point::Zero(x.size());
    case DriftKind::euler:
      return -e0.drift();
    case DriftKind::midpoint: {
      const Point xm = x - 0.5 * h * e0.drift();
      return -detail::staged_drift(m, xm);
    }
    case DriftKind::rk2: {
      const auto& c = s.rk2;
      const Point x1 = x - c.a12 * h * e0.drift();
      const auto e1 = m.evaluate(x1);
      return -(e0.mobility * (c.b1 * e0.grad + c.b2 * e1.grad) + e1.mobility * (c.b3 * e0.grad + c.b4 * e1.grad));
    }
    case DriftKind::rk3: {
      const auto& c = s.rk3;
      const Point f0 = e0.drift();
      const Point x1 = x - h * c.a12 * f0;
      const Point f1 = detail::staged_drift(m, x1);
      const Point x2 = x - h * c.a31 * f0 - h * c.a32 * f1;
      const Point f2 = detail::staged_drift(m, x2);
      return -(c.b1 * f0 + c.b2 * f1 + c.b3 * f2);
    }
  }
  throw std::logic_error("unknown drift kind");
}

template <DiffusionModel M>
[[nodiscard]] typename M::Point eval_Gh(const DriftScheme& s, const M& m, const typename M::Point& x, double h) {
  return eval_Gh(s, m, x, m.evaluate(x), h);
}

/// beta -> infinity limit of the proposal: n steps of x <- x + h G_h(x).
template <DiffusionModel M>
[[nodiscard]] typename M::Point noiseless_flow(const DriftScheme& s, const M& m, typename M::Point x, double h,
                                               std::uint64_t n) {
  for (std::uint64_t i = 0; i < n; ++i) x += h * eval_Gh(s, m, x, h);
  return x;
}

/// Staged noise covariance M_h(x), symmetrized. Stage points move uphill
/// (x + c h M DU).
template <DiffusionModel M>
[[nodiscard]] typename M::MobilityMatrix eval_Mh(const NoiseScheme& s, const M& m, const typename M::Point& x,
                                                 const PointEval<M::kStaticDim>& e0, double h) {
  using Point = typename M::Point;
  using Mat = typename M::MobilityMatrix;
  Mat out = e0.mobility;
  switch (s.kind) {
    case NoiseKind::frozen:
      return e0.mobility;
    case NoiseKind::rk2: {
      const auto& c = s.rk2;
      const Point xb1 = x + c.c12 * h * e0.drift();
      out = c.d1 * e0.mobility + c.d2 * m.mobility(xb1);
      break;
    }
    case NoiseKind::rk3: {
      const auto& c = s.rk3;
      const Point f0 = e0.drift();
      const Point xb1 = x + h * c.c12 * f0;
      const auto e1 = m.evaluate(xb1);
      const Point xb2 = x + h * c.c31 * f0 + h * c.c32 * e1.drift();
      out = c.d1 * e0.mobility + c.d2 * e1.mobility + c.d3 * m.mobility(xb2);
      break;
    }
  }
  return 0.5 * (out + out.transpose());
}

template <DiffusionModel M>
[[nodiscard]] typename M::MobilityMatrix eval_Mh(const NoiseScheme& s, const M& m, const typename M::Point& x,
                                                 double h) {
  return eval_Mh(s, m, x, m.evaluate(x), h);
}

/// Residuals of the second-order (rk2: 3 entries) or third-order (rk3: 4
/// entries) conditions.
[[nodiscard]] inline std::vector<double> check_order_conditions(const DriftScheme& s) {
  if (s.kind == DriftKind::rk2) {
    const auto& c = s.rk2;
    return {c.b1 + c.b2 + c.b3 + c.b4 - 1.0, (c.b2 + c.b4) * c.a12 - 0.5, c.b3 - c.b2};
  }
  if (s.kind == DriftKind::rk3) {
    const auto& c = s.rk3;
    const double a3 = c.a31 + c.a32;
    return {(c.b1 + c.b3) + c.b2 - 1.0, c.b2 * c.a12 + c.b3 * a3 - 0.5,
            c.b2 * c.a12 * c.a12 + c.b3 * a3 * a3 - 1.0 / 3.0, c.a12 * c.a32 * c.b3 - 1.0 / 6.0};
  }
  throw std::invalid_argument("order conditions are defined for rk2 and rk3 drifts only");
}

/// E(x, h) = U(x + h G) - U(x) + h G^T M_h(x + h G)^{-1} G.
///
/// +inf when x or x + h G is off-domain, or M_h(x + h G) is not SPD.
template <DiffusionModel M>
[[nodiscard]] double energy_E(const DriftScheme& s, const NoiseScheme& ns, const M& m, const typename M::Point& x,
                              const PointEval<M::kStaticDim>& e0, double h) {
  using Point = typename M::Point;
  if (!e0.inside) return kInfiniteEnergy;
  const Point g = eval_Gh(s, m, x, e0, h);
  const Point y = x + h * g;
  const double uy = m.energy(y);
  if (!std::isfinite(uy)) return kInfiniteEnergy;
  const auto f = try_cholesky(eval_Mh(ns, m, y, h));
  if (!f) return kInfiniteEnergy;
  return uy - m.energy(x) + h * g.dot(full_solve(*f, g));
}

template <DiffusionModel M>
[[nodiscard]] double energy_E(const DriftScheme& s, const NoiseScheme& ns, const M& m, const typename M::Point& x,
                              double h) {
  return energy_E(s, ns, m, x, m.evaluate(x), h);
}

/// Stage fraction a12 used for one step, chosen at the midpoint x_tilde.
template <DiffusionModel M>
[[nodiscard]] double select_a12(const A12Policy& policy, const DriftScheme& s, const NoiseScheme& ns, const M& m,
                                const typename M::Point& x_tilde, const PointEval<M::kStaticDim>& e_tilde, double h) {
  if (policy.kind == A12Kind::fixed) return policy.value.value_or(s.rk2.a12);
  auto e_at = [&](double a) { return energy_E(s.with_a12(a), ns, m, x_tilde, e_tilde, h); };

  if (policy.kind == A12Kind::patched) {
    double best_a = kPatchedCandidates[0];
    double best_e = e_at(best_a);
    for (std::size_t i = 1; i < kPatchedCandidates.size(); ++i) {
      const double e = e_at(kPatchedCandidates[i]);
      if (e < best_e) {
        best_e = e;
        best_a = kPatchedCandidates[i];
      }
    }
    return best_a;
  }

  // Optimized: coarse grid, then golden-section search around the best node.
  constexpr double kStep = (kOptimizedUpper - kOptimizedLower) / (kOptimizedGridPoints - 1);
  int best_i = -1;
  double best_e = kInfiniteEnergy;
  for (int i = 0; i < kOptimizedGridPoints; ++i) {
    const double e = e_at(kOptimizedLower + kStep * i);
    if (e < best_e) {
      best_e = e;
      best_i = i;
    }
  }
  if (best_i < 0) return 2.0 / 3.0;
  const double best_grid = kOptimizedLower + kStep * best_i;
  double lo = std::max(kOptimizedLower, best_grid - kStep);
  double hi = std::min(kOptimizedUpper, best_grid + kStep);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double ec = e_at(c);
  double ed = e_at(d);
  while (hi - lo > kOptimizedTolerance) {
    if (ec < ed) {
      hi = d;
      d = c;
      ed = ec;
      c = hi - inv_phi * (hi - lo);
      ec = e_at(c);
    } else {
      lo = c;
      c = d;
      ec = ed;
      d = lo + inv_phi * (hi - lo);
      ed = e_at(d);
    }
  }
  const double a = 0.5 * (lo + hi);
  return e_at(a) <= best_e ? a : best_grid;
}

template <DiffusionModel M>
[[nodiscard]] double select_a12(const A12Policy& policy, const DriftScheme& s, const NoiseScheme& ns, const M& m,
                                const typename M::Point& x_tilde, double h) {
  return select_a12(policy, s, ns, m, x_tilde, m.evaluate(x_tilde), h);
}

/// Axis-aligned box for grid scans. For 2D models both axes are coordinates;
/// for 1D models the second axis is the stage fraction a12 of the rk2 drift.
struct ScanBox {
  double x1_lo = 0.0;
  double x1_hi = 0.0;
  double x2_lo = 0.0;
  double x2_hi = 0.0;

  [[nodiscard]] bool empty() const { return !(x1_lo <= x1_hi && x2_lo <= x2_hi); }
};

struct GridPoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double e = 0.0;
};

struct EGrid {
  int resolution = 0;
  std::vector<GridPoint> points;  // row-major, x2 outer

  [[nodiscard]] std::size_t positive_count() const {
    std::size_t n = 0;
    for (const auto& p : points) n += p.e > 0.0 ? 1 : 0;
    return n;
  }
};

/// Samples E on a resolution x resolution grid over `box`.
template <DiffusionModel M>
[[nodiscard]] EGrid scan_E_grid(const DriftScheme& s, const NoiseScheme& ns, const M& m, const ScanBox& box,
                                int resolution, double h, int workers = 1) {
  if (m.dim() > 2) throw std::invalid_argument("E-grid scans need a 1D or 2D model");
  EGrid grid;
  if (box.empty() || resolution <= 0) return grid;
  grid.resolution = resolution;
  grid.points.resize(static_cast<std::size_t>(resolution) * resolution);
  auto node = [resolution](double lo, double hi, int i) {
    return resolution == 1 ? lo : lo + (hi - lo) * i / (resolution - 1);
  };
  parallel_for(static_cast<std::size_t>(resolution), workers, [&](std::size_t row) {
    const double x2 = node(box.x2_lo, box.x2_hi, static_cast<int>(row));
    for (int col = 0; col < resolution; ++col) {
      const double x1 = node(box.x1_lo, box.x1_hi, col);
      typename M::Point x(m.dim());
      double e = 0.0;
      if (m.dim() == 2) {
        x << x1, x2;
        e = energy_E(s, ns, m, x, h);
      } else {
        x(0) = x1;
        e = energy_E(s.with_a12(x2), ns, m, x, h);
      }
      grid.points[row * resolution + col] = {x1, x2, e};
    }
  });
  return grid;
}

}  // namespace metrodiff
