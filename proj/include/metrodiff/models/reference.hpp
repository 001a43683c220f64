#pragma once

// Small models with closed-form answers, used for calibration and tests.

#include <stdexcept>
#include <string_view>
#include <utility>

#include "metrodiff/linalg.hpp"
#include "metrodiff/model.hpp"

namespace metrodiff {

/// U = x^T K x / 2 with a constant mobility. In 1D with K = M = 1 this is the
/// Ornstein-Uhlenbeck process.
template <int N>
class Quadratic : public Model<Quadratic<N>, N> {
  using Base = Model<Quadratic<N>, N>;

 public:
  using typename Base::MobilityMatrix;
  using typename Base::Point;
  static constexpr std::string_view kName = "quadratic";

  Quadratic(MobilityMatrix stiffness, MobilityMatrix mobility)
      : k_(std::move(stiffness)), m_(std::move(mobility)) {
    if (k_.rows() != k_.cols() || m_.rows() != k_.rows() || m_.cols() != k_.rows()) {
      throw std::invalid_argument("quadratic: stiffness and mobility must be square and of equal size");
    }
    (void)cholesky(m_);
  }

  /// Scalar model U = k x^2 / 2 (and its diagonal multi-dimensional extension).
  explicit Quadratic(double k = 1.0, double mobility = 1.0, Eigen::Index n = N == Eigen::Dynamic ? 1 : N)
      : Quadratic(k * MobilityMatrix::Identity(n, n), mobility * MobilityMatrix::Identity(n, n)) {}

  [[nodiscard]] Eigen::Index dim() const { return k_.rows(); }
  [[nodiscard]] std::string_view name() const { return kName; }
  [[nodiscard]] const MobilityMatrix& stiffness() const { return k_; }
  [[nodiscard]] const MobilityMatrix& constant_mobility() const { return m_; }

  [[nodiscard]] bool inside(const Point&) const { return true; }
  [[nodiscard]] double energy_inside(const Point& x) const { return 0.5 * x.dot(k_ * x); }
  [[nodiscard]] Point grad_inside(const Point& x) const { return k_ * x; }
  [[nodiscard]] MobilityMatrix mobility_inside(const Point&) const { return m_; }

 private:
  MobilityMatrix k_;
  MobilityMatrix m_;
};

/// U = (1 - x^2)^2 / 4 with unit mobility. U'' vanishes at x = +-1/sqrt(3).
class QuarticWell : public Model<QuarticWell, 1> {
 public:
  static constexpr std::string_view kName = "quartic_well";

  [[nodiscard]] Eigen::Index dim() const { return 1; }
  [[nodiscard]] std::string_view name() const { return kName; }

  [[nodiscard]] bool inside(const Point&) const { return true; }
  [[nodiscard]] double energy_inside(const Point& x) const {
    const double a = 1.0 - x(0) * x(0);
    return 0.25 * a * a;
  }
  [[nodiscard]] Point grad_inside(const Point& x) const { return Point(-x(0) * (1.0 - x(0) * x(0))); }
  [[nodiscard]] MobilityMatrix mobility_inside(const Point&) const { return MobilityMatrix::Identity(); }
};

/// 1D particle with a space-dependent scalar mobility m(x) = 1 + x^2 / 2 in a
/// quadratic well. Exercises the multiplicative-noise path in 1D.
class QuadraticVariableMobility : public Model<QuadraticVariableMobility, 1> {
 public:
  static constexpr std::string_view kName = "quadratic_variable_mobility";

  [[nodiscard]] Eigen::Index dim() const { return 1; }
  [[nodiscard]] std::string_view name() const { return kName; }

  [[nodiscard]] bool inside(const Point&) const { return true; }
  [[nodiscard]] double energy_inside(const Point& x) const { return 0.5 * x(0) * x(0); }
  [[nodiscard]] Point grad_inside(const Point& x) const { return x; }
  [[nodiscard]] MobilityMatrix mobility_inside(const Point& x) const {
    return MobilityMatrix(1.0 + 0.5 * x(0) * x(0));
  }
};

}  // namespace metrodiff
