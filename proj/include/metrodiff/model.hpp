#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <stdexcept>
#include <string_view>

#include "metrodiff/linalg.hpp"

namespace metrodiff {

inline constexpr double kInfiniteEnergy = std::numeric_limits<double>::infinity();

/// Raised by model kernels that are only defined on the physical domain
/// (e.g. the friction matrix of a chain whose beads are out of order).
class OutOfDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Mobility and energy gradient at one point, after the domain extension.
template <int N>
struct PointEval {
  Matrix<N> mobility;
  Vector<N> grad;
  bool inside = true;

  [[nodiscard]] Vector<N> drift() const { return mobility * grad; }  // M DU
};

/// CRTP base for a self-adjoint diffusion dY = -M DU dt + div M / beta dt + sqrt(2/beta) B dW.
///
/// Derived classes provide `inside`, `energy_inside`, `grad_inside` and
/// `mobility_inside`, which are only ever called on in-domain points. The base
/// applies the extension used by every integrator: off the physical domain the
/// energy is +inf, the gradient is zero, and the mobility is the identity.
template <class Derived, int N>
class Model {
 public:
  static constexpr int kStaticDim = N;
  using Point = Vector<N>;
  using MobilityMatrix = Matrix<N>;

  [[nodiscard]] bool in_domain(const Point& x) const {
    return x.size() == self().dim() && x.allFinite() && self().inside(x);
  }

  [[nodiscard]] double energy(const Point& x) const {
    return in_domain(x) ? self().energy_inside(x) : kInfiniteEnergy;
  }

  [[nodiscard]] Point grad_energy(const Point& x) const {
    return in_domain(x) ? Point(self().grad_inside(x)) : Point(Point::Zero(self().dim()));
  }

  [[nodiscard]] MobilityMatrix mobility(const Point& x) const {
    return in_domain(x) ? MobilityMatrix(self().mobility_inside(x))
                        : MobilityMatrix(MobilityMatrix::Identity(self().dim(), self().dim()));
  }

  [[nodiscard]] PointEval<N> evaluate(const Point& x) const {
    const auto n = self().dim();
    if (!in_domain(x)) return {MobilityMatrix::Identity(n, n), Point::Zero(n), false};
    return {self().mobility_inside(x), self().grad_inside(x), true};
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

template <class M>
concept DiffusionModel = requires(const M& m, const typename M::Point& x) {
  typename M::Point;
  typename M::MobilityMatrix;
  { M::kStaticDim } -> std::convertible_to<int>;
  { m.dim() } -> std::convertible_to<Eigen::Index>;
  { m.name() } -> std::convertible_to<std::string_view>;
  { m.in_domain(x) } -> std::same_as<bool>;
  { m.energy(x) } -> std::same_as<double>;
  { m.grad_energy(x) } -> std::same_as<typename M::Point>;
  { m.mobility(x) } -> std::same_as<typename M::MobilityMatrix>;
  { m.evaluate(x) } -> std::same_as<PointEval<M::kStaticDim>>;
};

}  // namespace metrodiff
