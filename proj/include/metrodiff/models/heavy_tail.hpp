#pragma once

#include <cmath>
#include <stdexcept>
#include <string_view>

#include "metrodiff/model.hpp"

namespace metrodiff {

struct HeavyTailParams {
  double eta = 1.5;

  bool operator==(const HeavyTailParams&) const = default;
};

/// Brownian particle on {x >= 1} with U(x) = eta log x and unit mobility.
///
/// The density x^{-eta} is normalizable only for eta > 1. The domain is
/// closed: U is finite at x = 1.
class HeavyTail : public Model<HeavyTail, 1> {
 public:
  static constexpr std::string_view kName = "heavy_tail";

  explicit HeavyTail(HeavyTailParams p = {}) : p_(p) {
    if (!(p_.eta > 0.0)) throw std::invalid_argument("heavy_tail: eta must be positive");
  }

  [[nodiscard]] Eigen::Index dim() const { return 1; }
  [[nodiscard]] std::string_view name() const { return kName; }
  [[nodiscard]] const HeavyTailParams& params() const { return p_; }

  [[nodiscard]] bool inside(const Point& x) const { return x(0) >= 1.0; }
  [[nodiscard]] double energy_inside(const Point& x) const { return p_.eta * std::log(x(0)); }
  [[nodiscard]] Point grad_inside(const Point& x) const { return Point(p_.eta / x(0)); }
  [[nodiscard]] MobilityMatrix mobility_inside(const Point&) const { return MobilityMatrix::Identity(); }

  /// Z = integral of x^{-eta} over [1, inf) = 1/(eta - 1), for eta > 1.
  [[nodiscard]] double normalization() const {
    if (!(p_.eta > 1.0)) throw std::domain_error("heavy_tail: density is not normalizable for eta <= 1");
    return 1.0 / (p_.eta - 1.0);
  }

  /// Stationary CDF 1 - x^{1 - eta} (beta = 1).
  [[nodiscard]] double stationary_cdf(double x) const {
    if (x <= 1.0) return 0.0;
    (void)normalization();
    return 1.0 - std::pow(x, 1.0 - p_.eta);
  }

 private:
  HeavyTailParams p_;
};

}  // namespace metrodiff
