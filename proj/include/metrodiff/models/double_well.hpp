#pragma once

#include <stdexcept>
#include <string_view>

#include "metrodiff/model.hpp"

namespace metrodiff {

enum class MobilityKind { constant, radial };

struct DoubleWell2dParams {
  MobilityKind mobility_kind = MobilityKind::constant;

  bool operator==(const DoubleWell2dParams&) const = default;
};

/// U = 5 (x2^2 - 1)^2 + 1.25 (x2 - x1/2)^2 with minima at +-(2, 1).
/// The radial variant uses M = (x1^2 + x2^2 + 1) I.
class DoubleWell2d : public Model<DoubleWell2d, 2> {
 public:
  static constexpr std::string_view kName = "double_well_2d";

  explicit DoubleWell2d(DoubleWell2dParams p = {}) : p_(p) {}

  [[nodiscard]] Eigen::Index dim() const { return 2; }
  [[nodiscard]] std::string_view name() const { return kName; }
  [[nodiscard]] const DoubleWell2dParams& params() const { return p_; }

  [[nodiscard]] bool inside(const Point&) const { return true; }

  [[nodiscard]] double energy_inside(const Point& x) const {
    const double a = x(1) * x(1) - 1.0;
    const double b = x(1) - 0.5 * x(0);
    return 5.0 * a * a + 1.25 * b * b;
  }

  [[nodiscard]] Point grad_inside(const Point& x) const {
    const double b = x(1) - 0.5 * x(0);
    return {-1.25 * b, 20.0 * x(1) * (x(1) * x(1) - 1.0) + 2.5 * b};
  }

  [[nodiscard]] MobilityMatrix mobility_inside(const Point& x) const {
    if (p_.mobility_kind == MobilityKind::constant) return MobilityMatrix::Identity();
    return (x.squaredNorm() + 1.0) * MobilityMatrix::Identity();
  }

 private:
  DoubleWell2dParams p_;
};

}  // namespace metrodiff
