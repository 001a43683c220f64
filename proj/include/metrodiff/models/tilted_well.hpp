#pragma once

#include <cmath>
#include <stdexcept>
#include <string_view>

#include "metrodiff/model.hpp"

namespace metrodiff {

struct TiltedWellParams {
  double force = 0.25;     // tilt F
  double epsilon = 0.001;  // smoothness of the jumps
  double amplitude = 1.0;  // 0 gives the flat tilted potential -F x
  double period = 3.0;

  bool operator==(const TiltedWellParams&) const = default;
};

/// Floor-based modulo into [0, period).
[[nodiscard]] inline double wrap_periodic(double x, double period) {
  double m = x - period * std::floor(x / period);
  if (m >= period) m -= period;
  return m;
}

/// Untilted square well on [0, 3): jumps at 1 and 2, well depth 2.
[[nodiscard]] inline double square_well_energy(double x, const TiltedWellParams& p) {
  const double m = wrap_periodic(x, p.period);
  return p.amplitude * (std::tanh((m - 2.0) / p.epsilon) - std::tanh((m - 1.0) / p.epsilon));
}

[[nodiscard]] inline double tilted_well_energy(double x, const TiltedWellParams& p) {
  return square_well_energy(x, p) - p.force * x;
}

[[nodiscard]] inline double tilted_well_derivative(double x, const TiltedWellParams& p) {
  const double m = wrap_periodic(x, p.period);
  auto sech2 = [](double z) {
    const double c = std::cosh(z);
    return 1.0 / (c * c);
  };
  return p.amplitude / p.epsilon * (sech2((m - 2.0) / p.epsilon) - sech2((m - 1.0) / p.epsilon)) - p.force;
}

/// Brownian particle in a tilted periodic square well. The density
/// exp(-beta U) is not normalizable for F > 0.
class TiltedWell : public Model<TiltedWell, 1> {
 public:
  static constexpr std::string_view kName = "tilted_well";

  explicit TiltedWell(TiltedWellParams p = {}) : p_(p) {
    if (!(p_.epsilon > 0.0)) throw std::invalid_argument("tilted_well: epsilon must be positive");
    if (p_.period != 3.0) throw std::invalid_argument("tilted_well: period is fixed at 3");
  }

  [[nodiscard]] Eigen::Index dim() const { return 1; }
  [[nodiscard]] std::string_view name() const { return kName; }
  [[nodiscard]] const TiltedWellParams& params() const { return p_; }

  [[nodiscard]] bool inside(const Point&) const { return true; }
  [[nodiscard]] double energy_inside(const Point& x) const { return tilted_well_energy(x(0), p_); }
  [[nodiscard]] Point grad_inside(const Point& x) const { return Point(tilted_well_derivative(x(0), p_)); }
  [[nodiscard]] MobilityMatrix mobility_inside(const Point&) const { return MobilityMatrix::Identity(); }

 private:
  TiltedWellParams p_;
};

}  // namespace metrodiff
