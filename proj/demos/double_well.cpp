// Small-noise runs on the 2D double well: one path per drift scheme from
// (0, -0.01) at beta = 1e8, h = 0.01, printing where each path ends up.

#include <cstdio>
#include <utility>
#include <vector>

#include "metrodiff/metrodiff.hpp"

using namespace metrodiff;

int main() {
  const DoubleWell2d model;
  const DoubleWell2d::Point x0(0.0, -0.01);
  const std::vector<std::pair<const char*, DriftScheme>> drifts{{"euler", DriftScheme::euler()},
                                                                {"midpoint", DriftScheme::midpoint()},
                                                                {"ralston", DriftScheme::ralston()},
                                                                {"kutta", DriftScheme::kutta()}};
  std::printf("%-9s %10s %10s %12s %12s\n", "drift", "x1(T)", "x2(T)", "U(T)", "acceptance");
  for (const auto& [name, drift] : drifts) {
    IntegratorConfig c;
    c.h = 0.01;
    c.beta = 1e8;
    c.drift = drift;
    c.noise = drift.kind == DriftKind::rk3 ? NoiseScheme::coupled_rk3() : NoiseScheme::optimal_rk2();
    Rng rng(61, 0);
    const auto stats = run_trajectory(c, model, x0, 1000, rng);
    const auto& x = stats.final_state;
    std::printf("%-9s %10.5f %10.5f %12.4e %12.4f\n", name, x(0), x(1), model.energy(x), stats.mean_alpha());
  }
}
