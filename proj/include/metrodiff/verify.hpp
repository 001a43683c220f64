#pragma once

// Exact-identity suite: proposal/Verlet equivalence, reverse-move identities,
// order conditions, E(x,h) closed form and RPY mobility properties.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "metrodiff/linalg.hpp"
#include "metrodiff/metropolis.hpp"
#include "metrodiff/models/chain1d.hpp"
#include "metrodiff/models/double_well.hpp"
#include "metrodiff/models/heavy_tail.hpp"
#include "metrodiff/models/reference.hpp"
#include "metrodiff/models/rpy_chain.hpp"
#include "metrodiff/random.hpp"
#include "metrodiff/stages.hpp"

namespace metrodiff {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // largest residual seen
  double tolerance = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 7;
  int samples = 100;
  double rk2_b4_perturbation = 0.0;  // debug: breaks the rk2 order conditions
};

/// Largest residual of the proposal and reverse-move identities for one
/// (model, config) pair over random in-domain inputs.
struct ReversibilityResiduals {
  double verlet = 0.0;       // relative to 1 + |x|
  double reverse_x0 = 0.0;   // |reverse proposal - x0|
  double reverse_midpoint = 0.0;
  double reverse_eta = 0.0;  // |eta' + xi|
  double reciprocity = 0.0;  // |log r + log r_rev|
  int evaluated = 0;
};

template <DiffusionModel M, class Sampler>
ReversibilityResiduals reversibility_residuals(const IntegratorConfig& c, const M& m, Sampler&& sample_x0, int samples,
                                               Rng& rng) {
  using Point = typename M::Point;
  ReversibilityResiduals r;
  for (int s = 0; s < samples; ++s) {
    const Point x0 = sample_x0(rng);
    const Point xi = rng.noise<M::kStaticDim>(x0.size(), c.beta);
    const auto b0 = noise_factor(c, m, x0);
    const auto p = propose(c, m, x0, xi, b0);

    // Position Verlet with dt = sqrt(2h), V0 = B_h xi.
    const double dt = std::sqrt(2.0 * c.h);
    const Point v0 = b0.lower * xi;
    const Point q_half = x0 + 0.5 * dt * v0;
    DriftScheme drift = c.drift;
    if (drift.kind == DriftKind::rk2) drift = drift.with_a12(p.a12);
    const Point v1 = v0 + dt * eval_Gh(drift, m, q_half, c.h);
    const Point q1 = q_half + 0.5 * dt * v1;
    r.verlet = std::max(r.verlet, (q1 - p.x_star).norm() / (1.0 + x0.norm()));

    const auto a = acceptance(c, m, x0, xi, p, b0);
    if (!a.factor_star || !std::isfinite(a.log_ratio)) continue;
    const Point minus_eta = -a.eta;
    const auto p_rev = propose(c, m, p.x_star, minus_eta, *a.factor_star);
    const auto a_rev = acceptance(c, m, p.x_star, minus_eta, p_rev, *a.factor_star);
    r.reverse_midpoint = std::max(r.reverse_midpoint, (p_rev.x_tilde - p.x_tilde).norm());
    r.reverse_x0 = std::max(r.reverse_x0, (p_rev.x_star - x0).norm());
    r.reverse_eta = std::max(r.reverse_eta, (a_rev.eta + xi).norm());
    r.reciprocity = std::max(r.reciprocity, std::abs(a.log_ratio + a_rev.log_ratio));
    ++r.evaluated;
  }
  return r;
}

/// Random 11-bead configuration with consecutive distances in
/// (2.2 R_b, 0.9 ell) and no pair closer than 2 R_b.
inline Vector<Eigen::Dynamic> random_rpy_configuration(const RpyChainParams& p, Rng& rng) {
  Vector<Eigen::Dynamic> x(3 * p.n_beads);
  for (;;) {
    x.segment<3>(0).setZero();
    for (int i = 1; i < p.n_beads; ++i) {
      Vector<3> dir(rng.normal(), rng.normal(), rng.normal());
      dir.normalize();
      const double len = 2.2 * p.bead_radius + rng.uniform() * (0.9 * p.max_spring - 2.2 * p.bead_radius);
      x.segment<3>(3 * i) = x.segment<3>(3 * (i - 1)) + len * dir;
    }
    bool ok = true;
    for (int i = 0; i < p.n_beads && ok; ++i) {
      for (int j = i + 1; j < p.n_beads && ok; ++j) {
        ok = (x.segment<3>(3 * i) - x.segment<3>(3 * j)).norm() > 2.0 * p.bead_radius;
      }
    }
    if (ok) return x;
  }
}

/// Worst RPY divergence ratio |div M| / |M|_F and SPD failures over random configurations.
struct RpyCheck {
  double worst_divergence_ratio = 0.0;
  int spd_failures = 0;
};

inline RpyCheck check_rpy_properties(const RpyChainParams& p, int configs, double step, Rng& rng) {
  RpyCheck out;
  for (int k = 0; k < configs; ++k) {
    const auto x = random_rpy_configuration(p, rng);
    const auto m = rpy_mobility(x, p);
    if (!try_cholesky(m)) ++out.spd_failures;
    const auto div = numeric_divergence([&](const Vector<Eigen::Dynamic>& y) { return rpy_mobility(y, p); }, x, step);
    out.worst_divergence_ratio = std::max(out.worst_divergence_ratio, div.norm() / m.norm());
  }
  return out;
}

/// Largest |E(x,h) - closed form| for quadratic U with constant M under the
/// Ralston drift, over random (x, h, k) in 1D and random SPD pairs in 3D.
inline double quadratic_E_residual(int samples, Rng& rng) {
  double worst = 0.0;
  const auto drift = DriftScheme::ralston();
  const auto noise = NoiseScheme::optimal_rk2();
  for (int s = 0; s < samples; ++s) {
    const double k = 0.2 + 2.0 * rng.uniform();
    const double h = 0.05 + 0.5 * rng.uniform() / k;
    const double x = 4.0 * rng.uniform() - 2.0;
    const Quadratic<1> model(k, 1.0);
    const double e = energy_E(drift, noise, model, Vector<1>(x), h);
    const double v = k * k * x;  // A M DU
    const double closed = -h * h * h / 4.0 * (1.0 - h / 2.0 * k) * v * v;
    worst = std::max(worst, std::abs(e - closed));
  }
  for (int s = 0; s < samples; ++s) {
    Matrix<3> a;
    Matrix<3> b;
    for (int i = 0; i < 9; ++i) {
      a(i) = 2.0 * rng.uniform() - 1.0;
      b(i) = 2.0 * rng.uniform() - 1.0;
    }
    const Matrix<3> k = a * a.transpose() + 0.5 * Matrix<3>::Identity();
    const Matrix<3> mob = b * b.transpose() + 0.5 * Matrix<3>::Identity();
    const double bound = (mob * k).norm();  // >= spectral radius
    const double h = 0.5 * rng.uniform() / bound;
    const Vector<3> x(rng.normal(), rng.normal(), rng.normal());
    const Quadratic<3> model(k, mob);
    const double e = energy_E(drift, noise, model, x, h);
    const Vector<3> v = k * mob * k * x;
    const double closed = -h * h * h / 4.0 * v.dot((mob - h / 2.0 * mob * k * mob) * v);
    worst = std::max(worst, std::abs(e - closed));
  }
  return worst;
}

inline std::vector<VerifyCheck> run_verify_suite(const VerifyOptions& opt = {}) {
  std::vector<VerifyCheck> checks;
  Rng rng(opt.seed, 0);
  auto add = [&](std::string name, double worst, double tol) {
    checks.push_back({std::move(name), worst <= tol, worst, tol});
  };

  // Order conditions.
  DriftScheme rk2 = DriftScheme::ralston();
  rk2.rk2.b4 += opt.rk2_b4_perturbation;
  auto max_abs = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  add("order_conditions_rk2", max_abs(check_order_conditions(rk2)), 0.0);
  add("order_conditions_rk3", max_abs(check_order_conditions(DriftScheme::kutta())), 0.0);

  // E(x,h) closed form and worked value.
  {
    const Quadratic<1> model(1.0, 1.0);
    const double e = energy_E(rk2, NoiseScheme::optimal_rk2(), model, Vector<1>(1.0), 0.125);
    add("energy_E_worked_value", std::abs(e - (-15.0 / 32768.0)), 1e-12);
    add("energy_E_quadratic_closed_form", quadratic_E_residual(opt.samples, rng), 1e-12);
  }

  // Proposal identities across models and schemes.
  struct Residuals {
    double verlet = 0.0, x0 = 0.0, mid = 0.0, eta = 0.0, recip = 0.0;
    void fold(const ReversibilityResiduals& r) {
      verlet = std::max(verlet, r.verlet);
      x0 = std::max(x0, r.reverse_x0);
      mid = std::max(mid, r.reverse_midpoint);
      eta = std::max(eta, r.reverse_eta);
      recip = std::max(recip, r.reciprocity);
    }
  } res;
  const int n = opt.samples;
  {
    IntegratorConfig c{0.05, 2.0, rk2, NoiseScheme::optimal_rk2(), A12Policy::fixed()};
    Matrix<2> k;
    k << 2.0, 0.5, 0.5, 1.0;
    Matrix<2> mob;
    mob << 1.0, 0.3, 0.3, 0.8;
    const Quadratic<2> model(k, mob);
    res.fold(reversibility_residuals(c, model, [](Rng& r) { return Vector<2>(r.normal(), r.normal()); }, n, rng));
  }
  for (auto drift : {rk2, DriftScheme::kutta(), DriftScheme::midpoint(), DriftScheme::euler()}) {
    const auto noise = drift.kind == DriftKind::rk3 ? NoiseScheme::coupled_rk3() : NoiseScheme::optimal_rk2();
    IntegratorConfig c{0.01, 3.0, drift, noise, A12Policy::fixed()};
    const DoubleWell2d model({MobilityKind::radial});
    // Bounded box: further out the explicit stages overflow at this h.
    res.fold(reversibility_residuals(
        c, model, [](Rng& r) { return Vector<2>(3.0 * (r.uniform() - 0.5), 1.5 * (r.uniform() - 0.5)); }, n, rng));
  }
  for (auto policy : {A12Policy::patched(), A12Policy::optimized()}) {
    IntegratorConfig c{0.125, 5.0, DriftScheme::ralston(), NoiseScheme::optimal_rk2(), policy};
    const QuarticWell model;
    res.fold(reversibility_residuals(
        c, model, [](Rng& r) { return Vector<1>(0.577 + 0.2 * (r.uniform() - 0.5)); }, n / 4, rng));
  }
  {
    IntegratorConfig c{0.1, 1.0, rk2, NoiseScheme::optimal_rk2(), A12Policy::fixed()};
    const HeavyTail model({1.5});
    res.fold(reversibility_residuals(c, model, [](Rng& r) { return Vector<1>(1.0 + 5.0 * r.uniform()); }, n, rng));
  }
  {
    IntegratorConfig c{0.05, 100.0, rk2, NoiseScheme::optimal_rk2(), A12Policy::fixed()};
    const Chain1d<> model;
    const auto x0 = model.default_initial();
    res.fold(reversibility_residuals(c, model, [&](Rng&) { return x0; }, n / 4, rng));
  }
  {
    const RpyChainParams p;
    IntegratorConfig c{0.5e-4, 1.0 / p.thermal_energy, rk2, NoiseScheme::optimal_rk2(), A12Policy::fixed()};
    const RpyChain model(p);
    res.fold(reversibility_residuals(c, model, [&](Rng& r) { return random_rpy_configuration(p, r); }, n / 10, rng));
  }
  add("verlet_equivalence", res.verlet, 1e-13);
  add("reverse_midpoint", res.mid, 1e-10);
  add("reverse_proposal_x0", res.x0, 1e-10);
  add("reverse_noise_eta", res.eta, 1e-10);
  add("acceptance_reciprocity", res.recip, 1e-10);

  // RPY mobility.
  {
    const RpyChainParams p;
    const auto rpy = check_rpy_properties(p, opt.samples, 1e-6, rng);
    add("rpy_spd", rpy.spd_failures, 0.0);
    add("rpy_divergence", rpy.worst_divergence_ratio, 1e-6);
    const auto [c1, c2] = rpy_near_coefficients(2.0 * p.bead_radius, p.bead_radius);
    const auto [n1, n2] = rpy_far_coefficients(2.0 * p.bead_radius, p.bead_radius);
    add("rpy_branch_continuity",
        std::max({std::abs(c1 - 7.0 / 16.0), std::abs(c2 - 3.0 / 16.0), std::abs(n1 - 7.0 / 16.0),
                  std::abs(n2 - 3.0 / 16.0)}),
        0.0);
  }
  return checks;
}

}  // namespace metrodiff
