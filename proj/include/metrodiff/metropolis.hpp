#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "metrodiff/linalg.hpp"
#include "metrodiff/model.hpp"
#include "metrodiff/random.hpp"
#include "metrodiff/stages.hpp"

namespace metrodiff {

struct IntegratorConfig {
  double h = 0.01;
  double beta = 1.0;
  DriftScheme drift = DriftScheme::ralston();
  NoiseScheme noise = NoiseScheme::optimal_rk2();
  A12Policy a12_policy = A12Policy::fixed();

  void validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("integrator: h must be positive and finite");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("integrator: beta must be positive and finite");
    if (a12_policy.kind != A12Kind::fixed && drift.kind != DriftKind::rk2) {
      throw std::invalid_argument("integrator: patched/optimized a12 policies need the rk2 drift");
    }
    if (a12_policy.kind == A12Kind::fixed && a12_policy.value && drift.kind != DriftKind::rk2) {
      throw std::invalid_argument("integrator: a fixed a12 value needs the rk2 drift");
    }
  }

  bool operator==(const IntegratorConfig&) const = default;
};

template <int N>
struct Proposal {
  Vector<N> x_tilde;
  Vector<N> x_star;
  Vector<N> g;  // G_h(x_tilde)
  double a12 = 2.0 / 3.0;
};

template <int N>
struct Acceptance {
  double alpha = 0.0;
  double log_ratio = -std::numeric_limits<double>::infinity();
  Vector<N> eta;
  std::optional<CholeskyFactor<N>> factor_star;  // B_h(x_star), when SPD
  double energy_star = kInfiniteEnergy;
};

template <int N>
struct StepResult {
  Vector<N> x_tilde;
  Vector<N> x_star;
  Vector<N> eta;
  double alpha = 0.0;
  bool accepted = false;
  Vector<N> x_new;
  double a12 = 2.0 / 3.0;
};

/// B_h(x) as the Cholesky factor of M_h(x). Throws NotSpdError.
template <DiffusionModel M>
[[nodiscard]] CholeskyFactor<M::kStaticDim> noise_factor(const IntegratorConfig& c, const M& m,
                                                         const typename M::Point& x) {
  return cholesky(eval_Mh(c.noise, m, x, c.h));
}

/// Proposal move given B_h(x0): midpoint x0 + sqrt(h/2) B0 xi, then
/// x_star = 2 x_tilde - x0 + h G_h(x_tilde) with a12 chosen at x_tilde.
template <DiffusionModel M>
[[nodiscard]] Proposal<M::kStaticDim> propose(const IntegratorConfig& c, const M& m, const typename M::Point& x0,
                                              const typename M::Point& xi, const CholeskyFactor<M::kStaticDim>& b0) {
  Proposal<M::kStaticDim> p;
  p.x_tilde = x0 + std::sqrt(0.5 * c.h) * (b0.lower * xi);
  const auto e_tilde = m.evaluate(p.x_tilde);
  DriftScheme drift = c.drift;
  if (drift.kind == DriftKind::rk2) {
    p.a12 = select_a12(c.a12_policy, c.drift, c.noise, m, p.x_tilde, e_tilde, c.h);
    drift = drift.with_a12(p.a12);
  }
  p.g = eval_Gh(drift, m, p.x_tilde, e_tilde, c.h);
  p.x_star = 2.0 * p.x_tilde - x0 + c.h * p.g;
  return p;
}

template <DiffusionModel M>
[[nodiscard]] Proposal<M::kStaticDim> propose(const IntegratorConfig& c, const M& m, const typename M::Point& x0,
                                              const typename M::Point& xi) {
  return propose(c, m, x0, xi, noise_factor(c, m, x0));
}

/// U(x1) - U(x0) given both energies. Models with `energy_difference_inside`
/// supply a compensated difference; at beta = 1e12 the roundoff of U(x1) - U(x0)
/// alone would reject about one step in a thousand.
template <DiffusionModel M>
[[nodiscard]] double energy_difference(const M& m, const typename M::Point& x0, const typename M::Point& x1,
                                       double u0, double u1) {
  if constexpr (requires { { m.energy_difference_inside(x0, x1) } -> std::convertible_to<double>; }) {
    if (std::isfinite(u0) && std::isfinite(u1)) return m.energy_difference_inside(x0, x1);
  }
  return u1 - u0;
}

/// Acceptance probability and eta for a proposal, computed in log space.
/// alpha = 0 when x_star is off-domain or M_h(x_star) is not SPD.
template <DiffusionModel M>
[[nodiscard]] Acceptance<M::kStaticDim> acceptance(const IntegratorConfig& c, const M& m,
                                                   const typename M::Point& x0, const typename M::Point& xi,
                                                   const Proposal<M::kStaticDim>& p,
                                                   const CholeskyFactor<M::kStaticDim>& b0, double energy0) {
  Acceptance<M::kStaticDim> a;
  a.eta = M::Point::Zero(xi.size());
  a.energy_star = m.energy(p.x_star);
  if (!std::isfinite(a.energy_star)) return a;
  a.factor_star = try_cholesky(eval_Mh(c.noise, m, p.x_star, c.h));
  if (!a.factor_star) return a;
  a.eta = solve(*a.factor_star, typename M::Point(b0.lower * xi + std::sqrt(2.0 * c.h) * p.g));
  a.log_ratio = b0.log_det - a.factor_star->log_det -
                c.beta * (0.5 * a.eta.squaredNorm() - 0.5 * xi.squaredNorm() +
                          energy_difference(m, x0, p.x_star, energy0, a.energy_star));
  if (std::isnan(a.log_ratio)) {
    a.log_ratio = -std::numeric_limits<double>::infinity();
    return a;
  }
  a.alpha = std::exp(std::min(0.0, a.log_ratio));
  return a;
}

template <DiffusionModel M>
[[nodiscard]] Acceptance<M::kStaticDim> acceptance(const IntegratorConfig& c, const M& m,
                                                   const typename M::Point& x0, const typename M::Point& xi,
                                                   const Proposal<M::kStaticDim>& p,
                                                   const CholeskyFactor<M::kStaticDim>& b0) {
  return acceptance(c, m, x0, xi, p, b0, m.energy(x0));
}

/// Metropolis chain that carries B_h and U of the current state between steps.
template <DiffusionModel M>
class MetropolisChain {
 public:
  using Point = typename M::Point;
  static constexpr int N = M::kStaticDim;

  MetropolisChain(IntegratorConfig c, const M& m, Point x0) : c_(std::move(c)), m_(&m), x_(std::move(x0)) {
    c_.validate();
    if (!m.in_domain(x_)) throw OutOfDomainError("metropolis: initial state is outside the physical domain");
    b_ = noise_factor(c_, m, x_);
    u_ = m.energy(x_);
  }

  /// One step of the integrator. The returned reference is valid until the
  /// next call.
  const StepResult<N>& step(Rng& rng) {
    const Point xi = rng.noise<N>(x_.size(), c_.beta);
    auto p = propose(c_, *m_, x_, xi, b_);
    auto a = acceptance(c_, *m_, x_, xi, p, b_, u_);
    bool accept = a.alpha >= 1.0;
    if (!accept && a.alpha > 0.0) accept = rng.uniform() < a.alpha;
    ++steps_;
    sum_alpha_ += a.alpha;
    if (accept) {
      ++accepted_;
      x_ = p.x_star;
      b_ = std::move(*a.factor_star);
      u_ = a.energy_star;
    }
    last_ = {std::move(p.x_tilde), std::move(p.x_star), std::move(a.eta), a.alpha, accept, x_, p.a12};
    return last_;
  }

  /// Stepper interface shared with FixmanChain; a Metropolis path never explodes.
  bool advance(Rng& rng) {
    step(rng);
    return true;
  }

  [[nodiscard]] const Point& state() const { return x_; }
  [[nodiscard]] double energy() const { return u_; }
  [[nodiscard]] std::uint64_t steps() const { return steps_; }
  [[nodiscard]] std::uint64_t accepted() const { return accepted_; }
  [[nodiscard]] double sum_alpha() const { return sum_alpha_; }
  [[nodiscard]] double mean_alpha() const { return steps_ ? sum_alpha_ / static_cast<double>(steps_) : 0.0; }

 private:
  IntegratorConfig c_;
  const M* m_;
  Point x_;
  CholeskyFactor<N> b_;
  double u_ = 0.0;
  std::uint64_t steps_ = 0;
  std::uint64_t accepted_ = 0;
  double sum_alpha_ = 0.0;
  StepResult<N> last_;
};

/// Single step from x0 (no cached state).
template <DiffusionModel M>
[[nodiscard]] StepResult<M::kStaticDim> step(const IntegratorConfig& c, const M& m, const typename M::Point& x0,
                                             Rng& rng) {
  MetropolisChain<M> chain(c, m, x0);
  return chain.step(rng);
}

template <int N>
struct TrajectoryStats {
  std::uint64_t n_steps = 0;
  std::uint64_t n_accepted = 0;
  double sum_alpha = 0.0;
  Vector<N> final_state;

  [[nodiscard]] std::uint64_t n_rejected() const { return n_steps - n_accepted; }
  [[nodiscard]] double mean_alpha() const { return n_steps ? sum_alpha / static_cast<double>(n_steps) : 0.0; }
  [[nodiscard]] double acceptance_rate() const {
    return n_steps ? static_cast<double>(n_accepted) / static_cast<double>(n_steps) : 0.0;
  }
};

struct NoObserver {
  template <class P>
  void operator()(std::uint64_t, const P&) const {}
};

/// Runs n_steps steps, calling observer(step_index, state) after each one.
template <DiffusionModel M, class Observer = NoObserver>
TrajectoryStats<M::kStaticDim> run_trajectory(const IntegratorConfig& c, const M& m, const typename M::Point& x0,
                                              std::uint64_t n_steps, Rng& rng, Observer&& observer = {}) {
  TrajectoryStats<M::kStaticDim> stats;
  stats.final_state = x0;
  if (n_steps == 0) return stats;
  MetropolisChain<M> chain(c, m, x0);
  for (std::uint64_t k = 1; k <= n_steps; ++k) {
    chain.step(rng);
    observer(k, chain.state());
  }
  stats.n_steps = chain.steps();
  stats.n_accepted = chain.accepted();
  stats.sum_alpha = chain.sum_alpha();
  stats.final_state = chain.state();
  return stats;
}

}  // namespace metrodiff
