#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>

#include "metrodiff/linalg.hpp"
#include "metrodiff/model.hpp"
#include "metrodiff/random.hpp"

namespace metrodiff {

struct FixmanConfig {
  double h = 0.01;
  double beta = 1.0;

  void validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("fixman: h must be positive and finite");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("fixman: beta must be positive and finite");
  }

  bool operator==(const FixmanConfig&) const = default;
};

/// One trapezoidal predictor-corrector step. Returns nothing when the step
/// explodes: the predictor or corrector is off-domain, has a non-finite
/// coordinate or energy, or M(x0) cannot be factorized.
template <DiffusionModel M>
[[nodiscard]] std::optional<typename M::Point> fixman_step(const FixmanConfig& c, const M& m,
                                                           const typename M::Point& x0,
                                                           const typename M::Point& xi) {
  using Point = typename M::Point;
  const auto e0 = m.evaluate(x0);
  if (!e0.inside) return std::nullopt;
  const auto b = try_cholesky(e0.mobility);
  if (!b) return std::nullopt;
  const double s = std::sqrt(2.0 * c.h);
  const Point f0 = e0.drift();
  const Point x_pred = x0 - c.h * f0 + s * (b->lower * xi);
  if (!std::isfinite(m.energy(x_pred))) return std::nullopt;
  const auto e1 = m.evaluate(x_pred);
  const Point w = solve_transpose(*b, xi);  // B(x0)^{-T} xi
  Point x1 = x0 - 0.5 * c.h * (f0 + e1.drift()) + 0.5 * s * ((e0.mobility + e1.mobility) * w);
  if (!std::isfinite(m.energy(x1))) return std::nullopt;
  return x1;
}

/// Fixman trajectory state. `advance` returns false once the path explodes.
template <DiffusionModel M>
class FixmanChain {
 public:
  using Point = typename M::Point;

  FixmanChain(FixmanConfig c, const M& m, Point x0) : c_(c), m_(&m), x_(std::move(x0)) {
    c_.validate();
    if (!m.in_domain(x_)) throw OutOfDomainError("fixman: initial state is outside the physical domain");
  }

  bool advance(Rng& rng) {
    if (exploded_) return false;
    auto next = fixman_step(c_, *m_, x_, rng.noise<M::kStaticDim>(x_.size(), c_.beta));
    ++steps_;
    if (!next) {
      exploded_ = true;
      return false;
    }
    x_ = std::move(*next);
    return true;
  }

  [[nodiscard]] const Point& state() const { return x_; }
  [[nodiscard]] bool exploded() const { return exploded_; }
  [[nodiscard]] std::uint64_t steps() const { return steps_; }
  [[nodiscard]] double mean_alpha() const { return 1.0; }

 private:
  FixmanConfig c_;
  const M* m_;
  Point x_;
  bool exploded_ = false;
  std::uint64_t steps_ = 0;
};

template <int N>
struct FixmanRun {
  bool rejected = false;
  std::uint64_t exploded_at = 0;  // step index of the explosion, when rejected
  Vector<N> final_state;
};

/// Runs n_steps Fixman steps. The whole path counts as rejected if any step
/// explodes; observer(step_index, state) sees only the steps before that.
template <DiffusionModel M, class Observer>
FixmanRun<M::kStaticDim> run_with_rejection(const FixmanConfig& c, const M& m, const typename M::Point& x0,
                                            std::uint64_t n_steps, Rng& rng, Observer&& observer) {
  FixmanChain<M> chain(c, m, x0);
  for (std::uint64_t k = 1; k <= n_steps; ++k) {
    if (!chain.advance(rng)) return {true, k, chain.state()};
    observer(k, chain.state());
  }
  return {false, 0, chain.state()};
}

template <DiffusionModel M>
FixmanRun<M::kStaticDim> run_with_rejection(const FixmanConfig& c, const M& m, const typename M::Point& x0,
                                            std::uint64_t n_steps, Rng& rng) {
  return run_with_rejection(c, m, x0, n_steps, rng, [](std::uint64_t, const auto&) {});
}

}  // namespace metrodiff
