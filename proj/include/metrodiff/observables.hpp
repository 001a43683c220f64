#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "metrodiff/linalg.hpp"
#include "metrodiff/models/rpy_chain.hpp"
#include "metrodiff/models/tilted_well.hpp"
#include "metrodiff/parallel.hpp"
#include "metrodiff/random.hpp"

namespace metrodiff {

struct EnsembleEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
};

/// Streaming mean and variance (Welford), mergeable in a fixed order.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  void merge(const RunningStats& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(n_ + o.n_);
    const double d = o.mean_ - mean_;
    mean_ += d * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
  }

  [[nodiscard]] std::uint64_t count() const { return n_; }
  [[nodiscard]] double mean() const { return mean_; }
  [[nodiscard]] double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  [[nodiscard]] double std_error() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }
  [[nodiscard]] EnsembleEstimate estimate() const { return {mean_, std_error(), n_}; }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Average bead position (1/n) sum q_i.
template <int N>
[[nodiscard]] double mean_position(const Vector<N>& q) {
  return q.mean();
}

/// Rg^2 = (1/N_b) sum |q_i - centroid|^2 for a 3D chain stored as (x1, y1, z1, x2, ...).
template <int N>
[[nodiscard]] double gyration_radius_sq(const Vector<N>& x) {
  if (x.size() % 3 != 0 || x.size() == 0) throw std::invalid_argument("gyration_radius_sq: expected 3D bead coordinates");
  const Eigen::Index nb = x.size() / 3;
  const auto beads = Eigen::Map<const Eigen::Matrix<double, 3, Eigen::Dynamic>>(x.data(), 3, nb);
  const Vector<3> centroid = beads.rowwise().mean();
  return (beads.colwise() - centroid).colwise().squaredNorm().sum() / static_cast<double>(nb);
}

/// Equilibrium <Rg^2> of a free bead-spring chain. Bond vectors are independent
/// under exp(-beta U), so <Rg^2> = <b^2> (N^2 - 1) / (6 N) with <b^2> from a 1D
/// quadrature over one spring.
[[nodiscard]] inline double equilibrium_gyration_radius_sq(const RpyChainParams& p, int pieces = 64) {
  const double nb = p.n_beads;
  const double shape = (nb * nb - 1.0) / (6.0 * nb);
  if (p.spring == SpringKind::hookean) return 3.0 * p.thermal_energy / p.hookean_stiffness() * shape;
  const double u0 = wlc_energy(0.0, p);
  const double width = p.max_spring / pieces;
  double num = 0.0;
  double den = 0.0;
  for (int k = 0; k < pieces; ++k) {
    const double a = k * width;
    const double b = k + 1 == pieces ? p.max_spring : a + width;
    auto weight = [&](double r) { return r * r * std::exp(-(wlc_energy(r, p) - u0) / p.thermal_energy); };
    num += boost::math::quadrature::gauss<double, 30>::integrate([&](double r) { return r * r * weight(r); }, a, b);
    den += boost::math::quadrature::gauss<double, 30>::integrate(weight, a, b);
  }
  return num / den * shape;
}

// ---------------------------------------------------------------------------
// Ensembles

/// Raised when a run exhausts its step or attempt budget.
class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnsembleOptions {
  std::uint64_t n_traj = 1000;
  std::uint64_t seed = 0;
  int workers = 1;
  std::size_t block_size = 64;
  std::uint64_t attempt_factor = 10;  // attempt budget is attempt_factor * n_traj
};

/// Per-path output. Rejected (exploded) paths are dropped and resampled.
struct PathRecord {
  bool rejected = false;
  std::vector<double> values;
  double mean_alpha = 1.0;
};

struct EnsembleCounts {
  std::uint64_t attempts = 0;
  std::uint64_t survivors = 0;
  std::uint64_t rejected = 0;
  bool budget_exhausted = false;
  RunningStats alpha;  // per-path mean acceptance probability

  [[nodiscard]] double rejected_fraction() const {
    return attempts ? static_cast<double>(rejected) / static_cast<double>(attempts) : 0.0;
  }
};

/// Runs attempt(stream) for stream = 0, 1, 2, ... until n_traj paths survive
/// or the attempt budget is spent. Survivors reach sink(record) in stream
/// order, so the outcome does not depend on the worker count.
template <class AttemptFn, class Sink>
EnsembleCounts run_ensemble(const EnsembleOptions& o, AttemptFn&& attempt, Sink&& sink) {
  if (o.block_size == 0) throw std::invalid_argument("ensemble: block_size must be positive");
  EnsembleCounts counts;
  const std::uint64_t budget = o.attempt_factor * o.n_traj;
  const std::uint64_t round = o.block_size * static_cast<std::uint64_t>(std::max(1, o.workers)) * 4;
  std::uint64_t next = 0;
  std::vector<PathRecord> records;
  while (counts.survivors < o.n_traj && next < budget) {
    const std::uint64_t len = std::min({round, budget - next, o.n_traj - counts.survivors});
    records.assign(len, PathRecord{});
    const std::size_t n_blocks = (len + o.block_size - 1) / o.block_size;
    parallel_for(n_blocks, o.workers, [&](std::size_t b) {
      const std::uint64_t begin = b * o.block_size;
      const std::uint64_t end = std::min<std::uint64_t>(len, begin + o.block_size);
      for (std::uint64_t i = begin; i < end; ++i) records[i] = attempt(next + i);
    });
    for (const auto& r : records) {
      if (counts.survivors == o.n_traj) break;
      ++counts.attempts;
      if (r.rejected) {
        ++counts.rejected;
        continue;
      }
      ++counts.survivors;
      counts.alpha.add(r.mean_alpha);
      sink(r);
    }
    next += len;
  }
  counts.budget_exhausted = counts.survivors < o.n_traj;
  return counts;
}

struct TimeSeries {
  std::vector<double> times;
  std::vector<RunningStats> stats;
  EnsembleCounts counts;
};

/// Number of steps of size h covering [0, t_final]; t_final must be a whole
/// number of steps.
[[nodiscard]] inline std::uint64_t steps_for(double t_final, double h) {
  if (!(h > 0.0) || !(t_final >= 0.0)) throw std::invalid_argument("steps_for: need h > 0 and t_final >= 0");
  const double n = std::round(t_final / h);
  if (std::abs(n * h - t_final) > 1e-9 * std::max(1.0, t_final)) {
    throw std::invalid_argument("t_final is not a whole number of time steps");
  }
  return static_cast<std::uint64_t>(n);
}

/// Ensemble mean of observable(state) at t = k * stride * h, k = 0, 1, ...
///
/// make_stepper() returns a fresh path object with advance(Rng&) -> bool,
/// state() and mean_alpha(); a false return marks an exploded path.
template <class MakeStepper, class Observable>
TimeSeries time_series_ensemble(const EnsembleOptions& o, std::uint64_t n_steps, std::uint64_t stride, double h,
                                MakeStepper&& make_stepper, Observable&& observable) {
  if (stride == 0) throw std::invalid_argument("time series: stride must be positive");
  TimeSeries ts;
  for (std::uint64_t k = 0; k <= n_steps; k += stride) ts.times.push_back(static_cast<double>(k) * h);
  ts.stats.resize(ts.times.size());
  auto attempt = [&](std::uint64_t stream) {
    PathRecord rec;
    rec.values.reserve(ts.times.size());
    Rng rng(o.seed, stream);
    auto path = make_stepper();
    rec.values.push_back(observable(path.state()));
    for (std::uint64_t k = 1; k <= n_steps; ++k) {
      if (!path.advance(rng)) {
        rec.rejected = true;
        return rec;
      }
      if (k % stride == 0) rec.values.push_back(observable(path.state()));
    }
    rec.mean_alpha = path.mean_alpha();
    return rec;
  };
  ts.counts = run_ensemble(o, attempt, [&](const PathRecord& r) {
    for (std::size_t i = 0; i < r.values.size(); ++i) ts.stats[i].add(r.values[i]);
  });
  return ts;
}

/// First-passage estimate n h - h/2 for the first step n with X_n >= x0 + offset.
template <class Path>
[[nodiscard]] std::optional<double> first_passage_time(Path& path, Rng& rng, double h, double offset,
                                                       std::uint64_t max_steps) {
  const double target = path.state()(0) + offset;
  for (std::uint64_t n = 1; n <= max_steps; ++n) {
    if (!path.advance(rng)) return std::nullopt;
    if (path.state()(0) >= target) return static_cast<double>(n) * h - 0.5 * h;
  }
  throw BudgetExceededError("first passage: no crossing within " + std::to_string(max_steps) + " steps");
}

struct FptResult {
  std::vector<double> samples;  // survivors, in stream order
  RunningStats stats;
  EnsembleCounts counts;
};

template <class MakeStepper>
FptResult first_passage_ensemble(const EnsembleOptions& o, double h, double offset, std::uint64_t max_steps,
                                 MakeStepper&& make_stepper) {
  FptResult res;
  auto attempt = [&](std::uint64_t stream) {
    PathRecord rec;
    Rng rng(o.seed, stream);
    auto path = make_stepper();
    const auto tau = first_passage_time(path, rng, h, offset, max_steps);
    if (!tau) {
      rec.rejected = true;
      return rec;
    }
    rec.values.push_back(*tau);
    rec.mean_alpha = path.mean_alpha();
    return rec;
  };
  res.counts = run_ensemble(o, attempt, [&](const PathRecord& r) {
    res.samples.push_back(r.values[0]);
    res.stats.add(r.values[0]);
  });
  return res;
}

// ---------------------------------------------------------------------------
// Mean first passage time of the tilted well

/// Mean first passage time from x0 to x0 + 3 for the tilted periodic well.
///
/// Uses tau = beta / (1 - exp(-3 beta F)) * int_0^3 int_0^3
/// exp(beta [U(y) - U(y - u)] - beta F u) du dy, where U is the untilted
/// well; the geometric factor sums the periodic left tail exactly. The result
/// does not depend on x0.
///
/// Both integrals use composite 30-point Gauss-Legendre rules on partitions
/// cut at every jump and graded through the tanh layers around it, so the
/// inner integral is a smooth function of y between jumps.
[[nodiscard]] inline double mfpt_oracle(const TiltedWellParams& p, double beta, double /*x0*/ = 0.0,
                                        int pieces = 8) {
  if (!(p.force > 0.0)) throw std::invalid_argument("mfpt_oracle: F must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("mfpt_oracle: beta must be positive");
  if (pieces <= 0) throw std::invalid_argument("mfpt_oracle: pieces must be positive");
  using boost::math::quadrature::gauss;
  const double period = p.period;
  const double eps = p.epsilon;
  auto integrate_split = [&](auto&& f, double a, double b, const std::vector<double>& jumps,
                             const std::vector<double>& plain) {
    std::vector<double> cuts{a, b};
    for (double c : plain) {
      if (c > a && c < b) cuts.push_back(c);
    }
    for (double j : jumps) {
      for (double w : {0.0, 2.0, 8.0, 30.0}) {
        for (double c : {j - w * eps, j + w * eps}) {
          if (c > a && c < b) cuts.push_back(c);
        }
      }
    }
    std::sort(cuts.begin(), cuts.end());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double width = (cuts[i + 1] - cuts[i]) / pieces;
      if (!(width > 0.0)) continue;
      for (int k = 0; k < pieces; ++k) {
        sum += gauss<double, 30>::integrate(f, cuts[i] + k * width, cuts[i] + (k + 1) * width);
      }
    }
    if (!std::isfinite(sum)) throw std::runtime_error("mfpt_oracle: quadrature overflow");
    return sum;
  };
  auto inner = [&](double y) {
    const double uy = square_well_energy(y, p);
    auto f = [&](double u) { return std::exp(beta * (uy - square_well_energy(y - u, p)) - beta * p.force * u); };
    std::vector<double> jumps;
    for (double jump : {1.0, 2.0}) {
      const double u = wrap_periodic(y - jump, period);
      jumps.push_back(u);
      jumps.push_back(u - period);  // layers reaching in across u = 0 and u = period
      jumps.push_back(u + period);
    }
    // Grade the decay of exp(-beta F u) near u = 0.
    const double decay = 1.0 / (beta * p.force);
    return integrate_split(f, 0.0, period, jumps, {decay, 4 * decay, 16 * decay, 64 * decay});
  };
  const double outer = integrate_split(inner, 0.0, period, {0.0, 1.0, 2.0, 3.0}, {});
  return beta / (1.0 - std::exp(-period * beta * p.force)) * outer;
}

// ---------------------------------------------------------------------------
// Densities and distances

/// Histogram of x mod period on [0, period).
class WrappedHistogram {
 public:
  WrappedHistogram(double period, int bins) : period_(period), counts_(static_cast<std::size_t>(bins), 0) {
    if (!(period > 0.0) || bins <= 0) throw std::invalid_argument("wrapped histogram: need period > 0 and bins > 0");
  }

  void add(double x) {
    const double m = wrap_periodic(x, period_);
    auto i = static_cast<std::size_t>(m / period_ * static_cast<double>(counts_.size()));
    ++counts_[std::min(i, counts_.size() - 1)];
    ++total_;
  }

  void merge(const WrappedHistogram& o) {
    if (o.counts_.size() != counts_.size() || o.period_ != period_) throw std::invalid_argument("histogram shape mismatch");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
    total_ += o.total_;
  }

  [[nodiscard]] int bins() const { return static_cast<int>(counts_.size()); }
  [[nodiscard]] double width() const { return period_ / static_cast<double>(counts_.size()); }
  [[nodiscard]] double bin_center(int i) const { return (i + 0.5) * width(); }
  [[nodiscard]] std::uint64_t total() const { return total_; }
  [[nodiscard]] std::vector<double> density() const {
    std::vector<double> d(counts_.size(), 0.0);
    if (total_ == 0) return d;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      d[i] = static_cast<double>(counts_[i]) / (static_cast<double>(total_) * width());
    }
    return d;
  }

 private:
  double period_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

namespace detail {

// Bin averages of a density given on a uniform fine grid over [0, period]
// (fine.size() - 1 cells), normalized to unit mass.
inline std::vector<double> bin_average(const std::vector<double>& fine, double period, int bins) {
  const std::size_t cells = fine.size() - 1;
  const double dx = period / static_cast<double>(cells);
  std::vector<double> cum(fine.size(), 0.0);
  for (std::size_t i = 0; i < cells; ++i) cum[i + 1] = cum[i] + 0.5 * dx * (fine[i] + fine[i + 1]);
  const double mass = cum.back();
  const std::size_t per_bin = cells / static_cast<std::size_t>(bins);
  std::vector<double> out(static_cast<std::size_t>(bins));
  const double width = period / bins;
  for (int b = 0; b < bins; ++b) {
    out[b] = (cum[(b + 1) * per_bin] - cum[b * per_bin]) / (mass * width);
  }
  return out;
}

}  // namespace detail

/// Long-time density of x mod 3 for the tilted well: the steady state
/// p(y) ~ exp(-beta U~(y)) int_y^{y+3} exp(beta U~(z)) dz, bin-averaged.
[[nodiscard]] inline std::vector<double> wrapped_stationary_density(const TiltedWellParams& p, double beta, int bins,
                                                                    int cells_per_bin = 20000) {
  if (bins <= 0 || cells_per_bin <= 0) throw std::invalid_argument("wrapped density: bins must be positive");
  const std::size_t cells = static_cast<std::size_t>(bins) * static_cast<std::size_t>(cells_per_bin);
  const double period = p.period;
  const double dx = period / static_cast<double>(cells);
  // exp(beta U~) on [0, 2 period].
  std::vector<double> up(2 * cells + 1);
  for (std::size_t i = 0; i < up.size(); ++i) {
    const double z = static_cast<double>(i) * dx;
    up[i] = std::exp(beta * tilted_well_energy(z, p));
  }
  std::vector<double> cum(up.size(), 0.0);
  for (std::size_t i = 0; i + 1 < up.size(); ++i) cum[i + 1] = cum[i] + 0.5 * dx * (up[i] + up[i + 1]);
  std::vector<double> fine(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) fine[i] = (cum[i + cells] - cum[i]) / up[i];
  return detail::bin_average(fine, period, bins);
}

/// exp(-beta U~(x)) restricted to [0, 3), normalized and bin-averaged.
[[nodiscard]] inline std::vector<double> wrapped_gibbs_density(const TiltedWellParams& p, double beta, int bins,
                                                               int cells_per_bin = 20000) {
  if (bins <= 0 || cells_per_bin <= 0) throw std::invalid_argument("wrapped density: bins must be positive");
  const std::size_t cells = static_cast<std::size_t>(bins) * static_cast<std::size_t>(cells_per_bin);
  const double dx = p.period / static_cast<double>(cells);
  std::vector<double> fine(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) fine[i] = std::exp(-beta * tilted_well_energy(static_cast<double>(i) * dx, p));
  return detail::bin_average(fine, p.period, bins);
}

/// sum |a_i - b_i| * width.
[[nodiscard]] inline double l1_distance(const std::vector<double>& a, const std::vector<double>& b, double width) {
  if (a.size() != b.size()) throw std::invalid_argument("l1_distance: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s * width;
}

/// Kolmogorov-Smirnov sup distance between the empirical CDF of `samples`
/// and `cdf`. Sorts `samples` in place.
template <class Cdf>
[[nodiscard]] double ks_distance(std::vector<double>& samples, Cdf&& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_distance: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f), std::abs(f - static_cast<double>(i) / n)});
  }
  return d;
}

// ---------------------------------------------------------------------------
// Convergence studies

/// Richardson extrapolation of A(h) = A + C h^p from estimates at h1 > h2.
/// The default order 1/2 is the conservative weak order for state-dependent
/// mobility.
[[nodiscard]] inline EnsembleEstimate richardson(const EnsembleEstimate& coarse, double h1, const EnsembleEstimate& fine,
                                                 double h2, double order = 0.5) {
  if (!(h1 > h2 && h2 > 0.0)) throw std::invalid_argument("richardson: need h1 > h2 > 0");
  if (!(order > 0.0)) throw std::invalid_argument("richardson: order must be positive");
  const double a = std::pow(h1, order);
  const double b = std::pow(h2, order);
  const double c_fine = a / (a - b);
  const double c_coarse = -b / (a - b);
  return {c_fine * fine.value + c_coarse * coarse.value,
          std::hypot(c_fine * fine.std_error, c_coarse * coarse.std_error), std::min(coarse.n_samples, fine.n_samples)};
}

struct SlopeFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double std_error = std::numeric_limits<double>::quiet_NaN();
  bool reliable = false;
};

/// Least-squares slope of log(error) against log(h). The standard error
/// propagates the per-point statistical errors (delta method). The fit is
/// unreliable when any error is zero or below twice its standard error.
[[nodiscard]] inline SlopeFit fit_loglog_slope(const std::vector<double>& h, const std::vector<double>& errors,
                                               const std::vector<double>& std_errors) {
  if (h.size() != errors.size() || h.size() != std_errors.size()) throw std::invalid_argument("slope fit: size mismatch");
  SlopeFit fit;
  if (h.size() < 2) return fit;
  bool usable = true;
  for (std::size_t i = 0; i < h.size(); ++i) usable = usable && h[i] > 0.0 && errors[i] > 0.0;
  if (!usable) return fit;
  double lh_mean = 0.0;
  double le_mean = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    lh_mean += std::log(h[i]);
    le_mean += std::log(errors[i]);
  }
  lh_mean /= static_cast<double>(h.size());
  le_mean /= static_cast<double>(h.size());
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double dx = std::log(h[i]) - lh_mean;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - le_mean);
  }
  if (!(sxx > 0.0)) return fit;
  fit.slope = sxy / sxx;
  double var = 0.0;
  fit.reliable = true;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double w = (std::log(h[i]) - lh_mean) / sxx;
    const double rel = std_errors[i] / errors[i];
    var += w * w * rel * rel;
    fit.reliable = fit.reliable && errors[i] > 2.0 * std_errors[i];
  }
  fit.std_error = std::sqrt(var);
  return fit;
}

struct ConvergenceStudy {
  std::vector<double> h;
  std::vector<EnsembleEstimate> estimates;
  std::vector<double> errors;
  std::vector<double> std_errors;
  EnsembleEstimate reference;
  std::string reference_description;
  SlopeFit fit;
};

/// Estimates at each h (strictly decreasing) against a reference value.
[[nodiscard]] inline ConvergenceStudy weak_error_study(const std::vector<double>& h_values,
                                                       const std::function<EnsembleEstimate(double)>& estimate,
                                                       const EnsembleEstimate& reference, std::string description) {
  for (std::size_t i = 0; i < h_values.size(); ++i) {
    if (!(h_values[i] > 0.0) || (i > 0 && !(h_values[i] < h_values[i - 1]))) {
      throw std::invalid_argument("weak_error_study: h values must be positive and strictly decreasing");
    }
  }
  ConvergenceStudy s;
  s.h = h_values;
  s.reference = reference;
  s.reference_description = std::move(description);
  for (double h : h_values) {
    const auto e = estimate(h);
    s.estimates.push_back(e);
    s.errors.push_back(std::abs(e.value - reference.value));
    s.std_errors.push_back(std::hypot(e.std_error, reference.std_error));
  }
  s.fit = fit_loglog_slope(s.h, s.errors, s.std_errors);
  return s;
}

}  // namespace metrodiff
