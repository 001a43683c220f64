#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "experiment_config.hpp"

namespace metrodiff::cli {

/// Numerical failure during a run: non-SPD mobility at an accepted state, or
/// an exhausted step or attempt budget.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using AnyModel = std::variant<HeavyTail, TiltedWell, Chain1d<>, RpyChain, DoubleWell2d, Quadratic<1>, QuarticWell,
                              QuadraticVariableMobility>;

inline AnyModel make_model(const ModelSpec& s) {
  try {
    if (s.name == "heavy_tail") return HeavyTail(s.heavy_tail);
    if (s.name == "tilted_well") return TiltedWell(s.tilted_well);
    if (s.name == "chain1d") return Chain1d<>(s.chain1d);
    if (s.name == "rpy_chain") return RpyChain(s.rpy_chain);
    if (s.name == "double_well_2d") return DoubleWell2d(s.double_well);
    if (s.name == "quadratic") return Quadratic<1>(s.quadratic_k, s.quadratic_mobility);
    if (s.name == "quartic_well") return QuarticWell();
    if (s.name == "quadratic_variable_mobility") return QuadraticVariableMobility();
  } catch (const std::exception& e) {
    throw ConfigError("model", e.what());
  }
  throw ConfigError("model.name", "unknown model '" + s.name + "'");
}

template <DiffusionModel M>
typename M::Point default_initial(const M& m) {
  using Point = typename M::Point;
  if constexpr (std::is_same_v<M, HeavyTail>) {
    return Point(2.0);
  } else if constexpr (std::is_same_v<M, Chain1d<>>) {
    return m.default_initial();
  } else if constexpr (std::is_same_v<M, RpyChain>) {
    return m.straight_chain(1.5);
  } else if constexpr (std::is_same_v<M, DoubleWell2d>) {
    return Point(0.0, -0.01);
  } else if constexpr (std::is_same_v<M, TiltedWell>) {
    return Point(0.0);
  } else {
    return Point(Point::Ones(m.dim()));
  }
}

template <DiffusionModel M>
typename M::Point initial_state(const M& m, const ModelSpec& s) {
  using Point = typename M::Point;
  if (s.x0.empty()) return default_initial(m);
  if (static_cast<Eigen::Index>(s.x0.size()) != m.dim()) {
    throw ConfigError("model.x0", "expected " + std::to_string(m.dim()) + " coordinates");
  }
  Point x(m.dim());
  for (Eigen::Index i = 0; i < m.dim(); ++i) x(i) = s.x0[static_cast<std::size_t>(i)];
  if (!m.in_domain(x)) throw ConfigError("model.x0", "initial state is outside the model's domain");
  return x;
}

template <DiffusionModel M>
std::function<double(const typename M::Point&)> observable_fn(Observable o, const M& m) {
  using Point = typename M::Point;
  switch (o) {
    case Observable::x:
      return [](const Point& x) { return x(0); };
    case Observable::x_squared:
      return [](const Point& x) { return x(0) * x(0); };
    case Observable::mean_position:
      return [](const Point& x) { return mean_position(x); };
    case Observable::rg2:
      return [](const Point& x) { return gyration_radius_sq(x); };
    case Observable::energy:
      return [&m](const Point& x) { return m.energy(x); };
  }
  throw std::logic_error("unhandled observable");
}

struct RunSummary {
  std::string task;
  RunningStats acceptance;  // per-path mean acceptance probability
  std::uint64_t attempts = 0;
  std::uint64_t rejected = 0;
  std::vector<std::string> notes;
  std::vector<std::string> files;
};

struct RunOptions {
  int workers = 1;
  std::string output_dir;
};

inline std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

inline std::string short_fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

/// CSV writer: header row, '.' decimal, round-trip precision.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_.imbue(std::locale::classic());
    row_strings(header);
  }

  void row(const std::vector<double>& values) {
    std::vector<std::string> s;
    s.reserve(values.size());
    for (double v : values) s.push_back(fmt(v));
    row_strings(s);
  }

  void row_strings(const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

class Runner {
 public:
  Runner(ExperimentConfig c, RunOptions o) : c_(std::move(c)), o_(std::move(o)), model_(make_model(c_.model)) {
    summary_.task = to_string(c_.task);
    std::visit([&](const auto& m) { (void)initial_state(m, c_.model); }, model_);
    std::filesystem::create_directories(o_.output_dir);
  }

  RunSummary run() {
    std::visit([&](const auto& m) { dispatch(m); }, model_);
    return summary_;
  }

  RunSummary scan() {
    std::visit([&](const auto& m) { run_scan(m); }, model_);
    return summary_;
  }

 private:
  template <DiffusionModel M>
  void dispatch(const M& m) {
    switch (c_.task) {
      case Task::timeseries:
        return run_timeseries(m);
      case Task::study:
        return run_study(m);
      case Task::fpt:
        return run_fpt(m);
      case Task::density:
        return run_density(m);
      case Task::scan:
        return run_scan(m);
    }
  }

  // Output file name; a suffix marks the (beta, h) pair when either is a list.
  std::filesystem::path out_path(const std::string& stem, double beta, std::optional<double> h) const {
    std::string name = stem;
    if (c_.beta.size() > 1) name += "_beta" + short_fmt(beta);
    if (h && c_.h.size() > 1) name += "_h" + short_fmt(*h);
    return std::filesystem::path(o_.output_dir) / (name + ".csv");
  }

  EnsembleOptions ensemble_options() const {
    EnsembleOptions e;
    e.n_traj = c_.n_traj;
    e.seed = c_.seed;
    e.workers = o_.workers;
    return e;
  }

  void account(const EnsembleCounts& counts) {
    summary_.acceptance.merge(counts.alpha);
    summary_.attempts += counts.attempts;
    summary_.rejected += counts.rejected;
    if (counts.budget_exhausted) {
      throw NumericalFailure("attempt budget exhausted: " + std::to_string(counts.survivors) + " of " +
                             std::to_string(c_.n_traj) + " paths survived " + std::to_string(counts.attempts) +
                             " attempts");
    }
  }

  // Calls fn(make_stepper) with a factory for the configured integrator.
  template <DiffusionModel M, class Fn>
  void with_stepper(const M& m, double h, double beta, Fn&& fn) {
    const auto x0 = initial_state(m, c_.model);
    if (c_.integrator == IntegratorKind::metropolis) {
      const auto ic = c_.integrator_config(h, beta);
      fn([&m, ic, x0] { return MetropolisChain<M>(ic, m, x0); });
    } else {
      const FixmanConfig fc{h, beta};
      fn([&m, fc, x0] { return FixmanChain<M>(fc, m, x0); });
    }
  }

  template <DiffusionModel M>
  TimeSeries time_series(const M& m, double h, double beta, std::uint64_t stride) {
    const auto obs = observable_fn(c_.observable, m);
    const auto n = c_.steps_at(h);
    TimeSeries ts;
    with_stepper(m, h, beta, [&](auto make) {
      ts = time_series_ensemble(ensemble_options(), n, std::min<std::uint64_t>(stride, std::max<std::uint64_t>(n, 1)), h,
                                make, obs);
    });
    account(ts.counts);
    return ts;
  }

  template <DiffusionModel M>
  void run_timeseries(const M& m) {
    for (double beta : c_.beta) {
      for (double h : c_.h) {
        const auto ts = time_series(m, h, beta, c_.stride);
        const auto path = out_path("timeseries", beta, h);
        CsvWriter csv(path, {"t", "mean", "stderr"});
        for (std::size_t i = 0; i < ts.times.size(); ++i) {
          csv.row({ts.times[i], ts.stats[i].mean(), ts.stats[i].std_error()});
        }
        summary_.files.push_back(path.string());
      }
    }
  }

  template <DiffusionModel M>
  EnsembleEstimate final_estimate(const M& m, double h, double beta) {
    const auto ts = time_series(m, h, beta, std::numeric_limits<std::uint64_t>::max());
    return ts.stats.back().estimate();
  }

  template <DiffusionModel M>
  void run_study(const M& m) {
    for (double beta : c_.beta) {
      const auto& s = c_.study;
      EnsembleEstimate ref{s.value, s.value_stderr, 0};
      std::string description = s.description;
      if (s.reference == ReferenceKind::fine) {
        ref = final_estimate(m, s.fine_h, beta);
        if (description.empty()) description = "fine-step run at h = " + short_fmt(s.fine_h);
      } else if (s.reference == ReferenceKind::deterministic) {
        const auto x = noiseless_flow(DriftScheme::kutta(), m, initial_state(m, c_.model), s.fine_h,
                                      c_.steps_at(s.fine_h));
        ref = {observable_fn(c_.observable, m)(x), 0.0, 1};
        if (description.empty()) description = "noiseless Kutta stepping at h = " + short_fmt(s.fine_h);
      } else if (s.reference == ReferenceKind::richardson) {
        const auto coarse = final_estimate(m, s.richardson_h[0], beta);
        const auto fine = final_estimate(m, s.richardson_h[1], beta);
        ref = richardson(coarse, s.richardson_h[0], fine, s.richardson_h[1], s.order);
        if (description.empty()) {
          description = "Richardson extrapolation from h = " + short_fmt(s.richardson_h[0]) + " and " +
                        short_fmt(s.richardson_h[1]) + " with order " + short_fmt(s.order);
        }
      } else if (description.empty()) {
        description = "fixed value " + fmt(s.value);
      }
      auto study = weak_error_study(
          c_.h, [&](double h) { return final_estimate(m, h, beta); }, ref, description);
      if (s.relative && ref.value != 0.0) {
        for (std::size_t i = 0; i < study.h.size(); ++i) {
          study.errors[i] /= std::abs(ref.value);
          study.std_errors[i] /= std::abs(ref.value);
        }
        study.fit = fit_loglog_slope(study.h, study.errors, study.std_errors);
      }
      const auto path = out_path("study", beta, std::nullopt);
      CsvWriter csv(path, {"h", "error", "stderr"});
      for (std::size_t i = 0; i < study.h.size(); ++i) csv.row({study.h[i], study.errors[i], study.std_errors[i]});
      const auto fit_path = out_path("study_fit", beta, std::nullopt);
      CsvWriter fit(fit_path, {"slope", "slope_stderr", "reliable", "reference", "reference_stderr", "description"});
      std::string quoted = "\"";
      for (char ch : study.reference_description) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      quoted += "\"";
      fit.row_strings({fmt(study.fit.slope), fmt(study.fit.std_error), study.fit.reliable ? "1" : "0",
                       fmt(study.reference.value), fmt(study.reference.std_error), quoted});
      summary_.files.push_back(path.string());
      summary_.files.push_back(fit_path.string());
      summary_.notes.push_back("slope=" + short_fmt(study.fit.slope) + (study.fit.reliable ? "" : " (unreliable)"));
    }
  }

  template <DiffusionModel M>
  void run_fpt(const M& m) {
    if (m.dim() != 1) throw ConfigError("task", "first passage runs need a 1D model");
    for (double beta : c_.beta) {
      for (double h : c_.h) {
        FptResult res;
        try {
          with_stepper(m, h, beta, [&](auto make) {
            res = first_passage_ensemble(ensemble_options(), h, c_.fpt.offset, c_.fpt.max_steps, make);
          });
        } catch (const BudgetExceededError& e) {
          throw NumericalFailure(e.what());
        }
        account(res.counts);
        const auto path = out_path("fpt", beta, h);
        CsvWriter csv(path, {"tau"});
        for (double t : res.samples) csv.row({t});
        summary_.files.push_back(path.string());
        std::string note = "mean_tau=" + short_fmt(res.stats.mean()) + "+-" + short_fmt(res.stats.std_error());
        if constexpr (std::is_same_v<M, TiltedWell>) {
          if (m.params().force > 0.0) note += " oracle=" + short_fmt(mfpt_oracle(m.params(), beta));
        }
        summary_.notes.push_back(note);
      }
    }
  }

  template <DiffusionModel M>
  void run_density(const M& m) {
    const auto& d = c_.density;
    const auto bins = static_cast<std::size_t>(d.bins);
    for (double beta : c_.beta) {
      for (double h : c_.h) {
        const auto n = c_.steps_at(h);
        const auto burn = static_cast<std::uint64_t>(std::floor(d.burn_in * static_cast<double>(n)));
        std::vector<double> counts(bins, 0.0);
        double total = 0.0;
        EnsembleCounts ec;
        with_stepper(m, h, beta, [&](auto make) {
          const auto o = ensemble_options();
          auto attempt = [&](std::uint64_t stream) {
            PathRecord rec;
            rec.values.assign(bins + 1, 0.0);  // bin counts, then the sample total
            Rng rng(o.seed, stream);
            auto path = make();
            for (std::uint64_t k = 1; k <= n; ++k) {
              if (!path.advance(rng)) {
                rec.rejected = true;
                return rec;
              }
              if (k <= burn) continue;
              const double x = path.state()(0);
              rec.values[bins] += 1.0;
              if (d.period) {
                const auto i = static_cast<std::size_t>(wrap_periodic(x, *d.period) / *d.period * d.bins);
                rec.values[std::min(i, bins - 1)] += 1.0;
              } else if (x >= d.lo && x < d.hi) {
                const auto i = static_cast<std::size_t>((x - d.lo) / (d.hi - d.lo) * d.bins);
                rec.values[std::min(i, bins - 1)] += 1.0;
              }
            }
            rec.mean_alpha = path.mean_alpha();
            return rec;
          };
          ec = run_ensemble(o, attempt, [&](const PathRecord& r) {
            for (std::size_t i = 0; i < bins; ++i) counts[i] += r.values[i];
            total += r.values[bins];
          });
        });
        account(ec);
        const double lo = d.period ? 0.0 : d.lo;
        const double width = (d.period ? *d.period : d.hi - d.lo) / d.bins;
        std::vector<double> density(bins, 0.0);
        for (std::size_t i = 0; i < bins; ++i) density[i] = total > 0.0 ? counts[i] / (total * width) : 0.0;
        const auto path = out_path("density", beta, h);
        CsvWriter csv(path, {"bin_center", "density"});
        for (std::size_t i = 0; i < bins; ++i) csv.row({lo + (static_cast<double>(i) + 0.5) * width, density[i]});
        summary_.files.push_back(path.string());
        if constexpr (std::is_same_v<M, TiltedWell>) {
          if (d.period && *d.period == m.params().period) {
            const auto steady = wrapped_stationary_density(m.params(), beta, d.bins, 2000);
            const auto gibbs = wrapped_gibbs_density(m.params(), beta, d.bins, 2000);
            summary_.notes.push_back("l1_steady=" + short_fmt(l1_distance(density, steady, width)) +
                                     " l1_gibbs=" + short_fmt(l1_distance(density, gibbs, width)));
          }
        }
      }
    }
  }

  template <DiffusionModel M>
  void run_scan(const M& m) {
    if (m.dim() > 2) throw ConfigError("model.name", "E-grid scans need a 1D or 2D model");
    const ScanBox box{c_.scan.box[0], c_.scan.box[1], c_.scan.box[2], c_.scan.box[3]};
    if (box.empty()) throw ConfigError("scan.box", "the scan box is empty");
    for (double h : c_.h) {
      const auto ic = c_.integrator_config(h, c_.beta.front());
      if (m.dim() == 1 && ic.drift.kind != DriftKind::rk2) {
        throw ConfigError("drift", "1D scans vary a12 and need the ralston drift");
      }
      const auto grid = scan_E_grid(ic.drift, ic.noise, m, box, c_.scan.resolution, h, o_.workers);
      const auto path = out_path("scan", c_.beta.front(), h);
      CsvWriter csv(path, {"x1", "x2", "E"});
      for (const auto& p : grid.points) csv.row({p.x1, p.x2, p.e});
      summary_.files.push_back(path.string());
      summary_.notes.push_back("h=" + short_fmt(h) + " positive_points=" + std::to_string(grid.positive_count()) +
                               "/" + std::to_string(grid.points.size()));
    }
  }

  ExperimentConfig c_;
  RunOptions o_;
  AnyModel model_;
  RunSummary summary_;
};

}  // namespace metrodiff::cli
