#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "experiment_config.hpp"
#include "runner.hpp"

namespace {

using namespace metrodiff;
using namespace metrodiff::cli;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  bool full = false;
  std::string out;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--config", f.config, "Experiment config file (YAML)")->required();
  app->add_option("--seed", f.seed, "Override the config seed");
  app->add_option("--workers", f.workers, "Worker threads (default: METRODIFF_WORKERS or all cores)");
  app->add_flag("--full", f.full, "Use the larger run sizes from the config's 'full' block");
  app->add_option("--out", f.out, "Output directory (overrides output_dir)");
}

void print_summary(const RunSummary& s, double seconds) {
  std::printf("summary: task=%s paths=%llu rejected=%llu mean_acceptance=%.6f wall_time=%.3fs", s.task.c_str(),
              static_cast<unsigned long long>(s.attempts - s.rejected), static_cast<unsigned long long>(s.rejected),
              s.acceptance.count() ? s.acceptance.mean() : 1.0, seconds);
  for (const auto& n : s.notes) std::printf(" %s", n.c_str());
  std::printf("\n");
  for (const auto& f : s.files) std::printf("wrote %s\n", f.c_str());
}

int run_experiment(const RunFlags& f, bool scan_only) {
  const auto start = std::chrono::steady_clock::now();
  RunSummary summary;
  try {
    auto config = load_config(f.config);
    if (f.seed) config.seed = *f.seed;
    if (f.full) {
      config.apply_full();
      validate(config);
    }
    RunOptions o;
    o.workers = resolve_workers(f.workers);
    o.output_dir = f.out.empty() ? config.output_dir : f.out;
    Runner runner(config, o);
    summary = scan_only ? runner.scan() : runner.run();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  print_summary(summary, seconds);
  return kExitOk;
}

int run_verify(std::uint64_t seed, double perturb_b4) {
  VerifyOptions opt;
  opt.seed = seed;
  opt.rk2_b4_perturbation = perturb_b4;
  bool all = true;
  for (const auto& c : run_verify_suite(opt)) {
    std::printf("%s %-32s worst=%.3e tolerance=%.1e\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.worst,
                c.tolerance);
    all = all && c.passed;
  }
  std::printf("verify: %s\n", all ? "all checks passed" : "FAILURES");
  return all ? kExitOk : kExitNumerical;
}

void list_models() {
  std::printf("heavy_tail                   1D, U = eta log x on x >= 1; params: eta\n");
  std::printf("tilted_well                  1D, periodic square well with tilt; params: force, epsilon, amplitude, period\n");
  std::printf("chain1d                      n-bead FENE chain on [0, L] with Stokes mobility; params: n_beads, mu, length, epsilon, ell\n");
  std::printf("rpy_chain                    3D bead-spring chain with RPY mobility; params: n_beads, bead_radius, max_spring, kuhn, viscosity, thermal_energy, spring\n");
  std::printf("double_well_2d               2D double well; params: mobility (constant | radial)\n");
  std::printf("quadratic                    1D U = k x^2 / 2 with constant mobility; params: k, mobility\n");
  std::printf("quartic_well                 1D U = (1 - x^2)^2 / 4\n");
  std::printf("quadratic_variable_mobility  1D quadratic well with mobility 1 + x^2 / 2\n");
}

void list_schemes() {
  std::printf("integrators: %s\n", enum_choices<IntegratorKind>().c_str());
  std::printf("drift:       %s\n", enum_choices<DriftKind>().c_str());
  std::printf("noise:       %s (default: rk3 with kutta, rk2 otherwise)\n", enum_choices<NoiseKind>().c_str());
  std::printf("a12_policy:  %s\n", enum_choices<A12Kind>().c_str());
  std::printf("tasks:       %s\n", enum_choices<Task>().c_str());
  std::printf("observables: %s\n", enum_choices<Observable>().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metropolis-adjusted Runge-Kutta integrators for self-adjoint diffusions"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  add_run_flags(run, run_flags);

  RunFlags scan_flags;
  auto* scan = app.add_subcommand("scan", "Write the E(x, h) grid for a 1D or 2D model");
  add_run_flags(scan, scan_flags);

  std::uint64_t verify_seed = 7;
  double perturb_b4 = 0.0;
  auto* verify = app.add_subcommand("verify", "Check the exact identities of the integrator");
  verify->add_option("--seed", verify_seed, "Seed for the random test inputs");
  verify->add_option("--debug-perturb-b4", perturb_b4, "Add this amount to the rk2 b4 coefficient");

  auto* models = app.add_subcommand("list-models", "List the available models");
  auto* schemes = app.add_subcommand("list-schemes", "List integrators, stage schemes and policies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  if (*run) return run_experiment(run_flags, false);
  if (*scan) return run_experiment(scan_flags, true);
  if (*verify) return run_verify(verify_seed, perturb_b4);
  if (*models) list_models();
  if (*schemes) list_schemes();
  return kExitOk;
}
