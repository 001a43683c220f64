#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "metrodiff/metrodiff.hpp"

namespace metrodiff::cli {

/// Malformed or inconsistent configuration. `field` is the dotted key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message), field_(std::move(field)) {}

  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Task { timeseries, study, fpt, density, scan };
enum class IntegratorKind { metropolis, fixman };
enum class Observable { x, x_squared, mean_position, rg2, energy };
enum class ReferenceKind { value, fine, deterministic, richardson };

template <class E>
struct EnumNames;

template <>
struct EnumNames<Task> {
  static constexpr std::pair<Task, const char*> table[] = {
      {Task::timeseries, "timeseries"}, {Task::study, "study"}, {Task::fpt, "fpt"},
      {Task::density, "density"},       {Task::scan, "scan"}};
};
template <>
struct EnumNames<IntegratorKind> {
  static constexpr std::pair<IntegratorKind, const char*> table[] = {{IntegratorKind::metropolis, "metropolis"},
                                                                     {IntegratorKind::fixman, "fixman"}};
};
template <>
struct EnumNames<Observable> {
  static constexpr std::pair<Observable, const char*> table[] = {{Observable::x, "x"},
                                                                 {Observable::x_squared, "x_squared"},
                                                                 {Observable::mean_position, "mean_position"},
                                                                 {Observable::rg2, "rg2"},
                                                                 {Observable::energy, "energy"}};
};
template <>
struct EnumNames<ReferenceKind> {
  static constexpr std::pair<ReferenceKind, const char*> table[] = {
      {ReferenceKind::value, "value"},
      {ReferenceKind::fine, "fine"},
      {ReferenceKind::deterministic, "deterministic"},
      {ReferenceKind::richardson, "richardson"}};
};
template <>
struct EnumNames<DriftKind> {
  static constexpr std::pair<DriftKind, const char*> table[] = {{DriftKind::zero, "zero"},
                                                                {DriftKind::euler, "euler"},
                                                                {DriftKind::midpoint, "midpoint"},
                                                                {DriftKind::rk2, "ralston"},
                                                                {DriftKind::rk3, "kutta"}};
  static constexpr std::pair<DriftKind, const char*> aliases[] = {{DriftKind::rk2, "rk2"}, {DriftKind::rk3, "rk3"}};
};
template <>
struct EnumNames<NoiseKind> {
  static constexpr std::pair<NoiseKind, const char*> table[] = {
      {NoiseKind::frozen, "frozen"}, {NoiseKind::rk2, "rk2"}, {NoiseKind::rk3, "rk3"}};
};
template <>
struct EnumNames<A12Kind> {
  static constexpr std::pair<A12Kind, const char*> table[] = {
      {A12Kind::fixed, "fixed"}, {A12Kind::patched, "patched"}, {A12Kind::optimized, "optimized"}};
};
template <>
struct EnumNames<MobilityKind> {
  static constexpr std::pair<MobilityKind, const char*> table[] = {{MobilityKind::constant, "constant"},
                                                                   {MobilityKind::radial, "radial"}};
};
template <>
struct EnumNames<SpringKind> {
  static constexpr std::pair<SpringKind, const char*> table[] = {{SpringKind::wlc, "wlc"},
                                                                 {SpringKind::hookean, "hookean"}};
};

template <class E>
[[nodiscard]] std::string to_string(E e) {
  for (const auto& [v, n] : EnumNames<E>::table) {
    if (v == e) return n;
  }
  throw std::logic_error("unnamed enum value");
}

template <class E>
[[nodiscard]] std::string enum_choices() {
  std::string s;
  for (const auto& [v, n] : EnumNames<E>::table) s += (s.empty() ? "" : ", ") + std::string(n);
  return s;
}

inline const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"heavy_tail",     "tilted_well", "chain1d",      "rpy_chain",
                                              "double_well_2d", "quadratic",   "quartic_well", "quadratic_variable_mobility"};
  return names;
}

struct ModelSpec {
  std::string name = "quadratic";
  HeavyTailParams heavy_tail;
  TiltedWellParams tilted_well;
  Chain1dParams chain1d;
  RpyChainParams rpy_chain;
  DoubleWell2dParams double_well;
  double quadratic_k = 1.0;
  double quadratic_mobility = 1.0;
  std::vector<double> x0;  // empty: the model's default initial state

  bool operator==(const ModelSpec&) const = default;
};

struct StudySpec {
  ReferenceKind reference = ReferenceKind::value;
  double value = 0.0;
  double value_stderr = 0.0;
  double fine_h = 1e-5;
  std::vector<double> richardson_h;  // {coarse, fine}
  double order = 0.5;
  bool relative = false;
  std::string description;

  bool operator==(const StudySpec&) const = default;
};

struct FptSpec {
  double offset = 3.0;
  std::uint64_t max_steps = 100000000;

  bool operator==(const FptSpec&) const = default;
};

struct DensitySpec {
  int bins = 60;
  std::optional<double> period;  // wrapped histogram when set
  double lo = 0.0;
  double hi = 1.0;
  double burn_in = 0.1;  // fraction of steps discarded

  bool operator==(const DensitySpec&) const = default;
};

struct ScanSpec {
  std::vector<double> box{-3.0, 3.0, -2.0, 2.0};  // x1_lo, x1_hi, x2_lo, x2_hi
  int resolution = 201;

  bool operator==(const ScanSpec&) const = default;
};

/// Overrides applied by --full.
struct FullSpec {
  std::optional<std::uint64_t> n_traj;
  std::optional<std::uint64_t> n_steps;
  std::optional<std::vector<double>> h;

  bool operator==(const FullSpec&) const = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  Task task = Task::timeseries;
  ModelSpec model;
  IntegratorKind integrator = IntegratorKind::metropolis;
  DriftKind drift = DriftKind::rk2;
  std::optional<NoiseKind> noise;  // unset: rk3 for the Kutta drift, rk2 otherwise
  A12Policy a12_policy;
  std::vector<double> h{0.01};
  std::vector<double> beta{1.0};
  std::optional<double> t_final;
  std::optional<std::uint64_t> n_steps;
  std::uint64_t n_traj = 1;
  std::uint64_t seed = 0;
  Observable observable = Observable::x;
  std::uint64_t stride = 1;
  std::string output_dir = "out";
  StudySpec study;
  FptSpec fpt;
  DensitySpec density;
  ScanSpec scan;
  FullSpec full;

  bool operator==(const ExperimentConfig&) const = default;

  [[nodiscard]] NoiseKind noise_kind() const {
    if (noise) return *noise;
    return drift == DriftKind::rk3 ? NoiseKind::rk3 : NoiseKind::rk2;
  }

  [[nodiscard]] IntegratorConfig integrator_config(double h_value, double beta_value) const {
    DriftScheme d;
    d.kind = drift;
    NoiseScheme n;
    n.kind = noise_kind();
    return {h_value, beta_value, d, n, a12_policy};
  }

  /// Steps covering the run at step size h_value.
  [[nodiscard]] std::uint64_t steps_at(double h_value) const {
    if (n_steps) return *n_steps;
    return steps_for(*t_final, h_value);
  }

  void apply_full() {
    if (full.n_traj) n_traj = *full.n_traj;
    if (full.n_steps) {
      n_steps = *full.n_steps;
      t_final.reset();
    }
    if (full.h) h = *full.h;
  }
};

namespace detail {

inline void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(path.empty() ? "<root>" : path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

template <class T>
T scalar(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) throw ConfigError(field, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, "cannot parse '" + node.Scalar() + "'");
  }
}

template <class T>
void read(const YAML::Node& parent, const std::string& path, const std::string& key, T& out) {
  if (const auto n = parent[key]) out = scalar<T>(n, join(path, key));
}

template <class T>
void read(const YAML::Node& parent, const std::string& path, const std::string& key, std::optional<T>& out) {
  if (const auto n = parent[key]) out = scalar<T>(n, join(path, key));
}

template <class E>
E parse_enum(const YAML::Node& node, const std::string& field) {
  const auto s = scalar<std::string>(node, field);
  for (const auto& [v, n] : EnumNames<E>::table) {
    if (s == n) return v;
  }
  if constexpr (requires { EnumNames<E>::aliases; }) {
    for (const auto& [v, n] : EnumNames<E>::aliases) {
      if (s == n) return v;
    }
  }
  throw ConfigError(field, "unknown value '" + s + "' (expected one of: " + enum_choices<E>() + ")");
}

template <class E>
void read_enum(const YAML::Node& parent, const std::string& path, const std::string& key, E& out) {
  if (const auto n = parent[key]) out = parse_enum<E>(n, join(path, key));
}

/// A scalar or a list of scalars.
inline std::vector<double> real_list(const YAML::Node& node, const std::string& field) {
  if (node.IsScalar()) return {scalar<double>(node, field)};
  if (!node.IsSequence()) throw ConfigError(field, "expected a number or a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(scalar<double>(node[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

inline void parse_model(const YAML::Node& node, ModelSpec& m) {
  const std::string path = "model";
  if (!node.IsMap()) throw ConfigError(path, "expected a mapping");
  read(node, path, "name", m.name);
  bool known = false;
  for (const auto& n : model_names()) known = known || n == m.name;
  if (!known) throw ConfigError("model.name", "unknown model '" + m.name + "'");
  std::set<std::string> keys{"name", "x0"};
  if (m.name == "heavy_tail") {
    keys.insert("eta");
    read(node, path, "eta", m.heavy_tail.eta);
  } else if (m.name == "tilted_well") {
    keys.insert({"force", "epsilon", "amplitude", "period"});
    read(node, path, "force", m.tilted_well.force);
    read(node, path, "epsilon", m.tilted_well.epsilon);
    read(node, path, "amplitude", m.tilted_well.amplitude);
    read(node, path, "period", m.tilted_well.period);
  } else if (m.name == "chain1d") {
    keys.insert({"n_beads", "mu", "length", "epsilon", "ell"});
    read(node, path, "n_beads", m.chain1d.n_beads);
    read(node, path, "mu", m.chain1d.mu);
    read(node, path, "length", m.chain1d.length);
    read(node, path, "epsilon", m.chain1d.epsilon);
    read(node, path, "ell", m.chain1d.ell);
  } else if (m.name == "rpy_chain") {
    keys.insert({"n_beads", "bead_radius", "max_spring", "kuhn", "viscosity", "thermal_energy", "spring"});
    auto& p = m.rpy_chain;
    read(node, path, "n_beads", p.n_beads);
    read(node, path, "bead_radius", p.bead_radius);
    read(node, path, "max_spring", p.max_spring);
    read(node, path, "kuhn", p.kuhn);
    read(node, path, "viscosity", p.viscosity);
    read(node, path, "thermal_energy", p.thermal_energy);
    read_enum(node, path, "spring", p.spring);
  } else if (m.name == "double_well_2d") {
    keys.insert("mobility");
    read_enum(node, path, "mobility", m.double_well.mobility_kind);
  } else if (m.name == "quadratic") {
    keys.insert({"k", "mobility"});
    read(node, path, "k", m.quadratic_k);
    read(node, path, "mobility", m.quadratic_mobility);
  }
  check_keys(node, path, keys);
  if (const auto x0 = node["x0"]) m.x0 = real_list(x0, "model.x0");
}

}  // namespace detail

/// Checks ranges and cross-field consistency.
inline void validate(const ExperimentConfig& c) {
  if (c.h.empty()) throw ConfigError("h", "at least one step size is required");
  for (double h : c.h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("h", "step sizes must be positive and finite");
  }
  if (c.beta.empty()) throw ConfigError("beta", "at least one inverse temperature is required");
  for (double b : c.beta) {
    if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("beta", "inverse temperatures must be positive and finite");
  }
  if (c.t_final && c.n_steps) throw ConfigError("t_final", "give exactly one of t_final and n_steps");
  const bool needs_length = c.task == Task::timeseries || c.task == Task::study || c.task == Task::density;
  if (needs_length && !c.t_final && !c.n_steps) throw ConfigError("t_final", "give exactly one of t_final and n_steps");
  if (c.t_final && !(*c.t_final >= 0.0)) throw ConfigError("t_final", "must be non-negative");
  if (c.t_final && needs_length) {
    for (double h : c.h) {
      try {
        (void)steps_for(*c.t_final, h);
      } catch (const std::invalid_argument&) {
        throw ConfigError("t_final", "is not a whole number of steps of size " + std::to_string(h));
      }
    }
  }
  if (c.n_traj == 0) throw ConfigError("n_traj", "must be positive");
  if (c.stride == 0) throw ConfigError("stride", "must be positive");
  if (c.a12_policy.kind != A12Kind::fixed && c.drift != DriftKind::rk2) {
    throw ConfigError("a12_policy", "patched and optimized policies need the ralston drift");
  }
  if (c.a12_policy.value && (c.drift != DriftKind::rk2 || !(*c.a12_policy.value > 0.0))) {
    throw ConfigError("a12", "a fixed a12 needs the ralston drift and a positive value");
  }
  if (c.observable == Observable::rg2 && c.model.name != "rpy_chain") {
    throw ConfigError("observable", "rg2 needs the rpy_chain model");
  }
  if (c.task == Task::study) {
    for (std::size_t i = 1; i < c.h.size(); ++i) {
      if (!(c.h[i] < c.h[i - 1])) throw ConfigError("h", "study step sizes must be strictly decreasing");
    }
    if ((c.study.reference == ReferenceKind::fine || c.study.reference == ReferenceKind::deterministic) &&
        !(c.study.fine_h > 0.0)) {
      throw ConfigError("study.fine_h", "must be positive");
    }
    if (c.study.reference == ReferenceKind::richardson) {
      const auto& r = c.study.richardson_h;
      if (r.size() != 2 || !(r[0] > r[1] && r[1] > 0.0)) {
        throw ConfigError("study.richardson_h", "expected [coarse, fine] with coarse > fine > 0");
      }
      if (!(c.study.order > 0.0)) throw ConfigError("study.order", "must be positive");
    }
  }
  if (c.task == Task::fpt && c.fpt.max_steps == 0) throw ConfigError("fpt.max_steps", "must be positive");
  if (c.task == Task::density) {
    if (c.density.bins <= 0) throw ConfigError("density.bins", "must be positive");
    if (c.density.period && !(*c.density.period > 0.0)) throw ConfigError("density.period", "must be positive");
    if (!c.density.period && !(c.density.hi > c.density.lo)) throw ConfigError("density.hi", "must exceed density.lo");
    if (!(c.density.burn_in >= 0.0 && c.density.burn_in < 1.0)) throw ConfigError("density.burn_in", "must be in [0, 1)");
  }
  if (c.scan.box.size() != 4) throw ConfigError("scan.box", "expected [x1_lo, x1_hi, x2_lo, x2_hi]");
  const auto& b = c.scan.box;
  for (double v : b)
    if (!std::isfinite(v)) throw ConfigError("scan.box", "entries must be finite");
  if (!(b[0] < b[1]) || !(b[2] < b[3])) throw ConfigError("scan.box", "each axis needs lo < hi");
  if (c.scan.resolution < 2) throw ConfigError("scan.resolution", "must be at least 2");
  if (c.full.n_traj && *c.full.n_traj == 0) throw ConfigError("full.n_traj", "must be positive");
}

inline ExperimentConfig parse_config(const YAML::Node& root) {
  using namespace detail;
  ExperimentConfig c;
  check_keys(root, "",
             {"name", "task", "model", "integrator", "drift", "noise", "a12_policy", "a12", "h", "beta", "t_final",
              "n_steps", "n_traj", "seed", "observable", "stride", "output_dir", "study", "fpt", "density", "scan",
              "full"});
  read(root, "", "name", c.name);
  read_enum(root, "", "task", c.task);
  if (const auto m = root["model"]) {
    parse_model(m, c.model);
  } else {
    throw ConfigError("model", "is required");
  }
  read_enum(root, "", "integrator", c.integrator);
  read_enum(root, "", "drift", c.drift);
  if (const auto n = root["noise"]) c.noise = parse_enum<NoiseKind>(n, "noise");
  read_enum(root, "", "a12_policy", c.a12_policy.kind);
  read(root, "", "a12", c.a12_policy.value);
  if (const auto n = root["h"]) c.h = real_list(n, "h");
  if (const auto n = root["beta"]) c.beta = real_list(n, "beta");
  read(root, "", "t_final", c.t_final);
  read(root, "", "n_steps", c.n_steps);
  read(root, "", "n_traj", c.n_traj);
  read(root, "", "seed", c.seed);
  read_enum(root, "", "observable", c.observable);
  read(root, "", "stride", c.stride);
  read(root, "", "output_dir", c.output_dir);
  if (const auto s = root["study"]) {
    check_keys(s, "study", {"reference", "value", "value_stderr", "fine_h", "richardson_h", "order", "relative", "description"});
    read_enum(s, "study", "reference", c.study.reference);
    read(s, "study", "value", c.study.value);
    read(s, "study", "value_stderr", c.study.value_stderr);
    read(s, "study", "fine_h", c.study.fine_h);
    if (const auto r = s["richardson_h"]) c.study.richardson_h = real_list(r, "study.richardson_h");
    read(s, "study", "order", c.study.order);
    read(s, "study", "relative", c.study.relative);
    read(s, "study", "description", c.study.description);
  }
  if (const auto f = root["fpt"]) {
    check_keys(f, "fpt", {"offset", "max_steps"});
    read(f, "fpt", "offset", c.fpt.offset);
    read(f, "fpt", "max_steps", c.fpt.max_steps);
  }
  if (const auto d = root["density"]) {
    check_keys(d, "density", {"bins", "period", "lo", "hi", "burn_in"});
    read(d, "density", "bins", c.density.bins);
    read(d, "density", "period", c.density.period);
    read(d, "density", "lo", c.density.lo);
    read(d, "density", "hi", c.density.hi);
    read(d, "density", "burn_in", c.density.burn_in);
  }
  if (const auto s = root["scan"]) {
    check_keys(s, "scan", {"box", "resolution"});
    if (const auto b = s["box"]) c.scan.box = real_list(b, "scan.box");
    read(s, "scan", "resolution", c.scan.resolution);
  }
  if (const auto f = root["full"]) {
    check_keys(f, "full", {"n_traj", "n_steps", "h"});
    read(f, "full", "n_traj", c.full.n_traj);
    read(f, "full", "n_steps", c.full.n_steps);
    if (const auto h = f["h"]) c.full.h = real_list(h, "full.h");
  }
  validate(c);
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<root>", std::string("not valid YAML: ") + e.what());
  }
  return parse_config(root);
}

inline ExperimentConfig load_config(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError("<file>", "cannot read '" + path + "'");
  } catch (const YAML::Exception& e) {
    throw ConfigError("<root>", std::string("not valid YAML: ") + e.what());
  }
  return parse_config(root);
}

namespace detail {

inline void emit_list(YAML::Emitter& out, const std::vector<double>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double x : v) out << x;
  out << YAML::EndSeq;
}

inline void emit_model(YAML::Emitter& out, const ModelSpec& m) {
  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << m.name;
  if (m.name == "heavy_tail") {
    out << YAML::Key << "eta" << YAML::Value << m.heavy_tail.eta;
  } else if (m.name == "tilted_well") {
    const auto& p = m.tilted_well;
    out << YAML::Key << "force" << YAML::Value << p.force << YAML::Key << "epsilon" << YAML::Value << p.epsilon
        << YAML::Key << "amplitude" << YAML::Value << p.amplitude << YAML::Key << "period" << YAML::Value << p.period;
  } else if (m.name == "chain1d") {
    const auto& p = m.chain1d;
    out << YAML::Key << "n_beads" << YAML::Value << p.n_beads << YAML::Key << "mu" << YAML::Value << p.mu << YAML::Key
        << "length" << YAML::Value << p.length << YAML::Key << "epsilon" << YAML::Value << p.epsilon << YAML::Key
        << "ell" << YAML::Value << p.ell;
  } else if (m.name == "rpy_chain") {
    const auto& p = m.rpy_chain;
    out << YAML::Key << "n_beads" << YAML::Value << p.n_beads << YAML::Key << "bead_radius" << YAML::Value
        << p.bead_radius << YAML::Key << "max_spring" << YAML::Value << p.max_spring << YAML::Key << "kuhn"
        << YAML::Value << p.kuhn << YAML::Key << "viscosity" << YAML::Value << p.viscosity << YAML::Key
        << "thermal_energy" << YAML::Value << p.thermal_energy << YAML::Key << "spring" << YAML::Value
        << to_string(p.spring);
  } else if (m.name == "double_well_2d") {
    out << YAML::Key << "mobility" << YAML::Value << to_string(m.double_well.mobility_kind);
  } else if (m.name == "quadratic") {
    out << YAML::Key << "k" << YAML::Value << m.quadratic_k << YAML::Key << "mobility" << YAML::Value
        << m.quadratic_mobility;
  }
  if (!m.x0.empty()) {
    out << YAML::Key << "x0" << YAML::Value;
    emit_list(out, m.x0);
  }
  out << YAML::EndMap;
}

}  // namespace detail

/// Serializes every field that parse_config reads, with round-trip precision.
inline std::string serialize_config(const ExperimentConfig& c) {
  using detail::emit_list;
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.name;
  out << YAML::Key << "task" << YAML::Value << to_string(c.task);
  detail::emit_model(out, c.model);
  out << YAML::Key << "integrator" << YAML::Value << to_string(c.integrator);
  out << YAML::Key << "drift" << YAML::Value << to_string(c.drift);
  if (c.noise) out << YAML::Key << "noise" << YAML::Value << to_string(*c.noise);
  out << YAML::Key << "a12_policy" << YAML::Value << to_string(c.a12_policy.kind);
  if (c.a12_policy.value) out << YAML::Key << "a12" << YAML::Value << *c.a12_policy.value;
  out << YAML::Key << "h" << YAML::Value;
  emit_list(out, c.h);
  out << YAML::Key << "beta" << YAML::Value;
  emit_list(out, c.beta);
  if (c.t_final) out << YAML::Key << "t_final" << YAML::Value << *c.t_final;
  if (c.n_steps) out << YAML::Key << "n_steps" << YAML::Value << *c.n_steps;
  out << YAML::Key << "n_traj" << YAML::Value << c.n_traj;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "observable" << YAML::Value << to_string(c.observable);
  out << YAML::Key << "stride" << YAML::Value << c.stride;
  out << YAML::Key << "output_dir" << YAML::Value << c.output_dir;

  out << YAML::Key << "study" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "reference" << YAML::Value << to_string(c.study.reference);
  out << YAML::Key << "value" << YAML::Value << c.study.value;
  out << YAML::Key << "value_stderr" << YAML::Value << c.study.value_stderr;
  out << YAML::Key << "fine_h" << YAML::Value << c.study.fine_h;
  if (!c.study.richardson_h.empty()) {
    out << YAML::Key << "richardson_h" << YAML::Value;
    emit_list(out, c.study.richardson_h);
  }
  out << YAML::Key << "order" << YAML::Value << c.study.order;
  out << YAML::Key << "relative" << YAML::Value << c.study.relative;
  out << YAML::Key << "description" << YAML::Value << c.study.description;
  out << YAML::EndMap;

  out << YAML::Key << "fpt" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "offset" << YAML::Value << c.fpt.offset;
  out << YAML::Key << "max_steps" << YAML::Value << c.fpt.max_steps;
  out << YAML::EndMap;

  out << YAML::Key << "density" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "bins" << YAML::Value << c.density.bins;
  if (c.density.period) out << YAML::Key << "period" << YAML::Value << *c.density.period;
  out << YAML::Key << "lo" << YAML::Value << c.density.lo;
  out << YAML::Key << "hi" << YAML::Value << c.density.hi;
  out << YAML::Key << "burn_in" << YAML::Value << c.density.burn_in;
  out << YAML::EndMap;

  out << YAML::Key << "scan" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "box" << YAML::Value;
  emit_list(out, c.scan.box);
  out << YAML::Key << "resolution" << YAML::Value << c.scan.resolution;
  out << YAML::EndMap;

  if (c.full.n_traj || c.full.n_steps || c.full.h) {
    out << YAML::Key << "full" << YAML::Value << YAML::BeginMap;
    if (c.full.n_traj) out << YAML::Key << "n_traj" << YAML::Value << *c.full.n_traj;
    if (c.full.n_steps) out << YAML::Key << "n_steps" << YAML::Value << *c.full.n_steps;
    if (c.full.h) {
      out << YAML::Key << "h" << YAML::Value;
      emit_list(out, *c.full.h);
    }
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace metrodiff::cli
