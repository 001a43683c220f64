#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "experiment_config.hpp"

using namespace metrodiff;
using namespace metrodiff::cli;

namespace {

std::vector<std::filesystem::path> shipped_configs() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(METRODIFF_CONFIG_DIR))
    if (e.path().extension() == ".yaml") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string field_of(const std::string& text) {
  try {
    (void)parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

const char* kMinimal = R"(
name: t
task: timeseries
model: {name: quadratic, k: 2.0}
integrator: metropolis
drift: ralston
h: [0.1, 0.05]
beta: 1.0
t_final: 1.0
n_traj: 4
seed: 3
observable: x
)";

}  // namespace

TEST(Config, ShippedConfigsRoundTrip) {
  const auto files = shipped_configs();
  ASSERT_GE(files.size(), 20u);
  for (const auto& f : files) {
    SCOPED_TRACE(f.string());
    const auto c = load_config(f.string());
    const auto text = serialize_config(c);
    const auto again = parse_config_text(text);
    EXPECT_EQ(c, again);
    EXPECT_EQ(text, serialize_config(again));
  }
}

TEST(Config, FullOverridesStayValid) {
  for (const auto& f : shipped_configs()) {
    SCOPED_TRACE(f.string());
    auto c = load_config(f.string());
    c.apply_full();
    EXPECT_NO_THROW(validate(c));
  }
}

TEST(Config, MinimalParsesWithDefaults) {
  const auto c = parse_config_text(kMinimal);
  EXPECT_EQ(c.task, Task::timeseries);
  EXPECT_EQ(c.h, (std::vector<double>{0.1, 0.05}));
  EXPECT_EQ(c.beta, (std::vector<double>{1.0}));
  EXPECT_EQ(c.steps_at(0.1), 10u);
  EXPECT_EQ(c.steps_at(0.05), 20u);
  EXPECT_EQ(c.noise_kind(), NoiseKind::rk2);
}

TEST(Config, SchemeAliases) {
  std::string text = kMinimal;
  text.replace(text.find("drift: ralston"), 14, "drift: rk3    ");
  const auto c = parse_config_text(text);
  EXPECT_EQ(c.drift, DriftKind::rk3);
  EXPECT_EQ(c.noise_kind(), NoiseKind::rk3);
}

TEST(Config, ErrorsNameTheField) {
  const std::string base = kMinimal;
  auto with = [&](const std::string& from, const std::string& to) {
    std::string t = base;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  EXPECT_EQ(field_of(with("h: [0.1, 0.05]", "h: -1")), "h");
  EXPECT_EQ(field_of(with("h: [0.1, 0.05]", "h: [0.1, nan]")), "h[1]");
  EXPECT_EQ(field_of(with("beta: 1.0", "beta: 0")), "beta");
  EXPECT_EQ(field_of(with("n_traj: 4", "n_traj: 0")), "n_traj");
  EXPECT_EQ(field_of(with("drift: ralston", "drift: heun")), "drift");
  EXPECT_EQ(field_of(with("task: timeseries", "task: movie")), "task");
  EXPECT_EQ(field_of(with("k: 2.0", "k: 2.0, spring: 3")), "model.spring");
  EXPECT_EQ(field_of(with("name: quadratic", "name: pendulum")), "model.name");
  EXPECT_EQ(field_of(base + "stepsize: 0.1\n"), "stepsize");
  EXPECT_EQ(field_of(with("t_final: 1.0", "t_final: 1.0\nn_steps: 10")), "t_final");
  EXPECT_EQ(field_of(base + "scan: {box: [1, 1, -2, 2]}\n"), "scan.box");
  EXPECT_EQ(field_of("[1, 2]"), "<root>");
}

TEST(Config, ErrorMessageFormat) {
  const ConfigError e("h", "must be positive");
  EXPECT_EQ(std::string(e.what()), "config field 'h': must be positive");
}

TEST(Config, MissingFileIsConfigError) {
  EXPECT_THROW((void)load_config("/nonexistent/metrodiff.yaml"), ConfigError);
}
