#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "metrodiff/parallel.hpp"

using namespace metrodiff;

namespace {

struct EnvGuard {
  explicit EnvGuard(const char* value) {
    if (const char* old = std::getenv("METRODIFF_WORKERS")) saved = old;
    if (value) {
      setenv("METRODIFF_WORKERS", value, 1);
    } else {
      unsetenv("METRODIFF_WORKERS");
    }
  }
  ~EnvGuard() {
    if (saved.empty()) {
      unsetenv("METRODIFF_WORKERS");
    } else {
      setenv("METRODIFF_WORKERS", saved.c_str(), 1);
    }
  }
  std::string saved;
};

}  // namespace

TEST(ResolveWorkers, ExplicitThenEnvThenHardware) {
  {
    const EnvGuard g("3");
    EXPECT_EQ(resolve_workers(5), 5);
    EXPECT_EQ(resolve_workers(0), 3);
  }
  {
    const EnvGuard g(nullptr);
    EXPECT_GE(resolve_workers(0), 1);
  }
  {
    const EnvGuard g("");
    EXPECT_GE(resolve_workers(0), 1);
  }
}

TEST(ResolveWorkers, MalformedEnvThrows) {
  for (const char* bad : {"zero", "0", "-2", "4x"}) {
    const EnvGuard g(bad);
    EXPECT_THROW((void)resolve_workers(0), std::invalid_argument) << bad;
  }
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (int workers : {1, 2, 7}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), workers, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) EXPECT_EQ(h, 1);
  }
  parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(ParallelFor, RethrowsTaskException) {
  for (int workers : {1, 4}) {
    EXPECT_THROW(parallel_for(100, workers,
                              [](std::size_t i) {
                                if (i == 37) throw std::runtime_error("boom");
                              }),
                 std::runtime_error);
  }
}

TEST(BlockReduce, FoldsInBlockOrderForAnyWorkerCount) {
  std::vector<double> v(10007);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + static_cast<double>(i) * 0.37);
  auto run = [&](int workers) {
    return block_reduce(
        v.size(), 256, workers, 0.0,
        [&](std::size_t b, std::size_t e) { return std::accumulate(v.begin() + b, v.begin() + e, 0.0); },
        [](double& acc, double p) { acc += p; });
  };
  const double one = run(1);
  EXPECT_EQ(one, run(3));
  EXPECT_EQ(one, run(16));
  EXPECT_NEAR(one, std::accumulate(v.begin(), v.end(), 0.0), 1e-12);

  std::vector<std::size_t> order;
  const auto blocks = block_reduce(
      1000, 300, 4, order, [](std::size_t b, std::size_t e) { return std::vector<std::size_t>{b, e}; },
      [](std::vector<std::size_t>& acc, const std::vector<std::size_t>& p) { acc.insert(acc.end(), p.begin(), p.end()); });
  EXPECT_EQ(blocks, (std::vector<std::size_t>{0, 300, 300, 600, 600, 900, 900, 1000}));
  EXPECT_THROW((void)block_reduce(
                   10, 0, 1, 0.0, [](std::size_t, std::size_t) { return 0.0; }, [](double&, double) {}),
               std::invalid_argument);
}
