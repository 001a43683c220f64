#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace metrodiff {

/// Worker count: an explicit positive request wins, then the
/// METRODIFF_WORKERS environment variable, then the hardware concurrency.
[[nodiscard]] inline int resolve_workers(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("METRODIFF_WORKERS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v <= 0) {
      throw std::invalid_argument(std::string("METRODIFF_WORKERS must be a positive integer, got '") + env + "'");
    }
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Tasks must write
/// only to their own slot; the first exception thrown is rethrown.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Splits [0, n_items) into fixed blocks of `block_size`, evaluates
/// block_fn(begin, end) -> Partial in parallel, and folds the partials in
/// block order. The block layout does not depend on the worker count, so the
/// result is bit-identical for any number of workers.
template <class Partial, class BlockFn, class MergeFn>
[[nodiscard]] Partial block_reduce(std::size_t n_items, std::size_t block_size, int workers, Partial init,
                                   BlockFn&& block_fn, MergeFn&& merge) {
  if (block_size == 0) throw std::invalid_argument("block_reduce: block_size must be positive");
  const std::size_t n_blocks = (n_items + block_size - 1) / block_size;
  std::vector<Partial> partials(n_blocks, init);
  parallel_for(n_blocks, workers, [&](std::size_t b) {
    const std::size_t begin = b * block_size;
    partials[b] = block_fn(begin, std::min(n_items, begin + block_size));
  });
  for (auto& p : partials) merge(init, p);
  return init;
}

}  // namespace metrodiff
