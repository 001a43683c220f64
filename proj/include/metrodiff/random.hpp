#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "metrodiff/linalg.hpp"

namespace metrodiff {

/// Philox4x32-10 counter-based generator.
///
/// The key is the 64-bit master seed; the high half of the 128-bit counter is
/// the stream (trajectory) index and the low half counts blocks. Stream k of a
/// given seed is the same sequence no matter which worker draws it.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (lane_ == 2) {
      const Block ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
      buffer_ = bijection(ctr, key_);
      ++block_;
      lane_ = 0;
    }
    const auto lo = static_cast<result_type>(buffer_[2 * lane_]);
    const auto hi = static_cast<result_type>(buffer_[2 * lane_ + 1]);
    ++lane_;
    return (hi << 32) | lo;
  }

  /// The raw 10-round Philox bijection.
  static Block bijection(Block ctr, Key key) {
    constexpr std::uint64_t kM0 = 0xD2511F53u;
    constexpr std::uint64_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = kM0 * ctr[0];
      const std::uint64_t p1 = kM1 * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int lane_ = 2;
};

/// Per-trajectory random source: a Philox stream plus the distributions the
/// integrators draw from.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(seed, stream) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  /// Gaussian vector with mean zero and covariance beta^{-1} I.
  template <int N>
  Vector<N> noise(Eigen::Index n, double beta) {
    const double scale = 1.0 / std::sqrt(beta);
    Vector<N> xi(n);
    for (Eigen::Index i = 0; i < n; ++i) xi(i) = scale * normal();
    return xi;
  }

  Philox4x32& engine() { return engine_; }

 private:
  Philox4x32 engine_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

}  // namespace metrodiff
