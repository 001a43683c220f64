#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "metrodiff/random.hpp"

using namespace metrodiff;

// Known-answer vectors for Philox4x32-10 published with the Random123 library.
TEST(Philox, KnownAnswerVectors) {
  using B = Philox4x32::Block;
  using K = Philox4x32::Key;
  EXPECT_EQ(Philox4x32::bijection(B{0, 0, 0, 0}, K{0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::bijection(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::bijection(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
  Philox4x32 a(42, 3);
  Philox4x32 b(42, 3);
  Philox4x32 c(42, 4);
  Philox4x32 d(43, 3);
  int same_c = 0;
  int same_d = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    same_c += x == c();
    same_d += x == d();
  }
  EXPECT_EQ(same_c, 0);
  EXPECT_EQ(same_d, 0);
}

TEST(Philox, OutputPacksCounterBlocks) {
  Philox4x32 g(5, 9);
  const auto blk = Philox4x32::bijection({0, 0, 9, 0}, {5, 0});
  EXPECT_EQ(g(), (static_cast<std::uint64_t>(blk[1]) << 32) | blk[0]);
  EXPECT_EQ(g(), (static_cast<std::uint64_t>(blk[3]) << 32) | blk[2]);
  const auto blk2 = Philox4x32::bijection({1, 0, 9, 0}, {5, 0});
  EXPECT_EQ(g(), (static_cast<std::uint64_t>(blk2[1]) << 32) | blk2[0]);
}

TEST(Rng, NoiseCovarianceIsInverseBeta) {
  Rng rng(1, 0);
  const double beta = 4.0;
  const int n = 200000;
  double s00 = 0, s11 = 0, s01 = 0, m0 = 0;
  for (int i = 0; i < n; ++i) {
    const auto xi = rng.noise<2>(2, beta);
    s00 += xi(0) * xi(0);
    s11 += xi(1) * xi(1);
    s01 += xi(0) * xi(1);
    m0 += xi(0);
  }
  // Standard errors: var(xi^2) = 2/beta^2 -> se ~ 0.0008; mean se ~ 0.0011.
  EXPECT_NEAR(s00 / n, 0.25, 0.004);
  EXPECT_NEAR(s11 / n, 0.25, 0.004);
  EXPECT_NEAR(s01 / n, 0.0, 0.004);
  EXPECT_NEAR(m0 / n, 0.0, 0.006);
}

TEST(Rng, UniformIsInUnitInterval) {
  Rng rng(2, 0);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}
