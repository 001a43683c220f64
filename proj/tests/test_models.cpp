#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "metrodiff/linalg.hpp"
#include "metrodiff/models/chain1d.hpp"
#include "metrodiff/models/double_well.hpp"
#include "metrodiff/models/heavy_tail.hpp"
#include "metrodiff/models/reference.hpp"
#include "metrodiff/models/rpy_chain.hpp"
#include "metrodiff/models/tilted_well.hpp"
#include "metrodiff/random.hpp"
#include "metrodiff/verify.hpp"

using namespace metrodiff;

static_assert(DiffusionModel<HeavyTail>);
static_assert(DiffusionModel<TiltedWell>);
static_assert(DiffusionModel<Chain1d<>>);
static_assert(DiffusionModel<Chain1d<8>>);
static_assert(DiffusionModel<RpyChain>);
static_assert(DiffusionModel<DoubleWell2d>);
static_assert(DiffusionModel<Quadratic<3>>);
static_assert(DiffusionModel<QuarticWell>);

namespace {

template <class M>
void expect_gradient_matches_fd(const M& m, const typename M::Point& x, double rel_tol = 1e-5) {
  const auto g = m.grad_energy(x);
  typename M::Point fd(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = 1e-6 * std::max(1.0, std::abs(x(i)));
    auto xp = x;
    auto xm = x;
    xp(i) += step;
    xm(i) -= step;
    fd(i) = (m.energy(xp) - m.energy(xm)) / (2 * step);
  }
  const double scale = std::max(g.norm(), 1e-300);
  EXPECT_LE((g - fd).norm(), rel_tol * scale + 1e-9 * std::abs(m.energy(x)))
      << "at x = " << x.transpose();
}

template <class M>
void expect_extension(const M& m, const typename M::Point& outside) {
  ASSERT_FALSE(m.in_domain(outside));
  EXPECT_EQ(m.energy(outside), kInfiniteEnergy);
  EXPECT_TRUE(m.grad_energy(outside).isZero(0.0));
  EXPECT_TRUE(m.mobility(outside).isIdentity(0.0));
  const auto e = m.evaluate(outside);
  EXPECT_FALSE(e.inside);
  EXPECT_TRUE(e.grad.isZero(0.0));
}

}  // namespace

// --- heavy tail ------------------------------------------------------------

TEST(HeavyTail, EnergyAndGradientExamples) {
  const HeavyTail half({0.5});
  EXPECT_EQ(half.energy(Vector<1>(1.0)), 0.0);
  EXPECT_EQ(half.energy(Vector<1>(0.5)), kInfiniteEnergy);
  const HeavyTail m({1.5});
  EXPECT_DOUBLE_EQ(m.grad_energy(Vector<1>(2.0))(0), 0.75);
  EXPECT_TRUE(m.in_domain(Vector<1>(1.0)));
  expect_extension(m, Vector<1>(0.999));
  expect_extension(m, Vector<1>(std::nan("")));
}

TEST(HeavyTail, NormalizationAndCdf) {
  const HeavyTail m({1.5});
  EXPECT_DOUBLE_EQ(m.normalization(), 2.0);
  EXPECT_DOUBLE_EQ(m.stationary_cdf(4.0), 0.5);
  EXPECT_EQ(m.stationary_cdf(0.5), 0.0);
  EXPECT_THROW((void)HeavyTail({0.5}).normalization(), std::domain_error);
  EXPECT_THROW(HeavyTail({-1.0}), std::invalid_argument);
}

TEST(HeavyTail, GradientMatchesFiniteDifferences) {
  const HeavyTail m({1.5});
  Rng rng(1, 0);
  for (int i = 0; i < 100; ++i) expect_gradient_matches_fd(m, Vector<1>(1.01 + 20 * rng.uniform()));
}

// --- tilted well -----------------------------------------------------------

TEST(TiltedWell, SaturatedValues) {
  const TiltedWellParams p{0.0, 0.001, 1.0, 3.0};
  EXPECT_NEAR(tilted_well_energy(1.5, p), -2.0, 1e-12);
  EXPECT_NEAR(tilted_well_energy(0.5, p), 0.0, 1e-12);
  EXPECT_NEAR(tilted_well_energy(-1.5, p), -2.0, 1e-12);
}

TEST(TiltedWell, UntiltedPartIsPeriodic) {
  const TiltedWellParams p;
  Rng rng(2, 0);
  for (int i = 0; i < 100; ++i) {
    const double x = 20 * rng.uniform() - 10;
    EXPECT_NEAR(square_well_energy(x, p), square_well_energy(x + 3, p), 1e-12);
  }
  EXPECT_NEAR(tilted_well_energy(4.0, p) - tilted_well_energy(1.0, p), -3 * p.force, 1e-12);
}

TEST(TiltedWell, WrapHandlesNegatives) {
  EXPECT_DOUBLE_EQ(wrap_periodic(7.2, 3.0), 7.2 - 6.0);
  EXPECT_DOUBLE_EQ(wrap_periodic(-0.5, 3.0), 2.5);
  EXPECT_DOUBLE_EQ(wrap_periodic(-3.0, 3.0), 0.0);
  const double m = wrap_periodic(-1e-18, 3.0);
  EXPECT_GE(m, 0.0);
  EXPECT_LT(m, 3.0);
}

TEST(TiltedWell, GradientMatchesFiniteDifferences) {
  // epsilon widened so that central differences resolve the jumps.
  const TiltedWell m({0.25, 0.05, 1.0, 3.0});
  Rng rng(3, 0);
  for (int i = 0; i < 100; ++i) expect_gradient_matches_fd(m, Vector<1>(12 * rng.uniform() - 6));
  const TiltedWell sharp;
  EXPECT_NEAR(sharp.grad_energy(Vector<1>(0.5))(0), -0.25, 1e-12);
  EXPECT_NEAR(sharp.grad_energy(Vector<1>(1.0))(0), -1000.0 - 0.25, 1e-9);
}

// --- 1D chain --------------------------------------------------------------

TEST(Chain1d, FeneExamples) {
  const Chain1dParams p;
  EXPECT_NEAR(fene_energy(p.ell, p), 0.5 * std::log(2.0), 1e-15);
  EXPECT_EQ(fene_energy(0.0, p), kInfiniteEnergy);
  EXPECT_EQ(fene_energy(2 * p.ell, p), kInfiniteEnergy);
  EXPECT_GT(fene_energy(1e-12, p), 10.0);
  EXPECT_EQ(fene_derivative(p.ell, p), 0.0);
  const double r = 0.7 * p.ell;
  EXPECT_NEAR(fene_derivative(r, p), (fene_energy(r + 1e-7, p) - fene_energy(r - 1e-7, p)) / 2e-7, 1e-6);
}

TEST(Chain1d, FrictionMatrixExamples) {
  Chain1dParams p;
  p.n_beads = 1;
  EXPECT_EQ(friction_matrix(Vector<1>(0.5), p)(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(chain1d_mobility(Vector<1>(0.5), p)(0, 0), 0.25);

  p.n_beads = 2;
  const auto g = friction_matrix(Vector<2>(1.0 / 3, 2.0 / 3), p);
  EXPECT_NEAR(g(0, 0), 6.0, 1e-12);
  EXPECT_NEAR(g(1, 1), 6.0, 1e-12);
  EXPECT_NEAR(g(0, 1), -3.0, 1e-12);
  Matrix<2> expected;
  expected << 6, 3, 3, 6;
  EXPECT_LE((chain1d_mobility(Vector<2>(1.0 / 3, 2.0 / 3), p) - expected / 27).norm(), 1e-12);
  EXPECT_THROW((void)friction_matrix(Vector<2>(0.6, 0.4), p), OutOfDomainError);
}

TEST(Chain1d, OneBeadMobilityAtMidpoint) {
  Chain1dParams p;
  p.n_beads = 1;
  p.ell = 0.5;
  const Chain1d<1> m(p);
  EXPECT_DOUBLE_EQ(m.mobility(Vector<1>(0.5))(0, 0), 0.25);
}

TEST(Chain1d, DomainAndEnergy) {
  const Chain1d<> m;
  const auto x0 = m.default_initial();
  EXPECT_TRUE(m.in_domain(x0));
  EXPECT_NEAR(x0.mean(), 0.45125, 1e-15);
  auto swapped = x0;
  std::swap(swapped(2), swapped(3));
  expect_extension(m, swapped);
  // Springs whose rest length tiles [0, L] exactly: 9 ell = L.
  Chain1dParams p;
  p.ell = 1.0 / 9.0;
  const Chain1d<> tiled(p);
  auto stretched = x0;
  stretched(0) = 0.25;  // ghost gap 0.25 > 2 ell
  stretched(1) = 0.26;
  EXPECT_TRUE(m.in_domain(stretched));
  EXPECT_FALSE(tiled.in_domain(stretched));

  Vector<Eigen::Dynamic> rest(8);
  for (int i = 0; i < 8; ++i) rest(i) = (i + 1) * p.ell;
  EXPECT_NEAR(tiled.energy(rest), 9 * 0.5 * std::log(2.0), 1e-12);
  EXPECT_LE(tiled.grad_energy(rest).norm(), 1e-12);
  // Equal gaps are a critical point for any rest length.
  EXPECT_LE(m.grad_energy(rest).norm(), 1e-12);
  double sum = 0;
  for (double t : chain1d_equilibrium_ticks()) sum += t;
  EXPECT_NEAR(sum / 8, 0.49875, 1e-15);
}

namespace {

long double chain1d_energy_long(const Vector<Eigen::Dynamic>& q) {
  long double u = 0;
  for (Eigen::Index k = 0; k <= q.size(); ++k) {
    const long double left = k == 0 ? 0.0L : q(k - 1);
    const long double right = k == q.size() ? 1.0L : q(k);
    const long double s = (right - left) / 2.0L;
    u += -0.5L * std::log(1.0L - s * s - (1.0L - s) * (1.0L - s));
  }
  return u;
}

}  // namespace

TEST(Chain1d, EnergyDifferenceMatchesExtendedPrecision) {
  const Chain1d<> m;
  const auto q0 = m.default_initial();
  Rng rng(12, 0);
  for (double scale : {2e-3, 1e-6, 1e-9}) {
    for (int trial = 0; trial < 20; ++trial) {
      Vector<Eigen::Dynamic> q1 = q0;
      for (Eigen::Index i = 0; i < q1.size(); ++i) q1(i) += scale * rng.normal();
      ASSERT_TRUE(m.in_domain(q1));
      const long double exact = chain1d_energy_long(q1) - chain1d_energy_long(q0);
      const double du = m.energy_difference_inside(q0, q1);
      EXPECT_NEAR(du, static_cast<double>(exact), 1e-17 + 1e-13 * std::abs(static_cast<double>(exact)))
          << "scale " << scale;
    }
  }
}

TEST(Chain1d, MobilityInvertsFrictionAtRandomConfigs) {
  const Chain1d<> m;
  Rng rng(4, 0);
  int tested = 0;
  while (tested < 100) {
    Vector<Eigen::Dynamic> q(8);
    double pos = 0;
    for (int i = 0; i < 8; ++i) {
      pos += 0.3 / 9 + rng.uniform() * (2.0 / 9 - 0.6 / 9);
      q(i) = pos;
    }
    if (!m.in_domain(q)) continue;
    ++tested;
    const auto gamma = friction_matrix(q, m.params());
    EXPECT_LE((m.mobility(q) * gamma - Matrix<Eigen::Dynamic>::Identity(8, 8)).norm(), 1e-10);
    EXPECT_TRUE(try_cholesky(m.mobility(q)).has_value());
    expect_gradient_matches_fd(m, q);
  }
}

// --- RPY chain -------------------------------------------------------------

TEST(RpyChain, BranchContinuityAndLimits) {
  const double r = 0.077;
  const auto near = rpy_near_coefficients(2 * r, r);
  const auto far = rpy_far_coefficients(2 * r, r);
  EXPECT_EQ(near.first, 7.0 / 16);
  EXPECT_EQ(near.second, 3.0 / 16);
  EXPECT_EQ(far.first, 7.0 / 16);
  EXPECT_EQ(far.second, 3.0 / 16);
  const auto zero = rpy_near_coefficients(0.0, r);
  EXPECT_EQ(zero.first, 1.0);
  EXPECT_EQ(zero.second, 0.0);
}

TEST(RpyChain, BlockAlongAxis) {
  const RpyChainParams p;
  const auto b = rpy_block(Vector<3>(4 * p.bead_radius, 0, 0), p);
  const double c1 = 3.0 / 16 + 1.0 / 128;
  const double c2 = 3.0 / 16 - 3.0 / 128;
  Matrix<3> expected = Matrix<3>::Zero();
  expected.diagonal() << c1 + c2, c1, c1;
  EXPECT_LE((b * p.zeta() - expected).norm(), 1e-15);
  EXPECT_THROW((void)rpy_block(Vector<3>::Zero(), p), ZeroSeparationError);
}

TEST(RpyChain, FarFieldLimit) {
  const RpyChainParams p;
  const Vector<3> q(300.0, 400.0, 0.0);
  const double r = q.norm();
  const Vector<3> u = q / r;
  const Matrix<3> leading = 0.75 * p.bead_radius / r * (Matrix<3>::Identity() + u * u.transpose()) / p.zeta();
  EXPECT_LE((rpy_block(q, p) - leading).norm(), 1e-6 * leading.norm());
}

TEST(RpyChain, WlcExamples) {
  const RpyChainParams p;
  const double kt = p.thermal_energy;
  EXPECT_DOUBLE_EQ(wlc_energy(0.0, p), kt * p.max_spring / (2 * p.kuhn));
  EXPECT_EQ(wlc_derivative(0.0, p), 0.0);
  EXPECT_EQ(wlc_energy(p.max_spring, p), kInfiniteEnergy);
  const double d = 1e-4;
  // U'(0) = 0, so 2 (U(d) - U(0)) / d^2 approaches U''(0).
  const double second = 2 * (wlc_energy(d, p) - wlc_energy(0.0, p)) / (d * d);
  EXPECT_NEAR(second, p.hookean_stiffness(), 1e-3 * p.hookean_stiffness());
  EXPECT_DOUBLE_EQ(p.hookean_stiffness(), 3 * kt / (p.kuhn * p.max_spring));
}

TEST(RpyChain, MobilityIsSymmetricSpdAndDivergenceFree) {
  const RpyChainParams p;
  Rng rng(5, 0);
  const auto check = check_rpy_properties(p, 100, 1e-6, rng);
  EXPECT_EQ(check.spd_failures, 0);
  EXPECT_LE(check.worst_divergence_ratio, 1e-6);
  const auto x = random_rpy_configuration(p, rng);
  const auto m = rpy_mobility(x, p);
  EXPECT_TRUE(m.isApprox(m.transpose(), 0.0));
}

TEST(RpyChain, DomainGradientAndInitialState) {
  const RpyChain m;
  const auto x0 = m.straight_chain(1.5);
  EXPECT_TRUE(m.in_domain(x0));
  auto broken = x0;
  broken(3) = 2.1;  // bond of exactly ell
  expect_extension(m, broken);
  Rng rng(6, 0);
  for (int i = 0; i < 100; ++i) {
    const auto x = random_rpy_configuration(m.params(), rng);
    expect_gradient_matches_fd(m, x);
  }
  RpyChainParams hp;
  hp.spring = SpringKind::hookean;
  const RpyChain hook(hp);
  EXPECT_TRUE(hook.in_domain(broken));
  expect_gradient_matches_fd(hook, broken);
}

// --- 2D double well --------------------------------------------------------

TEST(DoubleWell2d, MinimaAndMobility) {
  const DoubleWell2d m;
  EXPECT_TRUE(m.grad_energy(Vector<2>(2, 1)).isZero(0.0));
  EXPECT_TRUE(m.grad_energy(Vector<2>(-2, -1)).isZero(0.0));
  EXPECT_EQ(m.energy(Vector<2>(2, 1)), 0.0);
  EXPECT_TRUE(m.mobility(Vector<2>(3, -4)).isIdentity(0.0));
  const DoubleWell2d radial({MobilityKind::radial});
  EXPECT_TRUE(radial.mobility(Vector<2>(0, 0)).isIdentity(0.0));
  EXPECT_EQ(radial.mobility(Vector<2>(1, 2))(0, 0), 6.0);
  Rng rng(7, 0);
  for (int i = 0; i < 100; ++i) {
    const Vector<2> x(4 * rng.normal(), 2 * rng.normal());
    expect_gradient_matches_fd(m, x);
    EXPECT_TRUE(try_cholesky(radial.mobility(x)).has_value());
  }
}

// --- reference models ------------------------------------------------------

TEST(ReferenceModels, QuadraticAndQuartic) {
  const Quadratic<1> ou;
  EXPECT_EQ(ou.energy(Vector<1>(2.0)), 2.0);
  EXPECT_EQ(ou.grad_energy(Vector<1>(2.0))(0), 2.0);
  const QuarticWell q;
  EXPECT_EQ(q.energy(Vector<1>(1.0)), 0.0);
  Rng rng(8, 0);
  for (int i = 0; i < 100; ++i) {
    expect_gradient_matches_fd(q, Vector<1>(3 * rng.normal()));
    expect_gradient_matches_fd(QuadraticVariableMobility{}, Vector<1>(3 * rng.normal()));
  }
  Matrix<2> bad;
  bad << 1, 2, 2, 1;
  EXPECT_THROW(Quadratic<2>(Matrix<2>::Identity(), bad), NotSpdError);
}
