#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "metrodiff/linalg.hpp"
#include "metrodiff/random.hpp"

using namespace metrodiff;

namespace {

Matrix<Eigen::Dynamic> random_spd(int n, Rng& rng) {
  Matrix<Eigen::Dynamic> a(n, n);
  for (int i = 0; i < n * n; ++i) a(i) = rng.normal();
  return a * a.transpose() + n * Matrix<Eigen::Dynamic>::Identity(n, n);
}

Vector<Eigen::Dynamic> random_vector(int n, Rng& rng) {
  Vector<Eigen::Dynamic> v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

// Determinant by cofactor expansion along the first row.
double cofactor_det(const Matrix<Eigen::Dynamic>& m) {
  const auto n = m.rows();
  if (n == 1) return m(0, 0);
  double det = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Matrix<Eigen::Dynamic> minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      for (Eigen::Index c = 0, k = 0; c < n; ++c) {
        if (c != j) minor(r - 1, k++) = m(r, c);
      }
    }
    det += (j % 2 == 0 ? 1.0 : -1.0) * m(0, j) * cofactor_det(minor);
  }
  return det;
}

}  // namespace

TEST(Cholesky, IdentityHasUnitFactor) {
  const auto f = cholesky(Matrix<3>(Matrix<3>::Identity()));
  EXPECT_TRUE(f.lower.isIdentity(0.0));
  EXPECT_EQ(f.log_det, 0.0);
  EXPECT_EQ(f.dim(), 3);
}

TEST(Cholesky, HandComputedTwoByTwo) {
  Matrix<2> m;
  m << 4, 2, 2, 3;
  const auto f = cholesky(m);
  EXPECT_DOUBLE_EQ(f.lower(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(f.lower(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(f.lower(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(f.lower(1, 1), std::sqrt(2.0));
  EXPECT_NEAR(f.log_det, std::log(2.0 * std::sqrt(2.0)), 1e-15);
}

TEST(Cholesky, IndefiniteMatrixIsRejected) {
  Matrix<2> m;
  m << 1, 2, 2, 1;
  EXPECT_THROW((void)cholesky(m), NotSpdError);
  EXPECT_FALSE(try_cholesky(m).has_value());
}

TEST(Cholesky, AsymmetryAboveToleranceIsRejected) {
  Matrix<2> m;
  m << 2, 1, 1 + 1e-9, 2;
  EXPECT_THROW((void)cholesky(m), NotSpdError);
}

TEST(Cholesky, TinyAsymmetryIsAveraged) {
  Matrix<2> m;
  m << 2, 1, 1 + 1e-14, 2;
  const auto f = cholesky(m);
  EXPECT_NEAR(f.lower(1, 0), (1 + 0.5e-14) / std::sqrt(2.0), 1e-15);
}

TEST(Cholesky, NonFiniteEntryIsRejected) {
  Matrix<2> m;
  m << 1, 0, 0, std::nan("");
  EXPECT_THROW((void)cholesky(m), NotSpdError);
}

TEST(Cholesky, ReconstructsRandomSpdMatrices) {
  Rng rng(11, 0);
  for (int n = 1; n <= 33; n += 4) {
    const auto m = random_spd(n, rng);
    const auto f = cholesky(m);
    EXPECT_LE((f.lower * f.lower.transpose() - m).norm(), 1e-10 * m.norm()) << "n=" << n;
    EXPECT_TRUE(f.lower.isLowerTriangular(0.0));
    EXPECT_GT(f.lower.diagonal().minCoeff(), 0.0);
  }
}

TEST(Cholesky, LogDetMatchesCofactorExpansion) {
  Rng rng(12, 0);
  for (int n = 1; n <= 4; ++n) {
    const auto m = random_spd(n, rng);
    const auto f = cholesky(m);
    EXPECT_NEAR(std::exp(2.0 * f.log_det), cofactor_det(m), 1e-10 * cofactor_det(m));
  }
}

TEST(Solve, IdentityFactor) {
  const auto f = cholesky(Matrix<2>(Matrix<2>::Identity()));
  const auto y = solve(f, Vector<2>(1, 2));
  EXPECT_EQ(y, Vector<2>(1, 2));
}

TEST(Solve, HandForwardSubstitution) {
  Matrix<2> m;
  m << 4, 2, 2, 3;
  const auto f = cholesky(m);
  const auto y = solve(f, Vector<2>(2, 1 + std::sqrt(2.0)));
  EXPECT_NEAR(y(0), 1.0, 1e-15);
  EXPECT_NEAR(y(1), 1.0, 1e-15);
}

TEST(Solve, DiagonalFactor) {
  Matrix<2> m = Matrix<2>::Zero();
  m(0, 0) = 4;
  m(1, 1) = 16;
  const auto y = solve(cholesky(m), Vector<2>(2, 4));
  EXPECT_EQ(y, Vector<2>(1, 1));
}

TEST(Solve, DimensionMismatchThrows) {
  const auto f = cholesky(Matrix<Eigen::Dynamic>(Matrix<Eigen::Dynamic>::Identity(3, 3)));
  EXPECT_THROW((void)solve(f, Vector<Eigen::Dynamic>(Vector<Eigen::Dynamic>::Ones(2))), std::invalid_argument);
  EXPECT_THROW((void)full_solve(f, Vector<Eigen::Dynamic>(Vector<Eigen::Dynamic>::Ones(4))), std::invalid_argument);
}

TEST(Solve, RoundTripsRandomSystems) {
  Rng rng(13, 0);
  for (int n = 1; n <= 33; n += 2) {
    const auto m = random_spd(n, rng);
    const auto f = cholesky(m);
    const auto rhs = random_vector(n, rng);
    EXPECT_LE((f.lower * solve(f, rhs) - rhs).norm(), 1e-10 * rhs.norm());
    EXPECT_LE((f.lower.transpose() * solve_transpose(f, rhs) - rhs).norm(), 1e-10 * rhs.norm());
    EXPECT_LE((m * full_solve(f, rhs) - rhs).norm(), 1e-10 * rhs.norm());
  }
}

TEST(FullSolve, IdentityAndMatrixColumn) {
  const auto fi = cholesky(Matrix<2>(Matrix<2>::Identity()));
  EXPECT_EQ(full_solve(fi, Vector<2>(3, -1)), Vector<2>(3, -1));
  Matrix<2> m;
  m << 4, 2, 2, 3;
  const auto x = full_solve(cholesky(m), Vector<2>(4, 2));
  EXPECT_NEAR(x(0), 1.0, 1e-14);
  EXPECT_NEAR(x(1), 0.0, 1e-14);
}

TEST(Inverse, IsSymmetricInverse) {
  Rng rng(14, 0);
  const auto m = random_spd(6, rng);
  const auto inv = inverse(cholesky(m));
  EXPECT_TRUE(inv.isApprox(inv.transpose(), 0.0));
  EXPECT_LE((inv * m - Matrix<Eigen::Dynamic>::Identity(6, 6)).norm(), 1e-10);
}

TEST(NumericDivergence, ConstantFieldHasZeroDivergence) {
  auto field = [](const Vector<2>&) { return Matrix<2>(Matrix<2>::Identity() * 3.0); };
  EXPECT_EQ(numeric_divergence(field, Vector<2>(0.3, -1.0), 1e-4), Vector<2>::Zero());
}

TEST(NumericDivergence, OneBeadChainMobility) {
  auto field = [](const Vector<1>& q) { return Matrix<1>(q(0) * (1.0 - q(0))); };
  const auto d = numeric_divergence(field, Vector<1>(0.3), 1e-4);
  EXPECT_NEAR(d(0), 0.4, 1e-8);
}

TEST(NumericDivergence, SumsColumnDerivatives) {
  // M = [[x0 x1, x0], [x0, x1^2]]: div = (x1 + 0, 1 + 2 x1).
  auto field = [](const Vector<2>& x) {
    Matrix<2> m;
    m << x(0) * x(1), x(0), x(0), x(1) * x(1);
    return m;
  };
  const auto d = numeric_divergence(field, Vector<2>(0.7, 1.3), 1e-5);
  EXPECT_NEAR(d(0), 1.3, 1e-8);
  EXPECT_NEAR(d(1), 3.6, 1e-8);
}

TEST(NumericDivergence, RejectsBadStepAndNonFiniteField) {
  auto field = [](const Vector<1>& q) { return Matrix<1>(q(0) > 0.5 ? std::nan("") : 1.0); };
  EXPECT_THROW((void)numeric_divergence(field, Vector<1>(0.2), 0.0), std::invalid_argument);
  EXPECT_THROW((void)numeric_divergence(field, Vector<1>(0.5), 0.1), std::domain_error);
}

TEST(NumericDivergence, DefaultStepScalesWithNorm) {
  EXPECT_DOUBLE_EQ(default_divergence_step(0.0), 1e-5);
  EXPECT_DOUBLE_EQ(default_divergence_step(9.0), 1e-4);
}
