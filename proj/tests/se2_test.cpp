#include "radar_odom/se2.hpp"

#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace radar_odom {
namespace {

using testing::homogeneous;

constexpr double kPi = std::numbers::pi;

TEST(NormalizeAngle, WrapsIntoHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(normalize_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(normalize_angle(-kPi), kPi);
  EXPECT_NEAR(normalize_angle(3.0 * kPi), kPi, 1e-12);
  EXPECT_NEAR(normalize_angle(0.5 + 4.0 * kPi), 0.5, 1e-12);
  EXPECT_NEAR(normalize_angle(-0.5 - 2.0 * kPi), -0.5, 1e-12);
}

TEST(NormalizeAngle, PropertyRangeAndEquivalence) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> any(-100.0, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = any(rng);
    const double w = normalize_angle(a);
    EXPECT_GT(w, -kPi);
    EXPECT_LE(w, kPi);
    EXPECT_NEAR(std::cos(w), std::cos(a), 1e-9);
    EXPECT_NEAR(std::sin(w), std::sin(a), 1e-9);
  }
}

TEST(Pose2, ComposeMatchesHomogeneousProduct) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5.0, 5.0), ang(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    const Pose2d a{u(rng), u(rng), ang(rng)}, b{u(rng), u(rng), ang(rng)};
    const Eigen::Matrix3d expected = homogeneous(a.x, a.y, a.theta) * homogeneous(b.x, b.y, b.theta);
    EXPECT_TRUE(compose(a, b).matrix().isApprox(expected, 1e-12));
    EXPECT_TRUE((a * b).matrix().isApprox(expected, 1e-12));
  }
}

TEST(Pose2, InverseMatchesMatrixInverse) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-5.0, 5.0), ang(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    const Pose2d p{u(rng), u(rng), ang(rng)};
    EXPECT_TRUE(inverse(p).matrix().isApprox(homogeneous(p.x, p.y, p.theta).inverse(), 1e-12));
    const Pose2d id = compose(p, inverse(p));
    EXPECT_NEAR(id.x, 0.0, 1e-12);
    EXPECT_NEAR(id.y, 0.0, 1e-12);
    EXPECT_NEAR(id.theta, 0.0, 1e-12);
  }
}

TEST(Pose2, TransformPointMatchesMatrix) {
  const Pose2d p{1.0, 2.0, kPi / 2};
  const Vec2d q = transform_point(p, Vec2d(1.0, 0.0));
  EXPECT_NEAR(q.x(), 1.0, 1e-12);
  EXPECT_NEAR(q.y(), 3.0, 1e-12);
}

TEST(Pose2, ComposeIsAssociative) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-5.0, 5.0), ang(-kPi, kPi);
  for (int i = 0; i < 100; ++i) {
    const Pose2d a{u(rng), u(rng), ang(rng)}, b{u(rng), u(rng), ang(rng)}, c{u(rng), u(rng), ang(rng)};
    EXPECT_TRUE(((a * b) * c).matrix().isApprox((a * (b * c)).matrix(), 1e-12));
  }
}

TEST(Pose2, WorksWithFloatScalar) {
  const Pose2<float> a{1.0f, 0.0f, 0.5f};
  const Pose2<float> b = inverse(a) * a;
  EXPECT_NEAR(b.x, 0.0f, 1e-6f);
  EXPECT_NEAR(b.theta, 0.0f, 1e-6f);
}

TEST(Twist2, ScaleIsLinear) {
  const Pose2d p = scale(Twist2d{2.0, -1.0, 0.4}, 0.25);
  EXPECT_DOUBLE_EQ(p.x, 0.5);
  EXPECT_DOUBLE_EQ(p.y, -0.25);
  EXPECT_DOUBLE_EQ(p.theta, 0.1);
}

// Roots of the characteristic polynomial l^2 - tr l + det.
double min_root(const SymMat2d& m) {
  const double tr = m.trace(), det = m.a11 * m.a22 - m.a12 * m.a12;
  return 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
}

TEST(EigenMin, MatchesCharacteristicPolynomial) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const SymMat2d m{u(rng), u(rng), u(rng)};
    const MinEigen<double> e = eigen_min(m);
    EXPECT_NEAR(e.value, min_root(m), 1e-9);
    EXPECT_NEAR(e.vector.norm(), 1.0, 1e-12);
    EXPECT_TRUE((m.dense() * e.vector).isApprox(e.value * e.vector, 1e-9) || std::abs(e.value) < 1e-9);
  }
}

TEST(EigenMin, DiagonalAndIsotropicCases) {
  const MinEigen<double> e = eigen_min(SymMat2d{4.0, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(e.value, 1.0);
  EXPECT_DOUBLE_EQ(e.max_value, 4.0);
  EXPECT_NEAR(std::abs(e.vector.y()), 1.0, 1e-15);
  EXPECT_FALSE(e.degenerate);

  EXPECT_TRUE(eigen_min(SymMat2d{1.0, 0.0, 1.0}).degenerate);
  EXPECT_TRUE(eigen_min(SymMat2d{1.0, 0.0, 0.95}).degenerate);
  EXPECT_TRUE(eigen_min(SymMat2d{}).degenerate);
}

TEST(SymMat2, DenseRoundTrip) {
  const SymMat2d m{1.0, 2.0, 3.0};
  const SymMat2d back = SymMat2d::from_dense(m.dense());
  EXPECT_EQ(back.a11, 1.0);
  EXPECT_EQ(back.a12, 2.0);
  EXPECT_EQ(back.a22, 3.0);
}

}  // namespace
}  // namespace radar_odom
