#include "radar_odom/registration.hpp"

#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "radar_odom/errors.hpp"
#include "test_support.hpp"

namespace radar_odom {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Correspondence make_pair(Vec2d s, Vec2d t, Vec2d n) {
  return {{.mean = s, .normal = n.normalized()}, {.mean = t, .normal = n.normalized()}};
}

TEST(HuberLoss, QuadraticCoreLinearTails) {
  EXPECT_DOUBLE_EQ(huber_loss(0.05, 0.1), 0.0025);
  EXPECT_DOUBLE_EQ(huber_loss(-0.05, 0.1), 0.0025);
  EXPECT_DOUBLE_EQ(huber_loss(1.0, 0.1), 0.19);
  EXPECT_DOUBLE_EQ(huber_loss(3.0, kInf), 9.0);
  // Continuous at the knee.
  EXPECT_NEAR(huber_loss(0.1 - 1e-12, 0.1), huber_loss(0.1 + 1e-12, 0.1), 1e-10);
}

TEST(Cost, SinglePairInsideCoreIsSquared) {
  const Correspondence pair = make_pair({1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0});
  const std::vector<Correspondence> pairs{pair};
  EXPECT_DOUBLE_EQ(cost(pairs, Pose2d{}, Metric::kPointToLine, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(cost(pairs, Pose2d{}, Metric::kPointToPoint, kInf), 1.0);
}

TEST(Residual, PointToLineIgnoresTangentialOffset) {
  const Correspondence pair = make_pair({3.0, 5.0}, {0.0, 5.0}, {0.0, -1.0});
  EXPECT_NEAR(residual_magnitude(pair, Pose2d{}, Metric::kPointToLine), 0.0, 1e-15);
  EXPECT_NEAR(residual_magnitude(pair, Pose2d{}, Metric::kPointToPoint), 3.0, 1e-15);
}

TEST(Residual, JacobianMatchesCentralDifferences) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-10.0, 10.0), a(-std::numbers::pi, std::numbers::pi);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const Correspondence pair = make_pair({u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)});
    const Pose2d x{u(rng), u(rng), a(rng)};
    for (Metric metric : {Metric::kPointToLine, Metric::kPointToPoint}) {
      const PairResidual r = residual(pair, x, metric);
      for (int c = 0; c < 3; ++c) {
        Eigen::Vector3d step = Eigen::Vector3d::Zero();
        step(c) = h;
        const Pose2d plus{x.x + step(0), x.y + step(1), x.theta + step(2)};
        const Pose2d minus{x.x - step(0), x.y - step(1), x.theta - step(2)};
        const Eigen::Vector2d fd = (residual(pair, plus, metric).value - residual(pair, minus, metric).value) / (2 * h);
        for (int row = 0; row < r.rows; ++row) {
          const double scale = std::max(1.0, std::abs(r.jacobian(row, c)));
          EXPECT_LT(std::abs(fd(row) - r.jacobian(row, c)) / scale, 1e-5);
        }
      }
    }
  }
}

TEST(Associate, MatchesBruteForceNearest) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const SurfacePointSet target = testing::random_wall_set(rng, 200);
    const SurfacePointSet source = testing::random_wall_set(rng, 150);
    const Pose2d x{u(rng), u(rng), 0.1 * u(rng)};
    const auto pairs = associate(source, target, x, 2.0);
    std::size_t k = 0;
    for (const OrientedSurfacePoint& s : source.points()) {
      const auto hit = testing::nearest_oracle(target.means(), transform_point(x, s.mean), 2.0);
      if (!hit) continue;
      ASSERT_LT(k, pairs.size());
      EXPECT_EQ(pairs[k].source.mean, s.mean);
      EXPECT_EQ(pairs[k].target.mean, target.means()[*hit]);
      ++k;
    }
    EXPECT_EQ(k, pairs.size());
  }
}

TEST(SolveStep, ExactForPureTranslationPointToPoint) {
  std::vector<Correspondence> pairs;
  for (int i = 0; i < 5; ++i) pairs.push_back(make_pair({i * 1.0, i * 0.5}, {i * 1.0 + 0.3, i * 0.5 - 0.2}, {1, 0}));
  const StepResult step = solve_step(pairs, Pose2d{}, Metric::kPointToPoint);
  // Rotation is only approximately zero: the model is linearized about x.
  EXPECT_NEAR(step.delta.x, 0.3, 1e-9);
  EXPECT_NEAR(step.delta.y, -0.2, 1e-9);
  EXPECT_NEAR(step.delta.theta, 0.0, 1e-9);
  EXPECT_GT(step.predicted_cost_drop, 0.0);
}

TEST(SolveStep, ParallelNormalsAreSingular) {
  std::vector<Correspondence> pairs;
  for (int i = 0; i < 20; ++i) pairs.push_back(make_pair({i * 1.0, 5.0}, {i * 1.0, 5.1}, {0, 1}));
  EXPECT_THROW(solve_step(pairs, Pose2d{}, Metric::kPointToLine), SingularNormalEquations);
  EXPECT_THROW(solve_step({}, Pose2d{}, Metric::kPointToLine), SingularNormalEquations);
}

TEST(RegisterScans, RecoversKnownOffset) {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(-0.4, 0.4), a(-0.06, 0.06);
  for (Metric metric : {Metric::kPointToLine, Metric::kPointToPoint}) {
    for (int trial = 0; trial < 10; ++trial) {
      const SurfacePointSet target = testing::random_wall_set(rng, 300);
      const Pose2d truth{u(rng), u(rng), a(rng)};
      const SurfacePointSet source = testing::moved_set(target, truth);
      RegistrationParams params;
      params.metric = metric;
      const RegistrationResult result = register_scans(source, target, Pose2d{}, params);
      EXPECT_NEAR(result.pose.x, truth.x, 1e-2);
      EXPECT_NEAR(result.pose.y, truth.y, 1e-2);
      EXPECT_NEAR(result.pose.theta, truth.theta, 0.1 * std::numbers::pi / 180);
      EXPECT_TRUE(result.converged);
      EXPECT_GE(result.num_correspondences, params.min_correspondences);
    }
  }
}

TEST(RegisterScans, TooFewCorrespondencesThrows) {
  std::mt19937_64 rng(61);
  const SurfacePointSet target = testing::random_wall_set(rng, 300);
  const SurfacePointSet far = testing::moved_set(target, Pose2d{500.0, 0.0, 0.0});
  try {
    register_scans(far, target, Pose2d{}, RegistrationParams{});
    FAIL() << "expected TooFewCorrespondences";
  } catch (const TooFewCorrespondences& e) {
    EXPECT_EQ(e.found(), 0u);
  }
}

TEST(RegistrationParams, Validates) {
  RegistrationParams p;
  p.huber_delta = 0.0;
  EXPECT_THROW(p.validate(), InvalidConfig);
  p = {};
  p.max_iterations = 0;
  EXPECT_THROW(p.validate(), InvalidConfig);
}

TEST(Metric, ParsesCaseInsensitively) {
  EXPECT_EQ(parse_metric("P2L"), Metric::kPointToLine);
  EXPECT_EQ(parse_metric("p2p"), Metric::kPointToPoint);
  EXPECT_EQ(to_string(Metric::kPointToPoint), "p2p");
  EXPECT_THROW(parse_metric("icp"), InvalidConfig);
}

}  // namespace
}  // namespace radar_odom
