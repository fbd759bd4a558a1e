#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "radar_odom/se2.hpp"
#include "radar_odom/surface_model.hpp"

namespace radar_odom {

enum class Metric { kPointToLine, kPointToPoint };

std::string_view to_string(Metric metric);
/// Accepts "p2l" / "p2p" (case-insensitive); throws InvalidConfig otherwise.
Metric parse_metric(std::string_view text);

struct Correspondence {
  OrientedSurfacePoint source;
  OrientedSurfacePoint target;
};

struct RegistrationParams {
  Metric metric = Metric::kPointToLine;
  double association_radius = 3.0;
  int max_iterations = 50;
  double translation_tolerance = 1e-3;
  double rotation_tolerance = 1e-4;
  std::size_t min_correspondences = 10;
  /// Huber threshold; infinity gives plain squared loss.
  double huber_delta = 0.1;

  void validate() const;
};

struct RegistrationResult {
  Pose2d pose;
  bool converged = false;
  int iterations = 0;
  double final_cost = 0.0;
  std::size_t num_correspondences = 0;
};

struct StepResult {
  Pose2d delta;
  double predicted_cost_drop = 0.0;
};

/// Huber loss on the scale of a squared residual: s^2 inside the core,
/// 2*delta*|s| - delta^2 outside.
double huber_loss(double residual, double delta);

/// For each source point mapped by x, the nearest target point within radius.
std::vector<Correspondence> associate(const SurfacePointSet& source, const SurfacePointSet& target, const Pose2d& x,
                                      double radius);

/// Residual of one pair at x and its Jacobian with respect to (x, y, theta).
/// Point-to-line has one row; point-to-point has two.
struct PairResidual {
  Eigen::Vector2d value = Eigen::Vector2d::Zero();
  Eigen::Matrix<double, 2, 3> jacobian = Eigen::Matrix<double, 2, 3>::Zero();
  int rows = 1;
};
PairResidual residual(const Correspondence& pair, const Pose2d& x, Metric metric);

/// Scalar entering the robust loss: the signed line distance for
/// point-to-line, the Euclidean distance for point-to-point.
double residual_magnitude(const Correspondence& pair, const Pose2d& x, Metric metric);

double cost(std::span<const Correspondence> pairs, const Pose2d& x, Metric metric, double huber_delta);

/// One iteratively-reweighted Gauss-Newton step. The returned delta is added
/// component-wise to x. Throws SingularNormalEquations.
StepResult solve_step(std::span<const Correspondence> pairs, const Pose2d& x, Metric metric,
                      double huber_delta = std::numeric_limits<double>::infinity());

/// Alternates association and Gauss-Newton steps from x0. The result maps
/// source-frame points into the target frame. Throws TooFewCorrespondences.
RegistrationResult register_scans(const SurfacePointSet& source, const SurfacePointSet& target, const Pose2d& x0,
                                  const RegistrationParams& params);

}  // namespace radar_odom
