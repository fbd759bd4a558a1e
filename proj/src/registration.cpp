#include "radar_odom/registration.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "radar_odom/errors.hpp"

namespace radar_odom {
namespace {

constexpr int kMaxHalvings = 10;
constexpr double kRankTolerance = 1e-12;

Pose2d add(const Pose2d& x, const Pose2d& delta, double scale = 1.0) {
  return {x.x + scale * delta.x, x.y + scale * delta.y, x.theta + scale * delta.theta};
}

// IRLS weight reproducing the Huber gradient: rho'(s) / (2 s).
double huber_weight(double magnitude, double delta) {
  const double a = std::abs(magnitude);
  return a <= delta ? 1.0 : delta / a;
}

}  // namespace

std::string_view to_string(Metric metric) { return metric == Metric::kPointToLine ? "p2l" : "p2p"; }

Metric parse_metric(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "p2l") return Metric::kPointToLine;
  if (lower == "p2p") return Metric::kPointToPoint;
  throw InvalidConfig("unknown metric '" + std::string(text) + "' (expected p2l or p2p)");
}

void RegistrationParams::validate() const {
  if (!(association_radius > 0.0)) throw InvalidConfig("association_radius must be > 0");
  if (max_iterations < 1) throw InvalidConfig("max_iterations must be >= 1");
  if (!(translation_tolerance > 0.0) || !(rotation_tolerance > 0.0)) throw InvalidConfig("tolerances must be > 0");
  if (!(huber_delta > 0.0)) throw InvalidConfig("huber_delta must be > 0");
}

double huber_loss(double residual, double delta) {
  const double a = std::abs(residual);
  if (a <= delta) return a * a;
  return 2.0 * delta * a - delta * delta;
}

std::vector<Correspondence> associate(const SurfacePointSet& source, const SurfacePointSet& target, const Pose2d& x,
                                      double radius) {
  std::vector<Correspondence> pairs;
  pairs.reserve(source.size());
  for (const OrientedSurfacePoint& s : source.points()) {
    const Vec2d query = transform_point(x, s.mean);
    if (const auto hit = target.nearest_within(query, radius)) pairs.push_back({s, target.points()[*hit]});
  }
  return pairs;
}

PairResidual residual(const Correspondence& pair, const Pose2d& x, Metric metric) {
  const Vec2d moved = transform_point(x, pair.source.mean);
  const Vec2d diff = moved - pair.target.mean;
  const Vec2d d_theta = rotation_derivative(x.theta) * pair.source.mean;

  PairResidual out;
  if (metric == Metric::kPointToLine) {
    const Vec2d& n = pair.target.normal;
    out.rows = 1;
    out.value(0) = n.dot(diff);
    out.jacobian.row(0) << n.x(), n.y(), n.dot(d_theta);
  } else {
    out.rows = 2;
    out.value = diff;
    out.jacobian.leftCols<2>().setIdentity();
    out.jacobian.col(2) = d_theta;
  }
  return out;
}

double residual_magnitude(const Correspondence& pair, const Pose2d& x, Metric metric) {
  const Vec2d diff = transform_point(x, pair.source.mean) - pair.target.mean;
  return metric == Metric::kPointToLine ? pair.target.normal.dot(diff) : diff.norm();
}

double cost(std::span<const Correspondence> pairs, const Pose2d& x, Metric metric, double huber_delta) {
  double total = 0.0;
  for (const Correspondence& pair : pairs) total += huber_loss(residual_magnitude(pair, x, metric), huber_delta);
  return total;
}

StepResult solve_step(std::span<const Correspondence> pairs, const Pose2d& x, Metric metric, double huber_delta) {
  Eigen::Matrix3d hessian = Eigen::Matrix3d::Zero();
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
  for (const Correspondence& pair : pairs) {
    const PairResidual r = residual(pair, x, metric);
    const double magnitude = r.rows == 1 ? r.value(0) : r.value.norm();
    const double w = huber_weight(magnitude, huber_delta);
    const auto jac = r.jacobian.topRows(r.rows);
    hessian.noalias() += w * jac.transpose() * jac;
    gradient.noalias() += w * jac.transpose() * r.value.head(r.rows);
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(hessian);
  const double max_ev = eig.eigenvalues().maxCoeff();
  if (!(max_ev > 0.0) || eig.eigenvalues().minCoeff() <= kRankTolerance * max_ev) throw SingularNormalEquations();

  const Eigen::Vector3d step = -hessian.ldlt().solve(gradient);
  StepResult out;
  out.delta.x = step(0);
  out.delta.y = step(1);
  out.delta.theta = step(2);
  out.predicted_cost_drop = -gradient.dot(step);
  return out;
}

RegistrationResult register_scans(const SurfacePointSet& source, const SurfacePointSet& target, const Pose2d& x0,
                                  const RegistrationParams& params) {
  params.validate();
  RegistrationResult result;
  result.pose = x0;

  std::vector<Correspondence> pairs;
  for (int iter = 1; iter <= params.max_iterations; ++iter) {
    result.iterations = iter;
    pairs = associate(source, target, result.pose, params.association_radius);
    if (pairs.size() < params.min_correspondences) throw TooFewCorrespondences(pairs.size(), params.min_correspondences);

    const StepResult step = solve_step(pairs, result.pose, params.metric, params.huber_delta);
    const double before = cost(pairs, result.pose, params.metric, params.huber_delta);

    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= kMaxHalvings; ++halving, scale *= 0.5) {
      const Pose2d candidate = add(result.pose, step.delta, scale);
      if (cost(pairs, candidate, params.metric, params.huber_delta) <= before) {
        result.pose = candidate;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No descent left along the Gauss-Newton direction for these pairs.
      result.converged = true;
      break;
    }
    const double dt = scale * std::hypot(step.delta.x, step.delta.y);
    const double dr = scale * std::abs(step.delta.theta);
    if (dt < params.translation_tolerance && dr < params.rotation_tolerance) {
      result.converged = true;
      break;
    }
  }

  result.num_correspondences = pairs.size();
  result.final_cost = cost(pairs, result.pose, params.metric, params.huber_delta);
  return result;
}

}  // namespace radar_odom
