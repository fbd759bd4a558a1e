#pragma once

#include <cstddef>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "radar_odom/radar_filter.hpp"
#include "radar_odom/se2.hpp"

namespace radar_odom {

struct SurfaceParams {
  double resolution = 3.0;  // neighbourhood radius r; grid side is r/2
  // One more than the default k, so the returns of a single azimuth cannot
  // form a surface on their own.
  int min_neighbors = 13;
  double isotropy_reject_ratio = 0.9;

  void validate() const;
};

struct OrientedSurfacePoint {
  Vec2d mean = Vec2d::Zero();
  Vec2d normal{0.0, 1.0};
  std::size_t support_count = 0;
};

/// Uniform-grid index over 2D positions answering radius queries.
class GridIndex {
 public:
  GridIndex() = default;
  GridIndex(std::span<const Vec2d> positions, double cell_size);

  /// Indices of positions within radius of center, by ascending distance
  /// (ties by index).
  std::vector<std::size_t> query(std::span<const Vec2d> positions, const Vec2d& center, double radius) const;

  /// Closest position within radius, ties by index.
  std::optional<std::size_t> nearest(std::span<const Vec2d> positions, const Vec2d& center, double radius) const;

  double cell_size() const { return cell_size_; }

 private:
  static std::int64_t key(std::int64_t ix, std::int64_t iy) { return (ix << 32) ^ (iy & 0xffffffff); }
  std::int64_t cell_coord(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_size_)); }

  double cell_size_ = 1.0;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> cells_;
};

/// The oriented surface points of one sweep, expressed in the sensor frame
/// at sweep end, with a radius-query index over their means.
class SurfacePointSet {
 public:
  SurfacePointSet() = default;
  SurfacePointSet(std::vector<OrientedSurfacePoint> points, double index_cell_size, Pose2d frame_pose = {});

  const std::vector<OrientedSurfacePoint>& points() const { return points_; }
  std::span<const Vec2d> means() const { return means_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  const Pose2d& frame_pose() const { return frame_pose_; }
  void set_frame_pose(const Pose2d& pose) { frame_pose_ = pose; }

  /// Points whose mean lies within radius of center, nearest first.
  std::vector<OrientedSurfacePoint> radius_query(const Vec2d& center, double radius) const;
  std::optional<std::size_t> nearest_within(const Vec2d& center, double radius) const;

 private:
  std::vector<OrientedSurfacePoint> points_;
  std::vector<Vec2d> means_;
  GridIndex index_;
  Pose2d frame_pose_;
};

/// Re-expresses each point in the sensor frame at sweep end, assuming the
/// body-frame velocity stayed constant through the sweep.
std::vector<RadarPoint> motion_compensate(std::vector<RadarPoint> points, const Twist2d& body_velocity,
                                          double sweep_period);

/// Sample mean and minor-axis normal of a neighbourhood. Returns nullopt for
/// fewer than min_neighbors points or a near-isotropic covariance. The
/// normal faces the sensor origin; when the origin lies on the fitted line
/// the normal with positive y (then positive x) is chosen.
std::optional<OrientedSurfacePoint> fit_surface_point(std::span<const Vec2d> neighbourhood,
                                                       const SurfaceParams& params);

/// Quantizes space into cells of side r/2 anchored at the sensor origin and
/// fits one surface point per occupied cell from all points within r of the
/// cell center.
SurfacePointSet build_surface_points(std::span<const RadarPoint> points, const SurfaceParams& params);

}  // namespace radar_odom
