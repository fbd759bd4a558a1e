#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "radar_odom/dataset_io.hpp"
#include "radar_odom/radar_filter.hpp"
#include "radar_odom/se2.hpp"

namespace radar_odom {

struct Segment {
  Vec2d a = Vec2d::Zero();
  Vec2d b = Vec2d::Zero();
  double reflectivity = 1.0;
};

struct World2D {
  std::vector<Segment> segments;
};

struct SimConfig {
  std::size_t num_azimuths = 400;
  std::size_t num_bins = 3768;
  double range_resolution = 0.0438;
  double sweep_period = 0.25;
  double noise_floor_mean = 0.0;
  double noise_floor_sd = 0.0;
  double peak_power = 100.0;
  double peak_width = 1.5;  // Gaussian sigma [bins]
  std::uint64_t rng_seed = 1;
  double speckle_dropout_prob = 0.0;

  void validate() const;
};

/// Sensor pose in the world as a function of time [s].
using Trajectory = std::function<Pose2d(double)>;

/// Constant body-frame velocity from start at t = t0, integrated exactly.
Trajectory constant_velocity_trajectory(const Pose2d& start, const Twist2d& body_velocity, double t0 = 0.0);

/// Distance along a ray to the first segment hit, if any.
std::optional<std::pair<double, const Segment*>> cast_ray(const World2D& world, const Vec2d& origin, double heading);

/// One sweep starting at start_time. Azimuth i is fired at
/// start_time + sweep_period * i / m from the pose at that instant.
/// stream selects the pseudo-random stream derived from config.rng_seed.
PolarScan render_scan(const World2D& world, const Trajectory& trajectory, double start_time, const SimConfig& config,
                      std::uint64_t stream = 0);

struct SimSequence {
  std::vector<PolarScan> scans;
  TrajectoryEstimate ground_truth;  // sampled at each sweep end
};

/// Scans may render on up to `threads` threads; each scan uses its own
/// stream (its index), so the output does not depend on the thread count.
SimSequence render_sequence(const World2D& world, const Trajectory& trajectory, std::size_t num_scans,
                            const SimConfig& config, double start_time = 0.0, std::size_t threads = 1);

/// Parses `x1 y1 x2 y2 reflectivity` lines; `#` starts a comment.
/// Throws MalformedFile carrying the 1-based line number.
World2D parse_world(std::istream& in);
World2D read_world(const std::string& path);
void write_world(const World2D& world, std::ostream& out);

/// A street corridor along +x lined with building blocks, cross streets and
/// recessed entrances, so walls face both along and across the street.
World2D make_corridor_world(double length = 300.0, double width = 12.0, std::uint64_t seed = 7);

/// Scattered cars, poles, wall pieces and corners with large gaps between them.
World2D make_sparse_world(double length = 300.0, double width = 30.0, std::uint64_t seed = 11);

}  // namespace radar_odom
