#pragma once

#include <cstddef>
#include <vector>

#include "radar_odom/radar_filter.hpp"
#include "radar_odom/registration.hpp"
#include "radar_odom/se2.hpp"
#include "radar_odom/surface_model.hpp"

namespace radar_odom {

struct OdometryParams {
  FilterParams filter;
  SurfaceParams surface;
  RegistrationParams registration;
  double keyframe_distance = 1.5;
  /// Undistort each sweep with the previous velocity estimate.
  bool compensate_motion = true;

  /// Sets the surface resolution and the association radius together.
  void set_resolution(double r) {
    surface.resolution = r;
    registration.association_radius = r;
  }

  void validate() const;
};

struct Keyframe {
  SurfacePointSet set;
  Pose2d global_pose;
  double timestamp = 0.0;
};

struct OdometryState {
  Pose2d current_pose;
  Pose2d previous_pose;
  Twist2d velocity;  // global-frame component-wise rate
  std::vector<Keyframe> keyframes;
  double last_timestamp = 0.0;
  std::size_t frames = 0;
  /// Filtered points of the first keyframe, kept until a velocity estimate
  /// exists so that keyframe can be undistorted after the fact.
  std::vector<RadarPoint> bootstrap_points;
};

struct FrameDiagnostics {
  std::size_t frame = 0;
  double timestamp = 0.0;  // sweep end [s]
  double stage_filter_ms = 0.0;
  double stage_surface_ms = 0.0;
  double stage_register_ms = 0.0;
  double total_ms = 0.0;
  int iterations = 0;
  std::size_t correspondences = 0;
  int keyframe_id = -1;  // keyframe registered against, -1 if none
  std::size_t filtered_points = 0;
  std::size_t surface_points = 0;
  bool registration_failed = false;
  bool new_keyframe = false;
};

struct FrameOutput {
  Pose2d pose;  // global pose at sweep end
  FrameDiagnostics diagnostics;
};

/// Component-wise (x_t - x_prev) / dt with the heading difference wrapped.
Twist2d update_velocity(const Pose2d& current, const Pose2d& previous, double dt);

/// Keyframe whose position is closest to the predicted position; ties go to
/// the most recent.
std::size_t select_keyframe(const std::vector<Keyframe>& keyframes, const Pose2d& predicted);

/// Runs one sweep through filter, compensation, surface extraction and
/// keyframe registration, updating state in place. A failed registration
/// falls back to the constant-velocity prediction and is flagged.
FrameOutput process_scan(OdometryState& state, const PolarScan& scan, const OdometryParams& params);

}  // namespace radar_odom
