#include "radar_odom/odometry.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

#include "radar_odom/errors.hpp"

namespace radar_odom {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point from, Clock::time_point to) {
  return std::chrono::duration<double, std::milli>(to - from).count();
}

Twist2d to_body(const Twist2d& global, double heading) {
  const Vec2d v = rotation(heading).transpose() * Vec2d(global.vx, global.vy);
  return {v.x(), v.y(), global.omega};
}

double planar_distance(const Pose2d& a, const Pose2d& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

void OdometryParams::validate() const {
  filter.validate();
  surface.validate();
  registration.validate();
  if (!(keyframe_distance > 0.0)) throw InvalidConfig("keyframe_distance must be > 0");
}

Twist2d update_velocity(const Pose2d& current, const Pose2d& previous, double dt) {
  if (!(dt > 0.0)) throw Error("update_velocity: dt must be > 0");
  return {(current.x - previous.x) / dt, (current.y - previous.y) / dt,
          normalize_angle(current.theta - previous.theta) / dt};
}

std::size_t select_keyframe(const std::vector<Keyframe>& keyframes, const Pose2d& predicted) {
  if (keyframes.empty()) throw Error("select_keyframe: no keyframes");
  std::size_t best = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < keyframes.size(); ++i) {
    const double d = planar_distance(keyframes[i].global_pose, predicted);
    if (d <= best_distance) {
      best_distance = d;
      best = i;
    }
  }
  return best;
}

FrameOutput process_scan(OdometryState& state, const PolarScan& scan, const OdometryParams& params) {
  FrameOutput out;
  FrameDiagnostics& diag = out.diagnostics;
  const double stamp = scan.timestamp + scan.sweep_period;
  const bool first = state.frames == 0;
  if (!first && !(stamp > state.last_timestamp)) throw Error("process_scan: timestamps must increase");
  diag.frame = state.frames;
  diag.timestamp = stamp;

  const Clock::time_point t0 = Clock::now();
  std::vector<RadarPoint> points = polar_to_cartesian(k_strongest(scan, params.filter), scan);
  if (params.compensate_motion) {
    points = motion_compensate(std::move(points), to_body(state.velocity, state.current_pose.theta), scan.sweep_period);
  }
  diag.filtered_points = points.size();

  const Clock::time_point t1 = Clock::now();
  SurfacePointSet surface = build_surface_points(points, params.surface);
  diag.surface_points = surface.size();

  const Clock::time_point t2 = Clock::now();
  Pose2d pose;
  if (first) {
    state.velocity = {};
  } else {
    const double dt = stamp - state.last_timestamp;
    const Pose2d predicted{state.current_pose.x + state.velocity.vx * dt, state.current_pose.y + state.velocity.vy * dt,
                           state.current_pose.theta + state.velocity.omega * dt};
    pose = predicted;
    diag.registration_failed = true;
    if (!state.keyframes.empty() && !surface.empty()) {
      const std::size_t kf_index = select_keyframe(state.keyframes, predicted);
      const Keyframe& kf = state.keyframes[kf_index];
      diag.keyframe_id = static_cast<int>(kf_index);
      try {
        const RegistrationResult reg =
            register_scans(surface, kf.set, compose(inverse(kf.global_pose), predicted), params.registration);
        pose = compose(kf.global_pose, reg.pose);
        diag.iterations = reg.iterations;
        diag.correspondences = reg.num_correspondences;
        diag.registration_failed = false;
      } catch (const RegistrationFailed&) {
      }
    }
    state.velocity = update_velocity(pose, state.current_pose, dt);

    // The first keyframe was built before any velocity was known.
    if (params.compensate_motion && !state.bootstrap_points.empty() && !diag.registration_failed &&
        state.keyframes.size() == 1) {
      Keyframe& kf = state.keyframes.front();
      SurfacePointSet rebuilt = build_surface_points(
          motion_compensate(std::move(state.bootstrap_points), to_body(state.velocity, kf.global_pose.theta), scan.sweep_period),
          params.surface);
      if (!rebuilt.empty()) {
        rebuilt.set_frame_pose(kf.global_pose);
        kf.set = std::move(rebuilt);
      }
    }
    state.bootstrap_points.clear();
  }
  state.previous_pose = first ? pose : state.current_pose;
  state.current_pose = pose;
  state.last_timestamp = stamp;
  ++state.frames;

  if (!surface.empty()) {
    bool push = state.keyframes.empty();
    if (!push) {
      const Pose2d& active =
          diag.keyframe_id >= 0 ? state.keyframes[static_cast<std::size_t>(diag.keyframe_id)].global_pose
                                : state.keyframes.back().global_pose;
      push = planar_distance(pose, active) > params.keyframe_distance;
    }
    if (push) {
      if (state.keyframes.empty() && state.velocity == Twist2d{}) state.bootstrap_points = points;
      surface.set_frame_pose(pose);
      state.keyframes.push_back({std::move(surface), pose, stamp});
      diag.new_keyframe = true;
    }
  }

  const Clock::time_point t3 = Clock::now();
  diag.stage_filter_ms = elapsed_ms(t0, t1);
  diag.stage_surface_ms = elapsed_ms(t1, t2);
  diag.stage_register_ms = elapsed_ms(t2, t3);
  diag.total_ms = elapsed_ms(t0, t3);
  out.pose = pose;
  return out;
}

}  // namespace radar_odom
