#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "radar_odom/dataset_io.hpp"
#include "radar_odom/odometry.hpp"
#include "radar_odom/registration.hpp"

namespace radar_odom {

inline constexpr std::array<double, 8> kSegmentLengths = {100, 200, 300, 400, 500, 600, 700, 800};

struct LengthError {
  double length = 0.0;  // [m]
  double translation_error_percent = 0.0;
  double rotation_error_deg_per_100m = 0.0;
  std::size_t segments = 0;
};

struct OdomErrorReport {
  double translation_error_percent = 0.0;
  double rotation_error_deg_per_100m = 0.0;
  std::vector<LengthError> per_length;  // only lengths with at least one segment
  double rpe_mean = 0.0;               // [m]
  std::size_t segments = 0;
  /// Set when the ground truth is shorter than the longest segment length.
  bool path_too_short = false;
};

struct AlignedTrajectories {
  std::vector<Pose2d> estimate;
  std::vector<Pose2d> truth;
};

/// Pairs each ground-truth pose with the nearest estimate in time, dropping
/// pairs further apart than half the median ground-truth frame period.
AlignedTrajectories align_trajectories(const TrajectoryEstimate& estimate, const TrajectoryEstimate& truth);

/// KITTI-style drift over ground-truth path lengths of 100..800 m, starting
/// at every frame. Throws PathTooShort if no segment fits at all.
OdomErrorReport kitti_odometry_error(const TrajectoryEstimate& estimate, const TrajectoryEstimate& truth);
OdomErrorReport kitti_odometry_error(const AlignedTrajectories& aligned);

/// Mean translational discrepancy of consecutive relative poses.
/// Throws PathTooShort with fewer than two aligned poses.
double relative_pose_error(const TrajectoryEstimate& estimate, const TrajectoryEstimate& truth);
double relative_pose_error(const AlignedTrajectories& aligned);

struct OdometryRun {
  TrajectoryEstimate trajectory;
  std::vector<FrameDiagnostics> diagnostics;
};

OdometryRun run_odometry(const ScanArchive& archive, const OdometryParams& params);

struct SweepRow {
  double resolution = 0.0;
  Metric metric = Metric::kPointToLine;
  bool failed = false;
  std::string error;
  /// False when the truth is too short for any drift segment; only rpe is set.
  bool has_drift = false;
  double translation_error_percent = 0.0;
  double rotation_error_deg_per_100m = 0.0;
  double rpe = 0.0;
};

/// Runs the pipeline once per (resolution, metric), resolution-major, and
/// scores each run against truth. Cells may run on up to `threads` threads;
/// row order does not depend on it.
std::vector<SweepRow> resolution_sweep(const ScanArchive& archive, const TrajectoryEstimate& truth,
                                       const std::vector<double>& resolutions, const std::vector<Metric>& metrics,
                                       const OdometryParams& base, std::size_t threads = 1);

/// `resolution,metric,trans_err_pct,rot_err_deg_per_100m,rpe_m`; failed
/// cells carry `nan` metrics.
std::string format_sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace radar_odom
