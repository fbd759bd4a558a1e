#include "radar_odom/eval_bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "radar_odom/errors.hpp"

namespace radar_odom {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double median_period(const TrajectoryEstimate& t) {
  if (t.size() < 2) return std::numeric_limits<double>::infinity();
  std::vector<double> dts;
  dts.reserve(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) dts.push_back(t.entries[i].timestamp - t.entries[i - 1].timestamp);
  std::nth_element(dts.begin(), dts.begin() + static_cast<std::ptrdiff_t>(dts.size() / 2), dts.end());
  return dts[dts.size() / 2];
}

Pose2d relative(const Pose2d& from, const Pose2d& to) { return compose(inverse(from), to); }

}  // namespace

AlignedTrajectories align_trajectories(const TrajectoryEstimate& estimate, const TrajectoryEstimate& truth) {
  AlignedTrajectories out;
  if (estimate.empty() || truth.empty()) return out;
  const double half_period = 0.5 * median_period(truth);
  const auto& est = estimate.entries;
  for (const StampedPose& t : truth.entries) {
    const auto it = std::lower_bound(est.begin(), est.end(), t.timestamp,
                                     [](const StampedPose& e, double stamp) { return e.timestamp < stamp; });
    const StampedPose* best = nullptr;
    double best_gap = std::numeric_limits<double>::infinity();
    if (it != est.end()) {
      best = &*it;
      best_gap = std::abs(it->timestamp - t.timestamp);
    }
    if (it != est.begin()) {
      const auto prev = std::prev(it);
      if (std::abs(prev->timestamp - t.timestamp) <= best_gap) {
        best = &*prev;
        best_gap = std::abs(prev->timestamp - t.timestamp);
      }
    }
    if (best && best_gap <= half_period) {
      out.estimate.push_back(best->pose);
      out.truth.push_back(t.pose);
    }
  }
  return out;
}

OdomErrorReport kitti_odometry_error(const AlignedTrajectories& aligned) {
  const auto& gt = aligned.truth;
  const auto& est = aligned.estimate;
  const std::size_t count = gt.size();

  std::vector<double> dist(count, 0.0);
  for (std::size_t i = 1; i < count; ++i) dist[i] = dist[i - 1] + (gt[i].translation() - gt[i - 1].translation()).norm();

  OdomErrorReport report;
  std::array<LengthError, kSegmentLengths.size()> acc{};
  double t_sum = 0.0, r_sum = 0.0;
  for (std::size_t first = 0; first < count; ++first) {
    std::size_t last = first;
    for (std::size_t li = 0; li < kSegmentLengths.size(); ++li) {
      const double len = kSegmentLengths[li];
      // Lengths ascend, so the search resumes where the previous one ended.
      // The slack keeps exact ties from flipping under rounding, which would
      // make the result depend on the trajectory's frame.
      const double reach = dist[first] + len;
      while (last < count && dist[last] < reach - 1e-9 * reach) ++last;
      if (last == count) break;
      const Pose2d error = relative(relative(est[first], est[last]), relative(gt[first], gt[last]));
      const double t_err = error.translation().norm() / len;
      const double r_err = std::abs(error.theta) / len;
      acc[li].translation_error_percent += t_err;
      acc[li].rotation_error_deg_per_100m += r_err;
      ++acc[li].segments;
      t_sum += t_err;
      r_sum += r_err;
      ++report.segments;
    }
  }
  if (report.segments == 0) throw PathTooShort("ground truth is shorter than the shortest segment length");

  for (std::size_t li = 0; li < kSegmentLengths.size(); ++li) {
    if (acc[li].segments == 0) {
      report.path_too_short = true;
      continue;
    }
    LengthError e;
    e.length = kSegmentLengths[li];
    e.segments = acc[li].segments;
    e.translation_error_percent = 100.0 * acc[li].translation_error_percent / static_cast<double>(e.segments);
    e.rotation_error_deg_per_100m = 100.0 * kRadToDeg * acc[li].rotation_error_deg_per_100m / static_cast<double>(e.segments);
    report.per_length.push_back(e);
  }
  const double n = static_cast<double>(report.segments);
  report.translation_error_percent = 100.0 * t_sum / n;
  report.rotation_error_deg_per_100m = 100.0 * kRadToDeg * r_sum / n;
  report.rpe_mean = relative_pose_error(aligned);
  return report;
}

OdomErrorReport kitti_odometry_error(const TrajectoryEstimate& estimate, const TrajectoryEstimate& truth) {
  return kitti_odometry_error(align_trajectories(estimate, truth));
}

double relative_pose_error(const AlignedTrajectories& aligned) {
  const std::size_t count = aligned.truth.size();
  if (count < 2) throw PathTooShort("relative pose error needs at least two aligned poses");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < count; ++i) {
    const Pose2d rel_est = relative(aligned.estimate[i], aligned.estimate[i + 1]);
    const Pose2d rel_gt = relative(aligned.truth[i], aligned.truth[i + 1]);
    sum += relative(rel_gt, rel_est).translation().norm();
  }
  return sum / static_cast<double>(count - 1);
}

double relative_pose_error(const TrajectoryEstimate& estimate, const TrajectoryEstimate& truth) {
  return relative_pose_error(align_trajectories(estimate, truth));
}

OdometryRun run_odometry(const ScanArchive& archive, const OdometryParams& params) {
  params.validate();
  OdometryRun run;
  OdometryState state;
  for (const PolarScan& scan : archive.scans) {
    const FrameOutput frame = process_scan(state, scan, params);
    run.trajectory.entries.push_back({frame.diagnostics.timestamp, frame.pose});
    run.diagnostics.push_back(frame.diagnostics);
  }
  return run;
}

std::vector<SweepRow> resolution_sweep(const ScanArchive& archive, const TrajectoryEstimate& truth,
                                       const std::vector<double>& resolutions, const std::vector<Metric>& metrics,
                                       const OdometryParams& base, std::size_t threads) {
  std::vector<SweepRow> rows;
  for (double r : resolutions) {
    for (Metric metric : metrics) {
      SweepRow row;
      row.resolution = r;
      row.metric = metric;
      rows.push_back(row);
    }
  }

  const auto run_cell = [&](SweepRow& row) {
    try {
      OdometryParams params = base;
      params.set_resolution(row.resolution);
      params.registration.metric = row.metric;
      const OdometryRun run = run_odometry(archive, params);
      const AlignedTrajectories aligned = align_trajectories(run.trajectory, truth);
      row.rpe = relative_pose_error(aligned);
      try {
        const OdomErrorReport report = kitti_odometry_error(aligned);
        row.translation_error_percent = report.translation_error_percent;
        row.rotation_error_deg_per_100m = report.rotation_error_deg_per_100m;
        row.has_drift = true;
      } catch (const PathTooShort&) {
      }
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  };

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) run_cell(rows[i]);
  };
  const std::size_t pool = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, rows.size()));
  std::vector<std::jthread> workers;
  for (std::size_t t = 1; t < pool; ++t) workers.emplace_back(worker);
  worker();
  workers.clear();
  return rows;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "resolution,metric,trans_err_pct,rot_err_deg_per_100m,rpe_m\n";
  for (const SweepRow& row : rows) {
    out += format_double(row.resolution) + ',' + std::string(to_string(row.metric)) + ',';
    if (row.failed) {
      out += "nan,nan,nan\n";
    } else if (row.has_drift) {
      out += format_double(row.translation_error_percent) + ',' + format_double(row.rotation_error_deg_per_100m) +
             ',' + format_double(row.rpe) + '\n';
    } else {
      out += ",," + format_double(row.rpe) + '\n';
    }
  }
  return out;
}

}  // namespace radar_odom
