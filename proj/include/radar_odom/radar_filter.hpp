#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "radar_odom/se2.hpp"

namespace radar_odom {

using PowerGrid = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One rotating-radar sweep: rows are azimuths, columns range bins.
struct PolarScan {
  double timestamp = 0.0;  // sweep start [s]
  double sweep_period = 0.25;
  double range_resolution = 0.0438;  // [m/bin]
  PowerGrid power;
  std::vector<double> azimuths;  // [rad], one per row, increasing

  std::size_t num_azimuths() const { return static_cast<std::size_t>(power.rows()); }
  std::size_t num_bins() const { return static_cast<std::size_t>(power.cols()); }
  double azimuth_angle(std::size_t i) const { return azimuths[i]; }

  /// Evenly spaced azimuths 2*pi*i/m.
  static std::vector<double> uniform_azimuths(std::size_t m);
};

struct FilterParams {
  int k = 12;
  double z_min = 0.0;
  /// Optional per-bin noise level; when sized to the scan's bin count the
  /// threshold for bin b is max(z_min, noise_profile[b]).
  std::vector<float> noise_profile;

  void validate() const;
};

struct RadarPoint {
  Vec2d position = Vec2d::Zero();  // sensor frame [m]
  float power = 0.0f;
  std::size_t azimuth_index = 0;
  std::size_t range_bin = 0;
  double relative_time = 0.0;  // [s] since sweep start
};

/// Per azimuth, keeps the (at most) k highest-power bins whose power
/// exceeds the threshold. Equal powers rank the smaller bin first. Output is
/// ordered by azimuth then bin; positions are left unset.
std::vector<RadarPoint> k_strongest(const PolarScan& scan, const FilterParams& params);

/// Places each point at the center of its range bin along its azimuth and
/// stamps the time within the sweep, assuming uniform rotation.
std::vector<RadarPoint> polar_to_cartesian(std::vector<RadarPoint> points, const PolarScan& scan);

}  // namespace radar_odom
