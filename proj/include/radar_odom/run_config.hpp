#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "radar_odom/dataset_io.hpp"
#include "radar_odom/odometry.hpp"
#include "radar_odom/radar_sim.hpp"

namespace radar_odom {

/// Everything a CLI command needs. Values come from defaults, then an
/// optional key=value file, then command-line flags.
struct RunConfig {
  OdometryParams odometry;
  SimConfig sim;
  std::string output_dir = ".";
  std::vector<TrajectoryFormat> formats{TrajectoryFormat::kNative};
  // Simulated trajectory: constant body velocity from the origin.
  double speed = 5.0;     // [m/s]
  double yaw_rate = 0.0;  // [rad/s]
  std::size_t scans = 100;

  void validate() const;
};

using Settings = std::map<std::string, std::string>;

/// Keys accepted in config files and as `--key` flags.
const std::vector<std::string>& config_keys();

/// key=value lines; `#` comments and blank lines are skipped.
/// Throws InvalidConfig naming the line.
Settings parse_config_text(const std::string& text);

/// Applies file settings then flag settings over the defaults. Unknown keys
/// and unparsable values throw InvalidConfig.
RunConfig resolve_config(const Settings& file_settings, const Settings& flag_settings);

/// Current value of key rendered as text.
std::string config_value(const RunConfig& config, const std::string& key);

}  // namespace radar_odom
