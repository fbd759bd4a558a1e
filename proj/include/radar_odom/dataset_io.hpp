#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radar_odom/png_io.hpp"
#include "radar_odom/radar_filter.hpp"
#include "radar_odom/se2.hpp"

namespace radar_odom {

struct StampedPose {
  double timestamp = 0.0;
  Pose2d pose;
};

struct TrajectoryEstimate {
  std::vector<StampedPose> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

struct ScanArchive {
  std::vector<PolarScan> scans;
};

// Canonical scan archive, little-endian throughout:
//
//   header  char[8] "RADSCAN1" | u32 version | u32 azimuths m | u32 bins n
//           | f64 range_resolution | f64 sweep_period
//   scan    f64 timestamp | u32 rows (1..m)
//           | rows x (f64 azimuth | n x f32 power)
//
// Every scan shares n, range_resolution and sweep_period. rows may be less
// than m when invalid azimuths were dropped.
inline constexpr std::uint32_t kArchiveVersion = 1;
inline constexpr std::size_t kArchiveHeaderSize = 36;

std::vector<std::byte> encode_scan_archive(const ScanArchive& archive);
/// Throws MalformedFile with the byte offset of the first bad field.
ScanArchive decode_scan_archive(std::span<const std::byte> bytes);

/// Atomic (temp file + rename).
void write_scan_archive(const ScanArchive& archive, const std::string& path);
ScanArchive read_scan_archive(const std::string& path);

// Oxford Radar RobotCar polar images: 8-bit grayscale, one row per azimuth;
// bytes 0-7 hold the int64 timestamp [us], 8-9 the uint16 encoder count
// (5600 per revolution), 10 the validity flag (255 = valid), the rest are
// range-bin powers.
inline constexpr std::size_t kOxfordMetadataColumns = 11;
inline constexpr double kOxfordEncoderCounts = 5600.0;
inline constexpr double kOxfordRangeResolution = 0.0432;
inline constexpr double kOxfordSweepPeriod = 0.25;

/// Throws MissingMetadata when the image has no bins or no valid row.
PolarScan decode_oxford_polar(const Gray8Image& image);
/// Every *.png in the directory, in filename order.
ScanArchive read_oxford_polar(const std::string& directory);

enum class TrajectoryFormat { kNative, kKitti };

/// native: `timestamp x y theta` per line.
/// kitti: row-major top 3x4 of the SE(3) embedding (yaw about z, z = 0).
std::string format_trajectory(const TrajectoryEstimate& trajectory, TrajectoryFormat format);
/// Format inferred from the field count when not given. KITTI files carry no
/// time, so entries are stamped with their line index.
TrajectoryEstimate parse_trajectory(const std::string& text, std::optional<TrajectoryFormat> format = std::nullopt);

void write_trajectory(const TrajectoryEstimate& trajectory, const std::string& path, TrajectoryFormat format);
TrajectoryEstimate read_trajectory(const std::string& path, std::optional<TrajectoryFormat> format = std::nullopt);

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

/// Writes content to path via a temporary file and rename.
void write_file_atomic(const std::string& path, std::span<const std::byte> content);
void write_file_atomic(const std::string& path, const std::string& content);
std::vector<std::byte> read_file_bytes(const std::string& path);

}  // namespace radar_odom
