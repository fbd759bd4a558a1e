#include "radar_odom/dataset_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>

#include "radar_odom/errors.hpp"

namespace radar_odom {
namespace {

constexpr char kMagic[8] = {'R', 'A', 'D', 'S', 'C', 'A', 'N', '1'};

template <typename T>
T byteswap_if_big(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto raw = std::bit_cast<std::array<std::byte, sizeof(T)>>(value);
    std::reverse(raw.begin(), raw.end());
    return std::bit_cast<T>(raw);
  } else {
    return value;
  }
}

class ByteWriter {
 public:
  template <typename T>
  void put(T value) {
    value = byteswap_if_big(value);
    const auto* p = reinterpret_cast<const std::byte*>(&value);
    out_.insert(out_.end(), p, p + sizeof(T));
  }
  void put_bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const std::byte*>(data);
    out_.insert(out_.end(), p, p + size);
  }
  std::vector<std::byte> take() { return std::move(out_); }

 private:
  std::vector<std::byte> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* field) {
    require(sizeof(T), field);
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return byteswap_if_big(value);
  }

  void require(std::size_t size, const char* field) const {
    if (remaining() < size) throw MalformedFile(std::string("truncated archive reading ") + field, pos_);
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }
  const std::byte* cursor() const { return bytes_.data() + pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

bool parse_number(std::string_view token, double& value) {
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end && std::isfinite(value);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r' || line[i] == ',')) ++i;
    std::size_t j = i;
    while (j < line.size() && !(line[j] == ' ' || line[j] == '\t' || line[j] == '\r' || line[j] == ',')) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::vector<std::byte> encode_scan_archive(const ScanArchive& archive) {
  ByteWriter w;
  w.put_bytes(kMagic, sizeof(kMagic));
  w.put<std::uint32_t>(kArchiveVersion);
  std::size_t m = 0, n = 0;
  double resolution = 0.0, period = 0.0;
  if (!archive.scans.empty()) {
    const PolarScan& first = archive.scans.front();
    n = first.num_bins();
    resolution = first.range_resolution;
    period = first.sweep_period;
    for (const PolarScan& s : archive.scans) m = std::max(m, s.num_azimuths());
  }
  w.put<std::uint32_t>(static_cast<std::uint32_t>(m));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(n));
  w.put<double>(resolution);
  w.put<double>(period);

  double last = -std::numeric_limits<double>::infinity();
  for (const PolarScan& s : archive.scans) {
    if (s.num_bins() != n || s.range_resolution != resolution || s.sweep_period != period) {
      throw Error("archive scans must share bins, range resolution and sweep period");
    }
    if (s.num_azimuths() == 0 || s.azimuths.size() != s.num_azimuths()) throw Error("scan azimuths do not match rows");
    if (!(s.timestamp > last)) throw Error("archive timestamps must increase strictly");
    last = s.timestamp;
    w.put<double>(s.timestamp);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s.num_azimuths()));
    for (std::size_t r = 0; r < s.num_azimuths(); ++r) {
      w.put<double>(s.azimuths[r]);
      const float* row = s.power.data() + r * n;
      if constexpr (std::endian::native == std::endian::little) {
        w.put_bytes(row, n * sizeof(float));
      } else {
        for (std::size_t b = 0; b < n; ++b) w.put<float>(row[b]);
      }
    }
  }
  return w.take();
}

ScanArchive decode_scan_archive(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  r.require(sizeof(kMagic), "magic");
  if (std::memcmp(r.cursor(), kMagic, sizeof(kMagic)) != 0) throw MalformedFile("bad archive magic", 0);
  r.skip(sizeof(kMagic));
  const std::size_t version_at = r.position();
  if (r.get<std::uint32_t>("version") != kArchiveVersion) throw MalformedFile("unsupported archive version", version_at);
  const std::size_t m = r.get<std::uint32_t>("azimuth count");
  const std::size_t dims_at = r.position();
  const std::size_t n = r.get<std::uint32_t>("bin count");
  const std::size_t resolution_at = r.position();
  const double resolution = r.get<double>("range resolution");
  const double period = r.get<double>("sweep period");

  ScanArchive archive;
  if (r.remaining() == 0) return archive;
  if (m == 0 || n == 0) throw MalformedFile("scan records present but header has zero dimensions", dims_at);
  if (!(resolution > 0.0) || !std::isfinite(resolution) || !(period > 0.0) || !std::isfinite(period)) {
    throw MalformedFile("non-positive range resolution or sweep period", resolution_at);
  }

  double last = -std::numeric_limits<double>::infinity();
  while (r.remaining() > 0) {
    const std::size_t record_at = r.position();
    const double timestamp = r.get<double>("timestamp");
    if (!std::isfinite(timestamp) || !(timestamp > last)) {
      throw MalformedFile("scan timestamps must be finite and strictly increasing", record_at);
    }
    last = timestamp;
    const std::size_t rows_at = r.position();
    const std::size_t rows = r.get<std::uint32_t>("row count");
    if (rows == 0 || rows > m) throw MalformedFile("row count out of range", rows_at);
    const std::size_t row_bytes = sizeof(double) + n * sizeof(float);
    if (r.remaining() / row_bytes < rows) throw MalformedFile("truncated scan record", r.position());

    PolarScan scan;
    scan.timestamp = timestamp;
    scan.sweep_period = period;
    scan.range_resolution = resolution;
    scan.power.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
    scan.azimuths.resize(rows);
    for (std::size_t row = 0; row < rows; ++row) {
      const std::size_t az_at = r.position();
      const double az = r.get<double>("azimuth");
      if (!std::isfinite(az) || (row > 0 && !(az > scan.azimuths[row - 1]))) {
        throw MalformedFile("azimuths must be finite and increasing", az_at);
      }
      scan.azimuths[row] = az;
      float* out = scan.power.data() + row * n;
      const std::size_t powers_at = r.position();
      std::memcpy(out, r.cursor(), n * sizeof(float));
      r.skip(n * sizeof(float));
      for (std::size_t b = 0; b < n; ++b) {
        out[b] = byteswap_if_big(out[b]);
        if (!std::isfinite(out[b]) || out[b] < 0.0f) {
          throw MalformedFile("power must be finite and non-negative", powers_at + b * sizeof(float));
        }
      }
    }
    if (scan.azimuths.back() - scan.azimuths.front() > 2.0 * std::numbers::pi) {
      throw MalformedFile("azimuths span more than one revolution", rows_at);
    }
    archive.scans.push_back(std::move(scan));
  }
  return archive;
}

void write_file_atomic(const std::string& path, std::span<const std::byte> content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(content.data()), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  write_file_atomic(path, std::as_bytes(std::span<const char>(content.data(), content.size())));
}

std::vector<std::byte> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedFile("cannot open " + path, 0);
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> out(raw.size());
  std::memcpy(out.data(), raw.data(), raw.size());
  return out;
}

void write_scan_archive(const ScanArchive& archive, const std::string& path) {
  write_file_atomic(path, encode_scan_archive(archive));
}

ScanArchive read_scan_archive(const std::string& path) { return decode_scan_archive(read_file_bytes(path)); }

PolarScan decode_oxford_polar(const Gray8Image& image) {
  if (image.width <= kOxfordMetadataColumns) throw MissingMetadata("polar image has no range bins");
  const std::size_t n = image.width - kOxfordMetadataColumns;

  std::vector<std::size_t> valid_rows;
  for (std::size_t r = 0; r < image.height; ++r) {
    if (image.row(r)[10] == 255) valid_rows.push_back(r);
  }
  if (valid_rows.empty()) throw MissingMetadata("polar image has no valid azimuth rows");

  PolarScan scan;
  scan.range_resolution = kOxfordRangeResolution;
  scan.sweep_period = kOxfordSweepPeriod;
  scan.power.resize(static_cast<Eigen::Index>(valid_rows.size()), static_cast<Eigen::Index>(n));
  scan.azimuths.reserve(valid_rows.size());
  double unwrap = 0.0;
  for (std::size_t i = 0; i < valid_rows.size(); ++i) {
    const std::uint8_t* row = image.row(valid_rows[i]);
    if (i == 0) {
      std::int64_t micros = 0;
      for (int b = 7; b >= 0; --b) micros = static_cast<std::int64_t>((static_cast<std::uint64_t>(micros) << 8) | row[b]);
      scan.timestamp = static_cast<double>(micros) * 1e-6;
    }
    const std::uint16_t encoder = static_cast<std::uint16_t>(row[8] | (row[9] << 8));
    double az = static_cast<double>(encoder) / kOxfordEncoderCounts * 2.0 * std::numbers::pi + unwrap;
    if (!scan.azimuths.empty() && az <= scan.azimuths.back()) {
      // Encoder wrapped past a full turn within the sweep.
      unwrap += 2.0 * std::numbers::pi;
      az += 2.0 * std::numbers::pi;
    }
    scan.azimuths.push_back(az);
    for (std::size_t b = 0; b < n; ++b) {
      scan.power(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) = row[kOxfordMetadataColumns + b];
    }
  }
  return scan;
}

ScanArchive read_oxford_polar(const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) throw MalformedFile("not a directory: " + directory, 0);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  ScanArchive archive;
  for (const fs::path& file : files) {
    PolarScan scan = decode_oxford_polar(decode_png_gray8(read_file_bytes(file.string())));
    if (!archive.scans.empty() && !(scan.timestamp > archive.scans.back().timestamp)) {
      throw MalformedFile("non-increasing scan timestamp in " + file.string(), 0);
    }
    archive.scans.push_back(std::move(scan));
  }
  return archive;
}

std::string format_trajectory(const TrajectoryEstimate& trajectory, TrajectoryFormat format) {
  std::string out;
  for (const StampedPose& e : trajectory.entries) {
    const Pose2d& p = e.pose;
    if (format == TrajectoryFormat::kNative) {
      out += format_double(e.timestamp) + ' ' + format_double(p.x) + ' ' + format_double(p.y) + ' ' +
             format_double(p.theta) + '\n';
    } else {
      const double c = std::cos(p.theta), s = std::sin(p.theta);
      const double row[12] = {c, -s, 0.0, p.x, s, c, 0.0, p.y, 0.0, 0.0, 1.0, 0.0};
      for (int i = 0; i < 12; ++i) {
        // Keep the identity embedding free of "-0".
        out += format_double(row[i] == 0.0 ? 0.0 : row[i]);
        out += i == 11 ? '\n' : ' ';
      }
    }
  }
  return out;
}

TrajectoryEstimate parse_trajectory(const std::string& text, std::optional<TrajectoryFormat> format) {
  TrajectoryEstimate trajectory;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto fields = split_fields(line);
    if (fields.empty()) continue;

    if (!format) {
      if (fields.size() == 4) {
        format = TrajectoryFormat::kNative;
      } else if (fields.size() == 12) {
        format = TrajectoryFormat::kKitti;
      } else {
        throw MalformedFile("expected 4 (native) or 12 (kitti) fields", line_no);
      }
    }
    const std::size_t expected = *format == TrajectoryFormat::kNative ? 4 : 12;
    if (fields.size() != expected) {
      throw MalformedFile("expected " + std::to_string(expected) + " fields, got " + std::to_string(fields.size()),
                          line_no);
    }
    double v[12];
    for (std::size_t i = 0; i < expected; ++i) {
      if (!parse_number(fields[i], v[i])) throw MalformedFile("not a finite number: " + std::string(fields[i]), line_no);
    }

    StampedPose entry;
    if (*format == TrajectoryFormat::kNative) {
      entry.timestamp = v[0];
      entry.pose = Pose2d(v[1], v[2], v[3]);
    } else {
      entry.timestamp = static_cast<double>(trajectory.entries.size());
      entry.pose = Pose2d(v[3], v[7], std::atan2(v[4], v[0]));
    }
    if (!trajectory.entries.empty() && !(entry.timestamp > trajectory.entries.back().timestamp)) {
      throw MalformedFile("timestamps must increase strictly", line_no);
    }
    trajectory.entries.push_back(entry);
  }
  return trajectory;
}

void write_trajectory(const TrajectoryEstimate& trajectory, const std::string& path, TrajectoryFormat format) {
  write_file_atomic(path, format_trajectory(trajectory, format));
}

TrajectoryEstimate read_trajectory(const std::string& path, std::optional<TrajectoryFormat> format) {
  const std::vector<std::byte> bytes = read_file_bytes(path);
  return parse_trajectory(std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()), format);
}

}  // namespace radar_odom
