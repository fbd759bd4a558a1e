#include "radar_odom/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include "radar_odom/errors.hpp"

namespace radar_odom {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || std::isnan(v)) throw InvalidConfig(key + ": not a number: '" + text + "'");
  return v;
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& text) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidConfig(key + ": not an integer: '" + text + "'");
  }
  return v;
}

std::vector<TrajectoryFormat> to_formats(const std::string& key, const std::string& text) {
  std::vector<TrajectoryFormat> formats;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    TrajectoryFormat f;
    if (item == "native") {
      f = TrajectoryFormat::kNative;
    } else if (item == "kitti") {
      f = TrajectoryFormat::kKitti;
    } else {
      throw InvalidConfig(key + ": expected native or kitti, got '" + item + "'");
    }
    if (std::find(formats.begin(), formats.end(), f) == formats.end()) formats.push_back(f);
  }
  if (formats.empty()) throw InvalidConfig(key + ": empty format list");
  return formats;
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, Field>& fields() {
  using C = RunConfig;
  using S = const std::string&;
  static const std::map<std::string, Field> table = {
      {"k", {[](C& c, S k, S v) { c.odometry.filter.k = to_integer<int>(k, v); },
             [](const C& c) { return std::to_string(c.odometry.filter.k); }}},
      {"z-min", {[](C& c, S k, S v) { c.odometry.filter.z_min = to_double(k, v); },
                 [](const C& c) { return format_double(c.odometry.filter.z_min); }}},
      {"resolution", {[](C& c, S k, S v) { c.odometry.set_resolution(to_double(k, v)); },
                      [](const C& c) { return format_double(c.odometry.surface.resolution); }}},
      {"metric", {[](C& c, S, S v) { c.odometry.registration.metric = parse_metric(v); },
                  [](const C& c) { return std::string(to_string(c.odometry.registration.metric)); }}},
      {"keyframe-distance", {[](C& c, S k, S v) { c.odometry.keyframe_distance = to_double(k, v); },
                             [](const C& c) { return format_double(c.odometry.keyframe_distance); }}},
      {"max-iterations", {[](C& c, S k, S v) { c.odometry.registration.max_iterations = to_integer<int>(k, v); },
                          [](const C& c) { return std::to_string(c.odometry.registration.max_iterations); }}},
      {"huber-delta", {[](C& c, S k, S v) { c.odometry.registration.huber_delta = to_double(k, v); },
                       [](const C& c) { return format_double(c.odometry.registration.huber_delta); }}},
      {"min-neighbors", {[](C& c, S k, S v) { c.odometry.surface.min_neighbors = to_integer<int>(k, v); },
                         [](const C& c) { return std::to_string(c.odometry.surface.min_neighbors); }}},
      {"seed", {[](C& c, S k, S v) { c.sim.rng_seed = to_integer<std::uint64_t>(k, v); },
                [](const C& c) { return std::to_string(c.sim.rng_seed); }}},
      {"output", {[](C& c, S, S v) { c.output_dir = v; }, [](const C& c) { return c.output_dir; }}},
      {"format", {[](C& c, S k, S v) { c.formats = to_formats(k, v); },
                  [](const C& c) {
                    std::string out;
                    for (auto f : c.formats) {
                      if (!out.empty()) out += ',';
                      out += f == TrajectoryFormat::kNative ? "native" : "kitti";
                    }
                    return out;
                  }}},
      {"azimuths", {[](C& c, S k, S v) { c.sim.num_azimuths = to_integer<std::size_t>(k, v); },
                    [](const C& c) { return std::to_string(c.sim.num_azimuths); }}},
      {"bins", {[](C& c, S k, S v) { c.sim.num_bins = to_integer<std::size_t>(k, v); },
                [](const C& c) { return std::to_string(c.sim.num_bins); }}},
      {"range-resolution", {[](C& c, S k, S v) { c.sim.range_resolution = to_double(k, v); },
                            [](const C& c) { return format_double(c.sim.range_resolution); }}},
      {"sweep-period", {[](C& c, S k, S v) { c.sim.sweep_period = to_double(k, v); },
                        [](const C& c) { return format_double(c.sim.sweep_period); }}},
      {"noise-mean", {[](C& c, S k, S v) { c.sim.noise_floor_mean = to_double(k, v); },
                      [](const C& c) { return format_double(c.sim.noise_floor_mean); }}},
      {"noise-sd", {[](C& c, S k, S v) { c.sim.noise_floor_sd = to_double(k, v); },
                    [](const C& c) { return format_double(c.sim.noise_floor_sd); }}},
      {"peak-power", {[](C& c, S k, S v) { c.sim.peak_power = to_double(k, v); },
                      [](const C& c) { return format_double(c.sim.peak_power); }}},
      {"peak-width", {[](C& c, S k, S v) { c.sim.peak_width = to_double(k, v); },
                      [](const C& c) { return format_double(c.sim.peak_width); }}},
      {"dropout", {[](C& c, S k, S v) { c.sim.speckle_dropout_prob = to_double(k, v); },
                   [](const C& c) { return format_double(c.sim.speckle_dropout_prob); }}},
      {"speed", {[](C& c, S k, S v) { c.speed = to_double(k, v); }, [](const C& c) { return format_double(c.speed); }}},
      {"yaw-rate", {[](C& c, S k, S v) { c.yaw_rate = to_double(k, v); },
                    [](const C& c) { return format_double(c.yaw_rate); }}},
      {"scans", {[](C& c, S k, S v) { c.scans = to_integer<std::size_t>(k, v); },
                 [](const C& c) { return std::to_string(c.scans); }}},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  odometry.validate();
  sim.validate();
  if (output_dir.empty()) throw InvalidConfig("output: empty path");
  if (!std::isfinite(speed) || !std::isfinite(yaw_rate)) throw InvalidConfig("speed and yaw-rate must be finite");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [key, field] : fields()) out.push_back(key);
    return out;
  }();
  return keys;
}

Settings parse_config_text(const std::string& text) {
  Settings settings;
  std::stringstream ss(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(ss, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidConfig("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw InvalidConfig("config line " + std::to_string(line_no) + ": empty key");
    settings[key] = value;
  }
  return settings;
}

RunConfig resolve_config(const Settings& file_settings, const Settings& flag_settings) {
  Settings merged = file_settings;
  for (const auto& [key, value] : flag_settings) merged[key] = value;

  RunConfig config;
  const auto& table = fields();
  for (const auto& [key, value] : merged) {
    const auto it = table.find(key);
    if (it == table.end()) throw InvalidConfig("unknown config key '" + key + "'");
    it->second.set(config, key, value);
  }
  config.validate();
  return config;
}

std::string config_value(const RunConfig& config, const std::string& key) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw InvalidConfig("unknown config key '" + key + "'");
  return it->second.get(config);
}

}  // namespace radar_odom
