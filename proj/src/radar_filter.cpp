#include "radar_odom/radar_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "radar_odom/errors.hpp"

namespace radar_odom {

std::vector<double> PolarScan::uniform_azimuths(std::size_t m) {
  std::vector<double> az(m);
  for (std::size_t i = 0; i < m; ++i) az[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
  return az;
}

void FilterParams::validate() const {
  if (k < 1) throw InvalidConfig("k must be >= 1");
  if (!(z_min >= 0.0)) throw InvalidConfig("z_min must be >= 0");
}

std::vector<RadarPoint> k_strongest(const PolarScan& scan, const FilterParams& params) {
  params.validate();
  const std::size_t m = scan.num_azimuths();
  const std::size_t n = scan.num_bins();
  const auto k = static_cast<std::size_t>(params.k);
  const bool use_profile = params.noise_profile.size() == n;

  std::vector<RadarPoint> out;
  out.reserve(m * std::min(k, n));

  std::vector<std::size_t> candidates;
  candidates.reserve(n);
  for (std::size_t row = 0; row < m; ++row) {
    const float* power = scan.power.data() + row * n;
    candidates.clear();
    for (std::size_t bin = 0; bin < n; ++bin) {
      const double threshold = use_profile ? std::max<double>(params.z_min, params.noise_profile[bin]) : params.z_min;
      if (power[bin] > threshold) candidates.push_back(bin);
    }
    // Stronger first; equal power prefers the closer bin.
    const auto stronger = [power](std::size_t a, std::size_t b) {
      return power[a] > power[b] || (power[a] == power[b] && a < b);
    };
    if (candidates.size() > k) {
      std::nth_element(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k - 1), candidates.end(),
                       stronger);
      candidates.resize(k);
    }
    std::sort(candidates.begin(), candidates.end());
    for (std::size_t bin : candidates) {
      RadarPoint p;
      p.power = power[bin];
      p.azimuth_index = row;
      p.range_bin = bin;
      out.push_back(p);
    }
  }
  return out;
}

std::vector<RadarPoint> polar_to_cartesian(std::vector<RadarPoint> points, const PolarScan& scan) {
  const double m = static_cast<double>(scan.num_azimuths());
  for (RadarPoint& p : points) {
    const double range = (static_cast<double>(p.range_bin) + 0.5) * scan.range_resolution;
    const double phi = scan.azimuth_angle(p.azimuth_index);
    p.position = {range * std::cos(phi), range * std::sin(phi)};
    p.relative_time = scan.sweep_period * static_cast<double>(p.azimuth_index) / m;
  }
  return points;
}

}  // namespace radar_odom
