#include "radar_odom/radar_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "radar_odom/errors.hpp"

namespace radar_odom {
namespace {

double cross(const Vec2d& a, const Vec2d& b) { return a.x() * b.y() - a.y() * b.x(); }

// Exact pose increment for a constant body twist held for tau seconds.
Pose2d integrate_twist(const Twist2d& v, double tau) {
  const double theta = v.omega * tau;
  double a, b;  // sin(theta)/theta, (1 - cos(theta))/theta
  if (std::abs(theta) < 1e-9) {
    a = 1.0 - theta * theta / 6.0;
    b = 0.5 * theta;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta;
  }
  const double dx = v.vx * tau, dy = v.vy * tau;
  return {a * dx - b * dy, b * dx + a * dy, theta};
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

void add_segment(World2D& world, Vec2d a, Vec2d b, double reflectivity = 1.0) {
  world.segments.push_back({a, b, reflectivity});
}

}  // namespace

void SimConfig::validate() const {
  if (num_azimuths == 0 || num_bins == 0) throw InvalidConfig("sim: azimuth and bin counts must be positive");
  if (!(range_resolution > 0.0) || !(sweep_period > 0.0)) throw InvalidConfig("sim: resolution and period must be > 0");
  if (noise_floor_mean < 0.0 || noise_floor_sd < 0.0) throw InvalidConfig("sim: noise parameters must be >= 0");
  if (!(peak_power > 0.0) || !(peak_width > 0.0)) throw InvalidConfig("sim: peak power and width must be > 0");
  if (!(speckle_dropout_prob >= 0.0 && speckle_dropout_prob < 1.0))
    throw InvalidConfig("sim: speckle_dropout_prob must be in [0, 1)");
}

Trajectory constant_velocity_trajectory(const Pose2d& start, const Twist2d& body_velocity, double t0) {
  return [=](double t) { return compose(start, integrate_twist(body_velocity, t - t0)); };
}

std::optional<std::pair<double, const Segment*>> cast_ray(const World2D& world, const Vec2d& origin, double heading) {
  const Vec2d dir{std::cos(heading), std::sin(heading)};
  double best = std::numeric_limits<double>::infinity();
  const Segment* hit = nullptr;
  for (const Segment& seg : world.segments) {
    const Vec2d edge = seg.b - seg.a;
    const double denom = cross(dir, edge);
    if (denom == 0.0) continue;  // parallel
    const Vec2d rel = seg.a - origin;
    const double s = cross(rel, edge) / denom;
    const double u = cross(rel, dir) / denom;
    if (s > 0.0 && u >= 0.0 && u <= 1.0 && s < best) {
      best = s;
      hit = &seg;
    }
  }
  if (!hit) return std::nullopt;
  return std::make_pair(best, hit);
}

PolarScan render_scan(const World2D& world, const Trajectory& trajectory, double start_time, const SimConfig& config,
                      std::uint64_t stream) {
  config.validate();
  const std::size_t m = config.num_azimuths, n = config.num_bins;
  PolarScan scan;
  scan.timestamp = start_time;
  scan.sweep_period = config.sweep_period;
  scan.range_resolution = config.range_resolution;
  scan.azimuths = PolarScan::uniform_azimuths(m);
  scan.power = PowerGrid::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));

  std::mt19937_64 rng = stream_rng(config.rng_seed, stream);
  std::normal_distribution<double> noise(config.noise_floor_mean, config.noise_floor_sd);
  std::bernoulli_distribution dropout(config.speckle_dropout_prob);
  const bool noisy = config.noise_floor_sd > 0.0 || config.noise_floor_mean > 0.0;
  const double max_range = static_cast<double>(n) * config.range_resolution;
  const double reach = 5.0 * config.peak_width;

  for (std::size_t i = 0; i < m; ++i) {
    float* row = scan.power.data() + i * n;
    if (noisy) {
      for (std::size_t b = 0; b < n; ++b) row[b] = static_cast<float>(std::max(0.0, noise(rng)));
    }
    const bool dropped = config.speckle_dropout_prob > 0.0 && dropout(rng);
    const double t = start_time + config.sweep_period * static_cast<double>(i) / static_cast<double>(m);
    const Pose2d pose = trajectory(t);
    const auto hit = cast_ray(world, pose.translation(), pose.theta + scan.azimuths[i]);
    if (!hit || dropped || hit->first >= max_range) continue;

    // Continuous bin coordinate: bin b covers [b, b + 1) * resolution and
    // its center sits at b + 0.5.
    const double center = hit->first / config.range_resolution - 0.5;
    const double height = config.peak_power * hit->second->reflectivity;
    const auto lo = static_cast<std::ptrdiff_t>(std::max(0.0, std::floor(center - reach)));
    const auto hi = static_cast<std::ptrdiff_t>(std::min(static_cast<double>(n) - 1.0, std::ceil(center + reach)));
    for (std::ptrdiff_t b = lo; b <= hi; ++b) {
      const double z = (static_cast<double>(b) - center) / config.peak_width;
      row[b] += static_cast<float>(height * std::exp(-0.5 * z * z));
    }
  }
  return scan;
}

SimSequence render_sequence(const World2D& world, const Trajectory& trajectory, std::size_t num_scans,
                            const SimConfig& config, double start_time, std::size_t threads) {
  config.validate();
  SimSequence seq;
  seq.scans.resize(num_scans);
  const auto start_of = [&](std::size_t j) { return start_time + static_cast<double>(j) * config.sweep_period; };

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t j = next++; j < num_scans; j = next++) {
      seq.scans[j] = render_scan(world, trajectory, start_of(j), config, j);
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < std::min(threads, num_scans); ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  for (std::size_t j = 0; j < num_scans; ++j) {
    const double end = start_of(j) + config.sweep_period;
    seq.ground_truth.entries.push_back({end, trajectory(end)});
  }
  return seq;
}

World2D parse_world(std::istream& in) {
  World2D world;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() != 5) {
      throw MalformedFile("world: expected 5 fields (x1 y1 x2 y2 reflectivity), got " + std::to_string(tokens.size()),
                          line_no);
    }
    double v[5];
    for (int i = 0; i < 5; ++i) {
      std::size_t used = 0;
      try {
        v[i] = std::stod(tokens[static_cast<std::size_t>(i)], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tokens[static_cast<std::size_t>(i)].size() || !std::isfinite(v[i])) {
        throw MalformedFile("world: not a number: " + tokens[static_cast<std::size_t>(i)], line_no);
      }
    }
    Segment seg{{v[0], v[1]}, {v[2], v[3]}, v[4]};
    if (!((seg.b - seg.a).norm() > 0.0)) throw MalformedFile("world: zero-length segment", line_no);
    if (!(seg.reflectivity > 0.0 && seg.reflectivity <= 1.0)) {
      throw MalformedFile("world: reflectivity must be in (0, 1]", line_no);
    }
    world.segments.push_back(seg);
  }
  return world;
}

World2D read_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedFile("cannot open " + path, 0);
  return parse_world(in);
}

void write_world(const World2D& world, std::ostream& out) {
  out.precision(17);
  out << "# x1 y1 x2 y2 reflectivity\n";
  for (const Segment& s : world.segments) {
    out << s.a.x() << ' ' << s.a.y() << ' ' << s.b.x() << ' ' << s.b.y() << ' ' << s.reflectivity << '\n';
  }
}

World2D make_corridor_world(double length, double width, std::uint64_t seed) {
  // A street lined with rectangular blocks; the gaps between blocks are
  // cross streets whose side facades face along the direction of travel.
  World2D world;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> block(10.0, 25.0), cross(6.0, 10.0), depth(8.0, 16.0), refl(0.6, 1.0),
      recess(0.8, 1.6);
  std::bernoulli_distribution has_recess(0.5);
  const double half = 0.5 * width;

  for (const double side : {1.0, -1.0}) {
    double x = -30.0;
    while (x < length + 30.0) {
      const double x0 = x, x1 = x + block(rng);
      const double far = side * (half + depth(rng));
      const double r = refl(rng);
      const Vec2d front0{x0, side * half}, front1{x1, side * half};
      if (has_recess(rng)) {
        // Recessed entrance in the middle third of the facade.
        const double a = x0 + (x1 - x0) / 3.0, b = x0 + 2.0 * (x1 - x0) / 3.0;
        const double back = side * (half + recess(rng));
        add_segment(world, front0, {a, side * half}, r);
        add_segment(world, {a, side * half}, {a, back}, r);
        add_segment(world, {a, back}, {b, back}, r);
        add_segment(world, {b, back}, {b, side * half}, r);
        add_segment(world, {b, side * half}, front1, r);
      } else {
        add_segment(world, front0, front1, r);
      }
      add_segment(world, front0, {x0, far}, r);
      add_segment(world, front1, {x1, far}, r);
      add_segment(world, {x0, far}, {x1, far}, r);
      x = x1 + cross(rng);
    }
  }
  return world;
}

World2D make_sparse_world(double length, double width, std::uint64_t seed) {
  // Isolated objects (parked cars, poles, wall pieces and corners) with wide gaps,
  // so a coarse neighbourhood blurs across corners.
  World2D world;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> step(5.0, 12.0), lateral(4.0, 0.5 * width), heading(0.0, std::numbers::pi),
      refl(0.5, 1.0), car_len(3.5, 5.0), car_wid(1.6, 2.0), arm(1.5, 3.5), pole(0.15, 0.4), wall(3.0, 8.0);
  std::uniform_int_distribution<int> kind(0, 3);
  std::bernoulli_distribution left(0.5);
  for (double x = -20.0; x < length + 20.0; x += step(rng)) {
    const Vec2d c{x, (left(rng) ? 1.0 : -1.0) * lateral(rng)};
    const double phi = heading(rng), r = refl(rng);
    const Mat2<double> rot = rotation(phi);
    const auto place = [&](const std::vector<Vec2d>& ring, bool closed) {
      for (std::size_t i = 0; i + 1 < ring.size() + (closed ? 1 : 0); ++i) {
        add_segment(world, c + rot * ring[i], c + rot * ring[(i + 1) % ring.size()], r);
      }
    };
    switch (kind(rng)) {
      case 0: {  // car
        const double hl = 0.5 * car_len(rng), hw = 0.5 * car_wid(rng);
        place({{-hl, -hw}, {hl, -hw}, {hl, hw}, {-hl, hw}}, true);
        break;
      }
      case 1: {  // wall corner
        place({{arm(rng), 0.0}, {0.0, 0.0}, {0.0, arm(rng)}}, false);
        break;
      }
      case 2: {  // free-standing wall
        const double h = 0.5 * wall(rng);
        place({{-h, 0.0}, {h, 0.0}}, false);
        break;
      }
      default: {  // pole
        const double rad = pole(rng);
        std::vector<Vec2d> ring;
        for (int i = 0; i < 8; ++i) {
          const double a = 2.0 * std::numbers::pi * i / 8.0;
          ring.emplace_back(rad * std::cos(a), rad * std::sin(a));
        }
        place(ring, true);
        break;
      }
    }
  }
  return world;
}

}  // namespace radar_odom
