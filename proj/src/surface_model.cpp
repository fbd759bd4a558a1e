#include "radar_odom/surface_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "radar_odom/errors.hpp"

namespace radar_odom {

void SurfaceParams::validate() const {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) throw InvalidConfig("resolution must be > 0");
  if (min_neighbors < 3) throw InvalidConfig("min_neighbors must be >= 3");
  if (!(isotropy_reject_ratio > 0.0 && isotropy_reject_ratio <= 1.0))
    throw InvalidConfig("isotropy_reject_ratio must be in (0, 1]");
}

GridIndex::GridIndex(std::span<const Vec2d> positions, double cell_size) : cell_size_(cell_size) {
  for (std::size_t i = 0; i < positions.size(); ++i) {
    cells_[key(cell_coord(positions[i].x()), cell_coord(positions[i].y()))].push_back(i);
  }
}

std::vector<std::size_t> GridIndex::query(std::span<const Vec2d> positions, const Vec2d& center,
                                          double radius) const {
  std::vector<std::pair<double, std::size_t>> hits;
  if (cells_.empty() || !(radius >= 0.0)) return {};
  const std::int64_t x0 = cell_coord(center.x() - radius), x1 = cell_coord(center.x() + radius);
  const std::int64_t y0 = cell_coord(center.y() - radius), y1 = cell_coord(center.y() + radius);
  const double r2 = radius * radius;
  for (std::int64_t ix = x0; ix <= x1; ++ix) {
    for (std::int64_t iy = y0; iy <= y1; ++iy) {
      const auto it = cells_.find(key(ix, iy));
      if (it == cells_.end()) continue;
      for (std::size_t i : it->second) {
        const double d2 = (positions[i] - center).squaredNorm();
        if (d2 <= r2) hits.emplace_back(d2, i);
      }
    }
  }
  std::sort(hits.begin(), hits.end());
  std::vector<std::size_t> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(h.second);
  return out;
}

std::optional<std::size_t> GridIndex::nearest(std::span<const Vec2d> positions, const Vec2d& center,
                                              double radius) const {
  if (cells_.empty() || !(radius >= 0.0)) return std::nullopt;
  const std::int64_t x0 = cell_coord(center.x() - radius), x1 = cell_coord(center.x() + radius);
  const std::int64_t y0 = cell_coord(center.y() - radius), y1 = cell_coord(center.y() + radius);
  double best_d2 = radius * radius;
  std::optional<std::size_t> best;
  for (std::int64_t ix = x0; ix <= x1; ++ix) {
    for (std::int64_t iy = y0; iy <= y1; ++iy) {
      const auto it = cells_.find(key(ix, iy));
      if (it == cells_.end()) continue;
      for (std::size_t i : it->second) {
        const double d2 = (positions[i] - center).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && (!best || i < *best))) {
          best_d2 = d2;
          best = i;
        }
      }
    }
  }
  return best;
}

SurfacePointSet::SurfacePointSet(std::vector<OrientedSurfacePoint> points, double index_cell_size, Pose2d frame_pose)
    : points_(std::move(points)), frame_pose_(frame_pose) {
  means_.reserve(points_.size());
  for (const auto& p : points_) means_.push_back(p.mean);
  index_ = GridIndex(means_, index_cell_size);
}

std::vector<OrientedSurfacePoint> SurfacePointSet::radius_query(const Vec2d& center, double radius) const {
  std::vector<OrientedSurfacePoint> out;
  for (std::size_t i : index_.query(means_, center, radius)) out.push_back(points_[i]);
  return out;
}

std::optional<std::size_t> SurfacePointSet::nearest_within(const Vec2d& center, double radius) const {
  return index_.nearest(means_, center, radius);
}

std::vector<RadarPoint> motion_compensate(std::vector<RadarPoint> points, const Twist2d& body_velocity,
                                          double sweep_period) {
  if (body_velocity == Twist2d{}) return points;
  for (RadarPoint& p : points) {
    // Sensor motion between the measurement and sweep end.
    const Pose2d travelled = scale(body_velocity, sweep_period - p.relative_time);
    p.position = transform_point(inverse(travelled), p.position);
  }
  return points;
}

std::optional<OrientedSurfacePoint> fit_surface_point(std::span<const Vec2d> neighbourhood,
                                                       const SurfaceParams& params) {
  const std::size_t count = neighbourhood.size();
  if (count < static_cast<std::size_t>(params.min_neighbors) || count == 0) return std::nullopt;

  Vec2d mean = Vec2d::Zero();
  for (const Vec2d& p : neighbourhood) mean += p;
  mean /= static_cast<double>(count);

  SymMat2d cov;
  for (const Vec2d& p : neighbourhood) {
    const Vec2d d = p - mean;
    cov.a11 += d.x() * d.x();
    cov.a12 += d.x() * d.y();
    cov.a22 += d.y() * d.y();
  }
  const double inv = 1.0 / static_cast<double>(count);
  cov.a11 *= inv;
  cov.a12 *= inv;
  cov.a22 *= inv;

  const MinEigen<double> eig = eigen_min(cov, params.isotropy_reject_ratio);
  if (eig.degenerate) return std::nullopt;

  Vec2d normal = eig.vector.normalized();
  const double facing = normal.dot(-mean);
  const double tie = 1e-12 * std::max(1.0, mean.norm());
  if (facing < -tie) {
    normal = -normal;
  } else if (std::abs(facing) <= tie) {
    if (normal.y() < 0.0 || (normal.y() == 0.0 && normal.x() < 0.0)) normal = -normal;
  }

  OrientedSurfacePoint out;
  out.mean = mean;
  out.normal = normal;
  out.support_count = count;
  return out;
}

SurfacePointSet build_surface_points(std::span<const RadarPoint> points, const SurfaceParams& params) {
  params.validate();
  const double side = 0.5 * params.resolution;
  const double radius2 = params.resolution * params.resolution;

  const auto coord = [side](double v) { return static_cast<std::int64_t>(std::floor(v / side)); };
  // Ordered so the output is deterministic.
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec2d& p = points[i].position;
    if (!p.allFinite()) continue;
    cells[{coord(p.x()), coord(p.y())}].push_back(i);
  }

  std::vector<OrientedSurfacePoint> surface;
  std::vector<Vec2d> neighbourhood;
  for (const auto& [cell, members] : cells) {
    const Vec2d center{(static_cast<double>(cell.first) + 0.5) * side, (static_cast<double>(cell.second) + 0.5) * side};
    neighbourhood.clear();
    // A point within r of the center lies at most two cells away.
    for (std::int64_t dx = -2; dx <= 2; ++dx) {
      for (std::int64_t dy = -2; dy <= 2; ++dy) {
        const auto it = cells.find({cell.first + dx, cell.second + dy});
        if (it == cells.end()) continue;
        for (std::size_t i : it->second) {
          if ((points[i].position - center).squaredNorm() <= radius2) neighbourhood.push_back(points[i].position);
        }
      }
    }
    if (auto sp = fit_surface_point(neighbourhood, params)) surface.push_back(*sp);
  }
  return SurfacePointSet(std::move(surface), params.resolution);
}

}  // namespace radar_odom
