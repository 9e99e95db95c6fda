#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "coopaloha/random.hpp"

namespace coopaloha {

/// Position on the unit square [-1/2, 1/2]^2.
struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

inline double squared_distance(Point2D a, Point2D b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Users, base stations and the radius-r adjacency between them.
///
/// adjacency[i] holds, in ascending order, every station within closed
/// Euclidean distance r of user i. Immutable once built.
class Deployment {
 public:
  Deployment(std::vector<Point2D> users, std::vector<Point2D> stations, double radius)
      : users_(std::move(users)), stations_(std::move(stations)), radius_(radius) {
    if (!(radius_ > 0.0)) throw std::invalid_argument("Deployment: radius must be positive");
    const double r2 = radius_ * radius_;
    adjacency_.resize(users_.size());
    for (std::size_t i = 0; i < users_.size(); ++i) {
      for (std::size_t l = 0; l < stations_.size(); ++l) {
        if (squared_distance(users_[i], stations_[l]) <= r2) adjacency_[i].push_back(l);
      }
    }
  }

  std::size_t user_count() const noexcept { return users_.size(); }
  std::size_t station_count() const noexcept { return stations_.size(); }
  double radius() const noexcept { return radius_; }

  const std::vector<Point2D>& user_positions() const noexcept { return users_; }
  const std::vector<Point2D>& station_positions() const noexcept { return stations_; }
  const std::vector<std::vector<std::size_t>>& adjacency() const noexcept { return adjacency_; }
  const std::vector<std::size_t>& adjacency(std::size_t user) const { return adjacency_.at(user); }

  /// Spatial degree D_i.
  std::size_t spatial_degree(std::size_t user) const { return adjacency_.at(user).size(); }
  bool covered(std::size_t user) const { return !adjacency_.at(user).empty(); }

  std::size_t covered_count() const noexcept {
    std::size_t c = 0;
    for (const auto& a : adjacency_) c += a.empty() ? 0 : 1;
    return c;
  }

  friend bool operator==(const Deployment&, const Deployment&) = default;

 private:
  std::vector<Point2D> users_;
  std::vector<Point2D> stations_;
  double radius_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// `count` independent uniform points on [-h, h]^2.
inline std::vector<Point2D> place_uniform(std::size_t count, double square_half_side, RandomStream& rng) {
  if (count == 0) throw std::invalid_argument("place_uniform: count must be at least 1");
  if (!(square_half_side > 0.0)) throw std::invalid_argument("place_uniform: half side must be positive");
  std::vector<Point2D> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double x = (2.0 * rng.uniform01() - 1.0) * square_half_side;
    const double y = (2.0 * rng.uniform01() - 1.0) * square_half_side;
    out.push_back({x, y});
  }
  return out;
}

/// Random deployment of n users and m stations on the unit square.
/// Stations are drawn from an independent child stream so that the station
/// layout does not depend on n.
inline Deployment build_deployment(std::size_t n, std::size_t m, double r, RandomStream& rng) {
  if (n == 0 || m == 0) throw std::invalid_argument("build_deployment: n and m must be at least 1");
  if (!(r > 0.0 && r < 0.5)) {
    throw std::invalid_argument("build_deployment: radius must lie in (0, 1/2), got " + std::to_string(r));
  }
  auto station_rng = rng.split(0x5747);
  auto stations = place_uniform(m, 0.5, station_rng);
  auto users = place_uniform(n, 0.5, rng);
  return Deployment(std::move(users), std::move(stations), r);
}

/// True iff p lies in the interior region |x|, |y| <= 1/2 - 2r.
inline bool is_nominal(Point2D p, double r) noexcept {
  const double bound = 0.5 - 2.0 * r;
  return std::abs(p.x) <= bound && std::abs(p.y) <= bound;
}

/// Radius r with m r^2 pi = delta.
inline double radius_for_delta(double delta, std::size_t m) {
  if (!(delta > 0.0) || m == 0) throw std::invalid_argument("radius_for_delta: need delta > 0 and m >= 1");
  const double r = std::sqrt(delta / (static_cast<double>(m) * std::numbers::pi));
  if (!(r < 0.5)) {
    throw std::invalid_argument("radius_for_delta: radius " + std::to_string(r) + " is not below 1/2");
  }
  return r;
}

}  // namespace coopaloha
