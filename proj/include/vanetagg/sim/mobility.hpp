#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "vanetagg/sim/random.hpp"

namespace vanetagg::sim {

struct Vec2 {
  double x = 0;
  double y = 0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

double distance(Vec2 a, Vec2 b);

enum class Axis : std::uint8_t { kHorizontal, kVertical };

struct RoadPoint {
  Vec2 pos;
  Axis axis;
  std::uint32_t line;
};

// blocks x blocks Manhattan grid: blocks + 1 streets per axis, edges included.
class ManhattanGrid {
 public:
  ManhattanGrid(double width, double height, std::uint32_t blocks);

  double width() const { return width_; }
  double height() const { return height_; }
  std::uint32_t lines() const { return blocks_ + 1; }
  double spacing_x() const { return width_ / blocks_; }
  double spacing_y() const { return height_ / blocks_; }

  RoadPoint random_point(Stream& rng) const;
  // "H3" is the third horizontal street from y = 0, "V0" the west edge.
  static std::string road_name(Axis axis, std::uint32_t line);

 private:
  double width_;
  double height_;
  std::uint32_t blocks_;
};

struct Waypoint {
  double time;
  Vec2 pos;
};

// Piecewise-linear path through intersections; constant speed.
class Trajectory {
 public:
  explicit Trajectory(std::vector<Waypoint> points) : points_(std::move(points)) {}

  const std::vector<Waypoint>& points() const { return points_; }
  // Clamped to the first and last waypoint outside the covered interval.
  Vec2 at(double time) const;
  // Earliest time in [from, until] at which the path is within `radius` of
  // `center`; +inf if never.
  double first_within(Vec2 center, double radius, double from, double until) const;

 private:
  std::vector<Waypoint> points_;
};

inline constexpr double kNever = std::numeric_limits<double>::infinity();

// Random start on a random street, then at each intersection straight with
// probability 1/2, left or right with 1/4 each, never leaving the area.
Trajectory random_trajectory(const ManhattanGrid& grid, double speed, double horizon, Stream& rng);

}  // namespace vanetagg::sim
