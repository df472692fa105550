#include "vanetagg/sim/mobility.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "vanetagg/error.hpp"

namespace vanetagg::sim {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

ManhattanGrid::ManhattanGrid(double width, double height, std::uint32_t blocks)
    : width_(width), height_(height), blocks_(blocks) {
  if (!(width > 0) || !(height > 0) || blocks == 0) fail(ErrorCode::kConfigError, "degenerate grid");
}

RoadPoint ManhattanGrid::random_point(Stream& rng) const {
  RoadPoint p;
  p.axis = rng.below(2) == 0 ? Axis::kHorizontal : Axis::kVertical;
  p.line = static_cast<std::uint32_t>(rng.below(lines()));
  if (p.axis == Axis::kHorizontal) {
    p.pos = {rng.uniform(0, width_), p.line * spacing_y()};
  } else {
    p.pos = {p.line * spacing_x(), rng.uniform(0, height_)};
  }
  return p;
}

std::string ManhattanGrid::road_name(Axis axis, std::uint32_t line) {
  return (axis == Axis::kHorizontal ? "H" : "V") + std::to_string(line);
}

Vec2 Trajectory::at(double time) const {
  if (time <= points_.front().time) return points_.front().pos;
  if (time >= points_.back().time) return points_.back().pos;
  auto it = std::upper_bound(points_.begin(), points_.end(), time,
                             [](double v, const Waypoint& w) { return v < w.time; });
  const Waypoint& b = *it;
  const Waypoint& a = *(it - 1);
  const double f = (time - a.time) / (b.time - a.time);
  return {a.pos.x + f * (b.pos.x - a.pos.x), a.pos.y + f * (b.pos.y - a.pos.y)};
}

double Trajectory::first_within(Vec2 c, double radius, double from, double until) const {
  if (from > until) return kNever;
  if (from < points_.front().time && distance(points_.front().pos, c) <= radius) return from;
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Waypoint& a = points_[i];
    const Waypoint& b = points_[i + 1];
    if (b.time < from) continue;
    if (a.time > until) break;
    const double lo = std::max(from, a.time) - a.time;
    const double hi = std::min(until, b.time) - a.time;
    const double span = b.time - a.time;
    const Vec2 v{(b.pos.x - a.pos.x) / span, (b.pos.y - a.pos.y) / span};
    const Vec2 d{a.pos.x - c.x, a.pos.y - c.y};
    // |d + v s|^2 <= radius^2 for s in [lo, hi]
    const double qa = v.x * v.x + v.y * v.y;
    const double qb = 2 * (v.x * d.x + v.y * d.y);
    const double qc = d.x * d.x + d.y * d.y - radius * radius;
    if (qa == 0) {
      if (qc <= 0) return a.time + lo;
      continue;
    }
    const double disc = qb * qb - 4 * qa * qc;
    if (disc < 0) continue;
    const double root = std::sqrt(disc);
    const double s1 = (-qb - root) / (2 * qa);
    const double s2 = (-qb + root) / (2 * qa);
    if (s2 < lo || s1 > hi) continue;
    return a.time + std::max(s1, lo);
  }
  if (until > points_.back().time && distance(points_.back().pos, c) <= radius) {
    return std::max(from, points_.back().time);
  }
  return kNever;
}

Trajectory random_trajectory(const ManhattanGrid& grid, double speed, double horizon, Stream& rng) {
  if (!(speed > 0)) fail(ErrorCode::kConfigError, "speed must be positive");
  const double sx = grid.spacing_x();
  const double sy = grid.spacing_y();
  const RoadPoint start = grid.random_point(rng);
  Vec2 pos = start.pos;
  // Unit heading along the grid axes.
  int dx = 0;
  int dy = 0;
  const int sign = rng.below(2) == 0 ? 1 : -1;
  if (start.axis == Axis::kHorizontal) {
    dx = sign;
  } else {
    dy = sign;
  }

  auto inside = [&](Vec2 p) { return p.x >= -1e-9 && p.x <= grid.width() + 1e-9 && p.y >= -1e-9 && p.y <= grid.height() + 1e-9; };
  auto snap = [](double v, double step) { return std::round(v / step) * step; };

  // Next intersection strictly ahead; reverse if the road ends here.
  auto next_stop = [&](Vec2 p, int hx, int hy) {
    if (hx != 0) {
      double k = hx > 0 ? std::floor(p.x / sx + 1e-9) + 1 : std::ceil(p.x / sx - 1e-9) - 1;
      return Vec2{k * sx, p.y};
    }
    double k = hy > 0 ? std::floor(p.y / sy + 1e-9) + 1 : std::ceil(p.y / sy - 1e-9) - 1;
    return Vec2{p.x, k * sy};
  };

  if (!inside(next_stop(pos, dx, dy))) {
    dx = -dx;
    dy = -dy;
  }

  std::vector<Waypoint> points{{0.0, pos}};
  double now = 0;
  while (now < horizon) {
    Vec2 stop = next_stop(pos, dx, dy);
    now += distance(pos, stop) / speed;
    pos = {snap(stop.x, sx), snap(stop.y, sy)};
    points.push_back({now, pos});

    struct Option {
      int hx, hy;
      double weight;
    };
    const std::array<Option, 3> options{{{dx, dy, 0.5}, {-dy, dx, 0.25}, {dy, -dx, 0.25}}};
    double total = 0;
    std::array<bool, 3> ok{};
    for (std::size_t i = 0; i < options.size(); ++i) {
      ok[i] = inside({pos.x + options[i].hx * sx, pos.y + options[i].hy * sy});
      if (ok[i]) total += options[i].weight;
    }
    if (total == 0) {
      dx = -dx;
      dy = -dy;
      continue;
    }
    double pick = rng.unit() * total;
    std::size_t chosen = options.size();
    for (std::size_t i = 0; i < options.size(); ++i) {
      if (!ok[i]) continue;
      chosen = i;
      if (pick < options[i].weight) break;
      pick -= options[i].weight;
    }
    dx = options[chosen].hx;
    dy = options[chosen].hy;
  }
  return Trajectory(std::move(points));
}

}  // namespace vanetagg::sim
