#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "dess/geometry.hpp"

namespace dess {

struct Sphere {
  Vec3 center;
  double radius = 0.0;

  double signed_distance(const Vec3& p) const { return (p - center).norm() - radius; }

  /// Smallest ray parameter s > 0 with origin + s * dir on the surface.
  /// `dir` need not be unit length.
  std::optional<double> intersect(const Vec3& origin, const Vec3& dir) const {
    const Vec3 oc = origin - center;
    const double a = dir.dot(dir);
    const double half_b = oc.dot(dir);
    const double c = oc.dot(oc) - radius * radius;
    const double disc = half_b * half_b - a * c;
    if (disc < 0.0) return std::nullopt;
    const double root = std::sqrt(disc);
    const double near = (-half_b - root) / a;
    if (near > 0.0) return near;
    const double far = (-half_b + root) / a;
    if (far > 0.0) return far;
    return std::nullopt;
  }
};

/// Axis-aligned box, used for walls.
struct Box {
  Vec3 min;
  Vec3 max;

  double signed_distance(const Vec3& p) const {
    const Vec3 c = (min + max) * 0.5;
    const Vec3 h = (max - min) * 0.5;
    const Vec3 q{std::abs(p.x - c.x) - h.x, std::abs(p.y - c.y) - h.y, std::abs(p.z - c.z) - h.z};
    const Vec3 outside{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
    return outside.norm() + std::min(std::max({q.x, q.y, q.z}), 0.0);
  }

  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
  }

  /// Slab-method ray intersection; returns the entry parameter if positive,
  /// otherwise the exit parameter (origin inside the box).
  std::optional<double> intersect(const Vec3& origin, const Vec3& dir) const {
    double t_enter = -std::numeric_limits<double>::infinity();
    double t_exit = std::numeric_limits<double>::infinity();
    const double o[3] = {origin.x, origin.y, origin.z};
    const double d[3] = {dir.x, dir.y, dir.z};
    const double lo[3] = {min.x, min.y, min.z};
    const double hi[3] = {max.x, max.y, max.z};
    for (int i = 0; i < 3; ++i) {
      if (d[i] == 0.0) {
        if (o[i] < lo[i] || o[i] > hi[i]) return std::nullopt;
        continue;
      }
      double t0 = (lo[i] - o[i]) / d[i];
      double t1 = (hi[i] - o[i]) / d[i];
      if (t0 > t1) std::swap(t0, t1);
      t_enter = std::max(t_enter, t0);
      t_exit = std::min(t_exit, t1);
    }
    if (t_enter > t_exit) return std::nullopt;
    if (t_enter > 0.0) return t_enter;
    if (t_exit > 0.0) return t_exit;
    return std::nullopt;
  }
};

/// Ground-truth obstacle set.
struct World {
  std::vector<Sphere> spheres;
  std::vector<Box> boxes;
  Box bounds{{0.0, -5.0, 0.0}, {15.0, 5.0, 10.0}};

  /// Signed distance to the nearest obstacle surface (negative inside).
  double signed_distance(const Vec3& p) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s : spheres) d = std::min(d, s.signed_distance(p));
    for (const auto& b : boxes) d = std::min(d, b.signed_distance(p));
    return d;
  }

  bool occupied(const Vec3& p) const { return signed_distance(p) < 0.0; }

  bool empty() const { return spheres.empty() && boxes.empty(); }
};

}  // namespace dess
