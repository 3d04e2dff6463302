#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "dess/depth_image.hpp"
#include "dess/geometry.hpp"
#include "dess/trajectory.hpp"
#include "dess/world.hpp"

namespace dess {

struct CollisionParams {
  double radius = 0.3;          ///< vehicle radius, m
  double step = 0.02;           ///< time step between checked samples, s
  double z_near = 0.1;          ///< closer samples cannot be verified by the camera
  double start_clearance = 0.2; ///< samples this close to the start are the vehicle itself
  /// Beyond this distance from the start a sample's whole footprint must lie
  /// inside the image; closer in, the ball cannot fit in the frame and only
  /// its visible part is tested.
  double near_field = 1.0;
};

struct CollisionVerdict {
  bool free = true;
  double time_of_first_violation = 0.0;
  std::uint64_t samples = 0;         ///< trajectory samples evaluated
  std::uint64_t pixels_touched = 0;  ///< footprint pixels covered by those samples

  bool collision() const { return !free; }
};

/// Sample times 0, h, 2h, ..., T with h <= step and each spatial step at most
/// radius / 2.
inline int sample_intervals(const PolynomialTrajectory& traj, double step, double radius) {
  const double T = traj.duration();
  const int by_time = static_cast<int>(std::ceil(T / step - 1e-9));
  // 10% margin on the sampled peak speed covers the gap between samples.
  const double max_travel = 1.1 * peak_speed(traj) * T;
  const int by_space = static_cast<int>(std::ceil(max_travel / (0.5 * radius)));
  return std::max({1, by_time, by_space});
}

/// Minimum depth over any axis-aligned pixel rectangle in O(1)-ish lookups.
/// Level j stores, at (x, y), the minimum over [x, x + 2^j) x [y, y + 2^j)
/// clipped to the image. No-return pixels count as +infinity.
class WindowMinTable {
 public:
  explicit WindowMinTable(const DepthImage& img) : width_(img.width()), height_(img.height()) {
    const int levels = std::bit_width(static_cast<unsigned>(std::min(width_, height_)));
    levels_.resize(levels);
    auto& base = levels_[0];
    base.resize(img.size());
    const auto data = img.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      base[i] = data[i] == DepthImage::kInvalid ? kInf : data[i];
    }
    for (int j = 1; j < levels; ++j) {
      const auto& prev = levels_[j - 1];
      auto& cur = levels_[j];
      cur.resize(img.size());
      const int h = 1 << (j - 1);
      for (int y = 0; y < height_; ++y) {
        const int y2 = std::min(y + h, height_ - 1);
        const float* r0 = &prev[static_cast<std::size_t>(y) * width_];
        const float* r1 = &prev[static_cast<std::size_t>(y2) * width_];
        float* out = &cur[static_cast<std::size_t>(y) * width_];
        const int split = std::max(0, width_ - h);
        for (int x = 0; x < split; ++x) {
          out[x] = std::min(std::min(r0[x], r0[x + h]), std::min(r1[x], r1[x + h]));
        }
        for (int x = split; x < width_; ++x) {
          out[x] = std::min(std::min(r0[x], r0[width_ - 1]), std::min(r1[x], r1[width_ - 1]));
        }
      }
    }
  }

  /// Minimum over the inclusive rectangle [x0, x1] x [y0, y1] (inside the image).
  float min(int x0, int y0, int x1, int y1) const {
    const int sx = x1 - x0 + 1;
    const int sy = y1 - y0 + 1;
    const int k = std::bit_width(static_cast<unsigned>(std::min(sx, sy))) - 1;
    const int side = 1 << k;
    const auto& table = levels_[k];
    float m = kInf;
    // Cover the rectangle with (possibly overlapping) squares of side 2^k.
    for (int y = y0;; y += side) {
      const int yy = std::min(y, y1 - side + 1);
      const float* row = &table[static_cast<std::size_t>(yy) * width_];
      for (int x = x0;; x += side) {
        const int xx = std::min(x, x1 - side + 1);
        m = std::min(m, row[xx]);
        if (xx + side > x1) break;
      }
      if (yy + side > y1) break;
    }
    return m;
  }

  int width() const { return width_; }
  int height() const { return height_; }

  static constexpr float kInf = std::numeric_limits<float>::infinity();

 private:
  int width_;
  int height_;
  std::vector<std::vector<float>> levels_;
};

/// Conservative trajectory check against a single depth frame. A sample is
/// safe only if it is in front of the camera, projects inside the image, and
/// sits at least `radius` in front of every valid return inside its projected
/// footprint (a square window bounding the radius-r disk). Unknown space
/// outside the frame is unsafe; the neighbourhood of the start is exempt.
class DepthCollisionChecker {
 public:
  DepthCollisionChecker(const DepthImage& img, const CameraIntrinsics& k, const Pose& pose,
                        CollisionParams params = {})
      : k_(k), pose_(pose), axes_(pose.yaw), params_(params), table_(img) {
    if (img.width() != k.width || img.height() != k.height) {
      throw DomainError("depth image size does not match camera intrinsics");
    }
    if (!(params.radius > 0.0) || !(params.step > 0.0)) {
      throw DomainError("collision radius and step must be positive");
    }
  }

  const CollisionParams& params() const { return params_; }

  /// Half-width in pixels of the square bounding the image of a radius-r
  /// ball at depth z (the tangent cone, not the cross-section disc).
  int half_window(double z) const {
    const double r = params_.radius;
    const double limit = static_cast<double>(std::max(k_.width, k_.height));
    if (z <= r) return static_cast<int>(limit);
    const double f = std::max(k_.focal_x, k_.focal_y);
    return static_cast<int>(std::min(std::ceil(f * r / std::sqrt(z * z - r * r)), limit));
  }

  CollisionVerdict check(const PolynomialTrajectory& traj) const {
    CollisionVerdict verdict;
    const int n = sample_intervals(traj, params_.step, params_.radius);
    const double T = traj.duration();
    const Vec3 start = traj.start_state().position;
    const double clearance2 = params_.start_clearance * params_.start_clearance;
    const double near2 = params_.near_field * params_.near_field;
    for (int i = 0; i <= n; ++i) {
      const double t = (i == n) ? T : T * i / n;
      const Vec3 q_world = traj.position(t);
      ++verdict.samples;
      if ((q_world - start).squared_norm() <= clearance2) continue;
      const bool near = (q_world - start).squared_norm() <= near2;
      if (!point_free(q_world, !near, verdict.pixels_touched)) {
        verdict.free = false;
        verdict.time_of_first_violation = t;
        return verdict;
      }
    }
    return verdict;
  }

  /// Footprint test for a single world point. With `whole_footprint`, any
  /// part of the footprint outside the image counts as unknown, hence unsafe.
  bool point_free(const Vec3& q_world, bool whole_footprint,
                  std::uint64_t& pixels_touched) const {
    const Vec3 q = world_to_camera(pose_, axes_, q_world);
    if (q.z < params_.z_near) return false;
    const double px = k_.center_x + k_.focal_x * (q.x / q.z);
    const double py = k_.center_y + k_.focal_y * (q.y / q.z);
    const long ix = std::lround(px);
    const long iy = std::lround(py);
    if (ix < 0 || iy < 0 || ix >= k_.width || iy >= k_.height) return false;
    const int half = half_window(q.z);
    if (whole_footprint &&
        (ix - half < 0 || iy - half < 0 || ix + half >= k_.width || iy + half >= k_.height)) {
      return false;
    }
    const int x0 = std::max<int>(0, ix - half);
    const int x1 = std::min<int>(k_.width - 1, ix + half);
    const int y0 = std::max<int>(0, iy - half);
    const int y1 = std::min<int>(k_.height - 1, iy + half);
    pixels_touched += static_cast<std::uint64_t>(x1 - x0 + 1) * (y1 - y0 + 1);
    return block_free(q, x0, y0, x1, y1);
  }

 private:
  /// Upper bound on the depth at which any ray through pixels [lo, hi] of one
  /// axis can still be inside the ball, from that axis alone. Pixel centers
  /// are widened by half a pixel. Negative means no such ray meets the ball.
  static double axis_depth_bound(double lo_px, double hi_px, double center, double focal,
                                 double qc, double r) {
    const double a = (lo_px - 0.5 - center) / focal;
    const double b = (hi_px + 0.5 - center) / focal;
    if (a > 0.0) return (qc + r) / a;
    if (b < 0.0) return (r - qc) / -b;
    return std::numeric_limits<double>::infinity();
  }

  /// True when every ray through the block leaves the ball before reaching
  /// its return. Splits the block until the bound settles it.
  bool block_free(const Vec3& q, int x0, int y0, int x1, int y1) const {
    const double r = params_.radius;
    const double bx = axis_depth_bound(x0, x1, k_.center_x, k_.focal_x, q.x, r);
    const double by = axis_depth_bound(y0, y1, k_.center_y, k_.focal_y, q.y, r);
    if (bx < 0.0 || by < 0.0) return true;
    const double reach = std::min({q.z + r, bx, by});
    if (reach <= static_cast<double>(table_.min(x0, y0, x1, y1))) return true;
    if (x0 == x1 && y0 == y1) return false;
    if (x1 - x0 >= y1 - y0) {
      const int xm = x0 + (x1 - x0) / 2;
      return block_free(q, x0, y0, xm, y1) && block_free(q, xm + 1, y0, x1, y1);
    }
    const int ym = y0 + (y1 - y0) / 2;
    return block_free(q, x0, y0, x1, ym) && block_free(q, x0, ym + 1, x1, y1);
  }

  CameraIntrinsics k_;
  Pose pose_;
  CameraAxes axes_;
  CollisionParams params_;
  WindowMinTable table_;
};

inline CollisionVerdict check(const PolynomialTrajectory& traj, const DepthImage& img,
                              const CameraIntrinsics& k, const Pose& pose, double radius,
                              double step) {
  CollisionParams params;
  params.radius = radius;
  params.step = step;
  return DepthCollisionChecker(img, k, pose, params).check(traj);
}

/// Ground-truth trajectory classes:
///   0 collision-free, 1 passes within the vehicle radius of an obstacle,
///   2 crosses occupied space but ends outside it, 3 ends inside occupied space.
enum class TrajectoryClass : int { Free = 0, TooClose = 1, PassesThrough = 2, EndsInside = 3 };

inline TrajectoryClass classify_ground_truth(const PolynomialTrajectory& traj, const World& world,
                                             double radius, double step) {
  if (world.occupied(traj.endpoint())) return TrajectoryClass::EndsInside;
  const int n = sample_intervals(traj, step, radius);
  const double T = traj.duration();
  bool near = false;
  for (int i = 0; i <= n; ++i) {
    const double t = (i == n) ? T : T * i / n;
    const double d = world.signed_distance(traj.position(t));
    if (d < 0.0) return TrajectoryClass::PassesThrough;
    if (d < radius) near = true;
  }
  return near ? TrajectoryClass::TooClose : TrajectoryClass::Free;
}

}  // namespace dess
