#pragma once

#include <cmath>
#include <numbers>

#include "dess/errors.hpp"

namespace dess {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  constexpr double squared_norm() const { return dot(*this); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Wraps an angle to (-pi, pi].
inline double normalize_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

/// Pinhole model without distortion. Pixel coordinates are continuous; the
/// integer pixel (i, j) covers [i - 0.5, i + 0.5) and its center is (i, j).
/// The default principal point is (w/2, h/2), so pixel (w/2, h/2) lies on the
/// optical axis.
struct CameraIntrinsics {
  int width = 320;
  int height = 240;
  double focal_x = 160.0;
  double focal_y = 160.0;
  double center_x = 160.0;
  double center_y = 120.0;

  /// Square pixels, principal point at the image center.
  static CameraIntrinsics from_fov(int width, int height, double horizontal_fov_rad) {
    CameraIntrinsics k;
    k.width = width;
    k.height = height;
    k.focal_x = 0.5 * width / std::tan(0.5 * horizontal_fov_rad);
    k.focal_y = k.focal_x;
    k.center_x = 0.5 * width;
    k.center_y = 0.5 * height;
    return k;
  }

  bool valid() const {
    return width > 0 && height > 0 && focal_x > 0.0 && focal_y > 0.0 && center_x >= 0.0 &&
           center_x <= width && center_y >= 0.0 && center_y <= height;
  }

  void validate() const {
    if (!valid()) throw DomainError("invalid camera intrinsics");
  }
};

/// Vehicle pose: world-frame position and heading. Pitch and roll are not
/// modelled; the camera looks along the heading.
struct Pose {
  Vec3 position;
  double yaw = 0.0;

  Pose() = default;
  Pose(const Vec3& p, double psi) : position(p), yaw(normalize_angle(psi)) {}
};

struct PixelDepth {
  double pixel_x = 0.0;
  double pixel_y = 0.0;
  double depth = 0.0;
};

inline PixelDepth project(const Vec3& point_cam, const CameraIntrinsics& k) {
  if (!(point_cam.z > 0.0)) throw NonPositiveDepth(point_cam.z);
  return {k.center_x + k.focal_x * (point_cam.x / point_cam.z),
          k.center_y + k.focal_y * (point_cam.y / point_cam.z), point_cam.z};
}

inline Vec3 deproject(double pixel_x, double pixel_y, double depth, const CameraIntrinsics& k) {
  if (!(depth > 0.0)) throw NonPositiveDepth(depth);
  return {(pixel_x - k.center_x) * depth / k.focal_x, (pixel_y - k.center_y) * depth / k.focal_y,
          depth};
}

// Camera axes expressed in the world frame for a yaw-only vehicle:
//   forward (camera z) = ( cos(yaw),  sin(yaw), 0)
//   right   (camera x) = ( sin(yaw), -cos(yaw), 0)   heading rotated -90 deg about world z
//   down    (camera y) = ( 0,         0,       -1)
// right x down = forward, so the camera frame is right-handed.
struct CameraAxes {
  Vec3 right;
  Vec3 down;
  Vec3 forward;

  explicit CameraAxes(double yaw)
      : right(std::sin(yaw), -std::cos(yaw), 0.0),
        down(0.0, 0.0, -1.0),
        forward(std::cos(yaw), std::sin(yaw), 0.0) {}
};

/// Same as world_to_camera(pose, p) with the pose's axes precomputed.
inline Vec3 world_to_camera(const Pose& pose, const CameraAxes& axes, const Vec3& point_world) {
  const Vec3 d = point_world - pose.position;
  return {d.dot(axes.right), d.dot(axes.down), d.dot(axes.forward)};
}

inline Vec3 world_to_camera(const Pose& pose, const Vec3& point_world) {
  return world_to_camera(pose, CameraAxes(pose.yaw), point_world);
}

inline Vec3 camera_to_world(const Pose& pose, const Vec3& point_cam) {
  const CameraAxes axes(pose.yaw);
  return pose.position + axes.right * point_cam.x + axes.down * point_cam.y +
         axes.forward * point_cam.z;
}

/// Heading of the horizontal projection of `v`.
inline double bearing(const Vec3& v) { return std::atan2(v.y, v.x); }

}  // namespace dess
