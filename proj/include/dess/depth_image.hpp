#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dess/errors.hpp"

namespace dess {

/// A single depth frame: row-major metric depths along the camera z axis.
/// A stored value of 0 means "no return" (nothing within sensor range).
class DepthImage {
 public:
  static constexpr float kInvalid = 0.0f;

  DepthImage() = default;

  DepthImage(int width, int height, float fill = kInvalid)
      : width_(width), height_(height), data_(checked_size(width, height), fill) {
    check_value(fill);
  }

  DepthImage(int width, int height, std::vector<float> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != checked_size(width, height)) {
      throw DomainError("depth buffer length does not match image size");
    }
    for (float v : data_) check_value(v);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  std::span<const float> data() const { return data_; }

  bool contains(long x, long y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  /// Stored depth at (x, y), or nullopt for a no-return pixel.
  std::optional<float> query(long x, long y) const {
    if (!contains(x, y)) throw OutOfBounds(x, y, width_, height_);
    const float d = raw(x, y);
    if (d == kInvalid) return std::nullopt;
    return d;
  }

  /// Unchecked access; the caller guarantees (x, y) is inside the image.
  float raw(long x, long y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  void set(long x, long y, float depth) {
    if (!contains(x, y)) throw OutOfBounds(x, y, width_, height_);
    check_value(depth);
    data_[static_cast<std::size_t>(y) * width_ + x] = depth;
  }

  /// Nearest integer pixel to a continuous coordinate, clamped into the image.
  long clamp_x(double px) const { return clamp_index(px, width_); }
  long clamp_y(double py) const { return clamp_index(py, height_); }

 private:
  static std::size_t checked_size(int width, int height) {
    if (width <= 0 || height <= 0) throw DomainError("depth image dimensions must be positive");
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  static void check_value(float v) {
    if (!std::isfinite(v) || v < 0.0f) throw DomainError("depth values must be finite and >= 0");
  }

  static long clamp_index(double p, int n) {
    const long i = std::lround(p);
    if (i < 0) return 0;
    if (i > n - 1) return n - 1;
    return i;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

struct NearestPoint {
  int x = 0;
  int y = 0;
  float depth = 0.0f;
};

/// Closest valid return in the frame. Ties resolve to the first pixel in
/// row-major order.
inline NearestPoint nearest_point(const DepthImage& img) {
  const auto data = img.data();
  std::size_t best = data.size();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] == DepthImage::kInvalid) continue;
    if (best == data.size() || data[i] < data[best]) best = i;
  }
  if (best == data.size()) throw NoValidPixel();
  return {static_cast<int>(best % img.width()), static_cast<int>(best / img.width()), data[best]};
}

}  // namespace dess
