#pragma once

#include <optional>

#include "dess/depth_image.hpp"
#include "dess/geometry.hpp"
#include "dess/random.hpp"

namespace dess {

/// Reliable sensor range [lower, upper] in which endpoints are sampled.
struct SampleBounds {
  double lower = 1.0;
  double upper = 3.0;

  bool valid() const { return lower > 0.0 && lower < upper; }
  void validate() const {
    if (!valid()) throw DomainError("sample bounds must satisfy 0 < lower < upper");
  }
};

enum class SamplerKind { Uniform, DepthBased };

struct PixelSample {
  int pixel_x = 0;
  int pixel_y = 0;
  double depth = 0.0;
};

struct Candidate {
  int pixel_x = 0;
  int pixel_y = 0;
  double depth = 0.0;  ///< along camera z, after constraining for the depth-based sampler
  Vec3 endpoint_cam;
  Vec3 endpoint_world;
};

/// Uniform draw over pixels x depth. Pixel first, then depth; both samplers
/// consume the stream in this order so equal seeds give paired draws.
inline PixelSample sample_uniform(Rng& rng, const CameraIntrinsics& k, const SampleBounds& b) {
  PixelSample s;
  s.pixel_x = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(k.width)));
  s.pixel_y = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(k.height)));
  s.depth = uniform_real(rng, b.lower, b.upper);
  return s;
}

/// Shrinks the depth draw into the free segment [l, d_xy] in front of the
/// observed surface. Out-of-range or missing observations pass the draw
/// through unchanged; candidates closer than l are left for the collision
/// checker to reject.
inline double constrain_depth(double d_o, std::optional<double> d_xy, const SampleBounds& b) {
  if (!(d_o >= b.lower && d_o <= b.upper)) {
    throw DomainError("depth sample outside [lower, upper]");
  }
  if (!d_xy || *d_xy < b.lower || *d_xy > b.upper) return d_o;
  return (d_o - b.lower) * (*d_xy - b.lower) / (b.upper - b.lower) + b.lower;
}

namespace detail {

inline Candidate make_candidate(const PixelSample& s, double depth, const CameraIntrinsics& k,
                                const Pose& pose) {
  Candidate c;
  c.pixel_x = s.pixel_x;
  c.pixel_y = s.pixel_y;
  c.depth = depth;
  c.endpoint_cam = deproject(s.pixel_x, s.pixel_y, depth, k);
  c.endpoint_world = camera_to_world(pose, c.endpoint_cam);
  return c;
}

inline void check_dimensions(const DepthImage& img, const CameraIntrinsics& k) {
  if (img.width() != k.width || img.height() != k.height) {
    throw DomainError("depth image size does not match camera intrinsics");
  }
}

}  // namespace detail

inline Candidate depth_based_sample(Rng& rng, const DepthImage& img, const CameraIntrinsics& k,
                                    const SampleBounds& b, const Pose& pose) {
  detail::check_dimensions(img, k);
  const PixelSample s = sample_uniform(rng, k, b);
  const auto observed = img.query(s.pixel_x, s.pixel_y);
  const std::optional<double> d_xy =
      observed ? std::optional<double>(*observed) : std::nullopt;
  return detail::make_candidate(s, constrain_depth(s.depth, d_xy, b), k, pose);
}

inline Candidate sample_uniform_candidate(Rng& rng, const DepthImage& img,
                                          const CameraIntrinsics& k, const SampleBounds& b,
                                          const Pose& pose) {
  detail::check_dimensions(img, k);
  const PixelSample s = sample_uniform(rng, k, b);
  return detail::make_candidate(s, s.depth, k, pose);
}

inline Candidate sample_candidate(SamplerKind kind, Rng& rng, const DepthImage& img,
                                  const CameraIntrinsics& k, const SampleBounds& b,
                                  const Pose& pose) {
  return kind == SamplerKind::DepthBased ? depth_based_sample(rng, img, k, b, pose)
                                         : sample_uniform_candidate(rng, img, k, b, pose);
}

}  // namespace dess
