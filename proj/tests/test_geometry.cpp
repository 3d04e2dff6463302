#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dess/geometry.hpp"
#include "dess/random.hpp"

using namespace dess;

namespace {

void expect_vec_near(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

}  // namespace

TEST(Project, OpticalAxisPointLandsOnPrincipalPoint) {
  const PixelDepth p = project({0.0, 0.0, 2.0}, CameraIntrinsics{});
  EXPECT_DOUBLE_EQ(p.pixel_x, 160.0);
  EXPECT_DOUBLE_EQ(p.pixel_y, 120.0);
  EXPECT_DOUBLE_EQ(p.depth, 2.0);
}

TEST(Project, FortyFiveDegreesReachesImageEdge) {
  const PixelDepth p = project({1.0, 0.0, 1.0}, CameraIntrinsics{});
  EXPECT_DOUBLE_EQ(p.pixel_x, 320.0);
}

TEST(Project, PointBehindCameraThrows) {
  EXPECT_THROW(project({0.0, 0.0, -1.0}, CameraIntrinsics{}), NonPositiveDepth);
  EXPECT_THROW(project({0.0, 0.0, 0.0}, CameraIntrinsics{}), NonPositiveDepth);
}

TEST(Deproject, PrincipalPoint) {
  expect_vec_near(deproject(160.0, 120.0, 3.0, CameraIntrinsics{}), {0.0, 0.0, 3.0}, 0.0);
}

TEST(Deproject, ImageEdge) {
  expect_vec_near(deproject(320.0, 120.0, 1.0, CameraIntrinsics{}), {1.0, 0.0, 1.0}, 1e-15);
}

TEST(Deproject, NonPositiveDepthThrows) {
  EXPECT_THROW(deproject(10.0, 10.0, 0.0, CameraIntrinsics{}), NonPositiveDepth);
  EXPECT_THROW(deproject(10.0, 10.0, -2.0, CameraIntrinsics{}), NonPositiveDepth);
}

TEST(Deproject, RoundTripWithProjectIsIdentity) {
  const CameraIntrinsics k;
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double px = uniform_real(rng, -0.5, 319.5);
    const double py = uniform_real(rng, -0.5, 239.5);
    const double d = uniform_real(rng, 0.05, 50.0);
    const PixelDepth back = project(deproject(px, py, d, k), k);
    EXPECT_NEAR(back.pixel_x, px, 1e-9 * std::abs(px) + 1e-12);
    EXPECT_NEAR(back.pixel_y, py, 1e-9 * std::abs(py) + 1e-12);
    EXPECT_NEAR(back.depth, d, 1e-9 * d);
  }
}

TEST(Intrinsics, FromFovMatchesDefaultCamera) {
  const CameraIntrinsics k = CameraIntrinsics::from_fov(320, 240, std::numbers::pi / 2);
  EXPECT_NEAR(k.focal_x, 160.0, 1e-9);
  EXPECT_NEAR(k.center_x, 160.0, 1e-12);
  EXPECT_NEAR(k.center_y, 120.0, 1e-12);
}

TEST(Intrinsics, InvalidValuesRejected) {
  CameraIntrinsics k;
  k.focal_x = 0.0;
  EXPECT_FALSE(k.valid());
  EXPECT_THROW(k.validate(), DomainError);
  k = CameraIntrinsics{};
  k.width = 0;
  EXPECT_THROW(k.validate(), DomainError);
}

TEST(Frames, ForwardAxisIsCameraZ) {
  const Pose pose({0.0, 0.0, 0.0}, 0.0);
  expect_vec_near(world_to_camera(pose, {1.0, 0.0, 0.0}), {0.0, 0.0, 1.0}, 1e-15);
}

TEST(Frames, YawQuarterTurn) {
  const Pose pose({0.0, 0.0, 0.0}, std::numbers::pi / 2);
  expect_vec_near(world_to_camera(pose, {0.0, 1.0, 0.0}), {0.0, 0.0, 1.0}, 1e-15);
}

TEST(Frames, RightAndDownAxes) {
  const Pose pose({0.0, 0.0, 0.0}, 0.0);
  // Camera x is to the right of the heading, camera y is down.
  expect_vec_near(world_to_camera(pose, {0.0, -1.0, 0.0}), {1.0, 0.0, 0.0}, 1e-15);
  expect_vec_near(world_to_camera(pose, {0.0, 0.0, -1.0}), {0.0, 1.0, 0.0}, 1e-15);
}

TEST(Frames, PointAheadMapsOntoOpticalAxis) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vec3 pos{uniform_real(rng, -5, 5), uniform_real(rng, -5, 5), uniform_real(rng, 0, 5)};
    const double yaw = uniform_real(rng, -3.1, 3.1);
    const double d = uniform_real(rng, 0.1, 10.0);
    const Pose pose(pos, yaw);
    const Vec3 ahead = pos + Vec3{std::cos(yaw), std::sin(yaw), 0.0} * d;
    expect_vec_near(world_to_camera(pose, ahead), {0.0, 0.0, d}, 1e-9);
  }
}

TEST(Frames, RoundTripIsIdentity) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Pose pose({uniform_real(rng, -10, 10), uniform_real(rng, -10, 10), uniform_real(rng, 0, 10)},
                    uniform_real(rng, -4, 4));
    const Vec3 p{uniform_real(rng, -20, 20), uniform_real(rng, -20, 20), uniform_real(rng, -20, 20)};
    expect_vec_near(camera_to_world(pose, world_to_camera(pose, p)), p, 1e-9);
    expect_vec_near(world_to_camera(pose, camera_to_world(pose, p)), p, 1e-9);
  }
}

TEST(Frames, PrecomputedAxesMatch) {
  const Pose pose({1.0, 2.0, 3.0}, 0.7);
  const CameraAxes axes(pose.yaw);
  const Vec3 p{4.0, -1.0, 2.0};
  expect_vec_near(world_to_camera(pose, axes, p), world_to_camera(pose, p), 0.0);
}

TEST(Angles, NormalizeIntoHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(normalize_angle(0.0), 0.0);
  EXPECT_NEAR(normalize_angle(3 * std::numbers::pi), std::numbers::pi, 1e-12);
  EXPECT_NEAR(normalize_angle(-std::numbers::pi), std::numbers::pi, 1e-12);
  EXPECT_NEAR(normalize_angle(2 * std::numbers::pi + 0.25), 0.25, 1e-12);
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const double a = normalize_angle(uniform_real(rng, -100, 100));
    EXPECT_GT(a, -std::numbers::pi);
    EXPECT_LE(a, std::numbers::pi);
  }
}

TEST(Angles, BearingOfPlanarVector) {
  EXPECT_NEAR(bearing({1.0, 1.0, 5.0}), std::numbers::pi / 4, 1e-15);
  EXPECT_NEAR(bearing({-1.0, 0.0, 0.0}), std::numbers::pi, 1e-15);
}

TEST(Vec, BasicAlgebra) {
  const Vec3 a{1.0, 2.0, 3.0}, b{-2.0, 0.5, 4.0};
  EXPECT_DOUBLE_EQ(a.dot(b), -2.0 + 1.0 + 12.0);
  const Vec3 c = a.cross(b);
  EXPECT_NEAR(c.dot(a), 0.0, 1e-12);
  EXPECT_NEAR(c.dot(b), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(Vec3(3.0, 4.0, 0.0).norm(), 5.0);
}
