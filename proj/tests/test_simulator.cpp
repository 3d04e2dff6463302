#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "dess/simulator.hpp"

using namespace dess;

namespace {

const CameraIntrinsics kCam;

EpisodeConfig deterministic_episode(Policy policy) {
  EpisodeConfig cfg;
  cfg.policy = policy;
  cfg.planner.budget_mode = BudgetMode::Candidates;
  cfg.planner.candidate_budget = 300;
  return cfg;
}

bool same_sphere(const Sphere& a, const Sphere& b) {
  return a.center.x == b.center.x && a.center.y == b.center.y && a.center.z == b.center.z &&
         a.radius == b.radius;
}

}  // namespace

TEST(Scenario, LevelsAreNested) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const World easy = generate_scenario({Level::Easy, seed});
    const World medium = generate_scenario({Level::Medium, seed});
    const World hard = generate_scenario({Level::Hard, seed});
    ASSERT_EQ(easy.spheres.size(), 29u);
    ASSERT_EQ(medium.spheres.size(), 51u);
    ASSERT_EQ(hard.spheres.size(), 67u);
    for (std::size_t i = 0; i < easy.spheres.size(); ++i) {
      EXPECT_TRUE(same_sphere(easy.spheres[i], medium.spheres[i]));
    }
    for (std::size_t i = 0; i < medium.spheres.size(); ++i) {
      EXPECT_TRUE(same_sphere(medium.spheres[i], hard.spheres[i]));
    }
  }
}

TEST(Scenario, StartAndGoalKeepClearance) {
  const ScenarioParams p;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (const Sphere& s : generate_scenario({Level::Hard, seed}).spheres) {
      const double keep = s.radius + p.vehicle_radius + p.clearance;
      EXPECT_GE((s.center - p.start).norm(), keep);
      EXPECT_GE((s.center - p.goal).norm(), keep);
      EXPECT_GE(s.radius, 0.05);
      EXPECT_LE(s.radius, 2.0);
      EXPECT_TRUE(p.bounds.contains(s.center));
    }
  }
}

TEST(Scenario, DeterministicForSeed) {
  const World a = generate_scenario({Level::Hard, 9});
  const World b = generate_scenario({Level::Hard, 9});
  const World c = generate_scenario({Level::Hard, 10});
  for (std::size_t i = 0; i < a.spheres.size(); ++i) EXPECT_TRUE(same_sphere(a.spheres[i], b.spheres[i]));
  EXPECT_FALSE(same_sphere(a.spheres[0], c.spheres[0]));
}

TEST(Scenario, GenerationFailureWhenNothingFits) {
  ScenarioParams p;
  p.bounds = Box{{-0.1, -0.1, 0.9}, {0.1, 0.1, 1.1}};
  p.max_rejections = 100;
  EXPECT_THROW(generate_scenario({Level::Easy, 1}, p), GenerationFailure);
}

TEST(Render, EmptyWorldHasNoReturns) {
  const DepthImage img = render_depth(World{}, Pose({0, 0, 1}, 0.0), kCam, 10.0);
  for (float d : img.data()) EXPECT_EQ(d, DepthImage::kInvalid);
}

TEST(Render, SphereOnOpticalAxis) {
  World world;
  world.spheres.push_back({{5.0, 0.0, 0.0}, 1.0});
  const DepthImage img = render_depth(world, Pose({0, 0, 0}, 0.0), kCam, 10.0);
  ASSERT_TRUE(img.query(160, 120).has_value());
  EXPECT_NEAR(*img.query(160, 120), 4.0f, 1e-5);
  EXPECT_FALSE(img.query(0, 0).has_value());
}

TEST(Render, SphereBehindCameraIsInvisible) {
  World world;
  world.spheres.push_back({{-5.0, 0.0, 0.0}, 1.0});
  const DepthImage img = render_depth(world, Pose({0, 0, 0}, 0.0), kCam, 10.0);
  for (float d : img.data()) EXPECT_EQ(d, DepthImage::kInvalid);
}

TEST(Render, BeyondMaxRangeIsNoReturn) {
  World world;
  world.spheres.push_back({{15.0, 0.0, 0.0}, 1.0});
  const DepthImage img = render_depth(world, Pose({0, 0, 0}, 0.0), kCam, 10.0);
  EXPECT_FALSE(img.query(160, 120).has_value());
}

TEST(Render, WallDepthIsCameraZ) {
  const DepthImage img = render_depth(wall_scenario(), Pose({0, 0, 1}, 0.0), kCam, 10.0);
  for (int x : {40, 100, 160, 280}) {
    for (int y : {20, 120, 160}) {
      ASSERT_TRUE(img.query(x, y).has_value());
      EXPECT_NEAR(*img.query(x, y), 7.0f, 1e-5);
    }
  }
}

TEST(Render, YawedCameraSeesRotatedScene) {
  World world;
  world.spheres.push_back({{0.0, 5.0, 0.0}, 1.0});
  const DepthImage img =
      render_depth(world, Pose({0, 0, 0}, std::numbers::pi / 2), kCam, 10.0);
  ASSERT_TRUE(img.query(160, 120).has_value());
  EXPECT_NEAR(*img.query(160, 120), 4.0f, 1e-5);
}

TEST(Render, ReturnsLieOnObstacleSurfaces) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    World world = generate_scenario({Level::Hard, seed});
    world.boxes.push_back(Box{{9.0, -6.0, -1.0}, {9.5, 6.0, 7.0}});
    const Pose pose({0.0, 0.0, 1.0}, 0.3 * static_cast<double>(seed) - 0.6);
    const DepthImage img = render_depth(world, pose, kCam, 10.0);
    int valid = 0;
    for (int y = 0; y < img.height(); y += 3) {
      for (int x = 0; x < img.width(); x += 3) {
        const auto d = img.query(x, y);
        if (!d) continue;
        ++valid;
        const Vec3 p = camera_to_world(pose, deproject(x, y, *d, kCam));
        EXPECT_LT(std::abs(world.signed_distance(p)), 1e-3);
      }
    }
    EXPECT_GT(valid, 100);
  }
}

TEST(StepVehicle, TracksTrajectoryToRest) {
  const PolynomialTrajectory traj(VehicleState{}, {2.0, 1.0, 0.5}, 2.0);
  const Command cmd = Command::track(traj);
  VehicleState s;
  double t = 0.0;
  for (int i = 0; i < 200; ++i, t += 0.01) s = step_vehicle(s, cmd, t, 0.01, 0.0);
  EXPECT_LT((s.position - Vec3{2.0, 1.0, 0.5}).norm(), 1e-9);
  EXPECT_LT(s.velocity.norm(), 1e-9);
}

TEST(StepVehicle, SteerRotatesWithinRateLimit) {
  const Command cmd = Command::steer({1, 2, 3}, 0.6, -1);
  VehicleState s;
  s.position = {1, 2, 3};
  for (int i = 0; i < 100; ++i) s = step_vehicle(s, cmd, i * 0.01, 0.01, 0.6);
  EXPECT_NEAR(s.yaw, 0.6, 1e-12);
  EXPECT_LT((s.position - Vec3{1, 2, 3}).norm(), 1e-15);

  VehicleState r;
  r = step_vehicle(r, cmd, 0.0, 0.1, 3.0);
  EXPECT_NEAR(r.yaw, 0.15, 1e-12);
}

TEST(StepVehicle, HalfStepsComposeExactly) {
  const PolynomialTrajectory traj(VehicleState{}, {1.0, -1.0, 0.5}, 1.5);
  const Command cmd = Command::track(traj);
  const VehicleState once = step_vehicle(VehicleState{}, cmd, 0.3, 0.02, 0.01);
  VehicleState twice = step_vehicle(VehicleState{}, cmd, 0.3, 0.01, 0.01);
  twice = step_vehicle(twice, cmd, 0.31, 0.01, 0.01);
  EXPECT_LT((once.position - twice.position).norm(), 1e-12);
  EXPECT_LT((once.velocity - twice.velocity).norm(), 1e-12);
  EXPECT_NEAR(once.yaw, twice.yaw, 1e-12);
}

TEST(StepVehicle, RejectsNonPositiveStep) {
  EXPECT_THROW(step_vehicle(VehicleState{}, Command::keep(), 0.0, 0.0, 0.0), DomainError);
}

TEST(Episode, EmptyWorldReachesGoal) {
  EpisodeConfig cfg = deterministic_episode(Policy::Dess);
  cfg.goal = {5.0, 0.0, 1.0};
  Rng rng(1);
  const TrialResult r = run_episode(World{}, cfg, rng);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.failure_kind, FailureKind::None);
  EXPECT_LE(r.distance_travelled, 1.1 * 5.0);
  EXPECT_GE(r.distance_travelled, 4.5 - 1e-9);
  EXPECT_EQ(r.steer_episodes, 0);
}

TEST(Episode, WallDessSucceedsAfterSteering) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Rng rng(seed);
    const TrialResult r = run_episode(wall_scenario(), deterministic_episode(Policy::Dess), rng);
    EXPECT_TRUE(r.success) << "seed " << seed;
    EXPECT_GE(r.steer_episodes, 1);
    EXPECT_LE(r.steer_episodes, 2);
  }
}

TEST(Episode, WallFixedYawingTimesOut) {
  EpisodeConfig cfg = deterministic_episode(Policy::FixedYawing);
  cfg.timeout = 40.0;
  Rng rng(0);
  const TrialResult r = run_episode(wall_scenario(), cfg, rng);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.failure_kind, FailureKind::Timeout);
  EXPECT_EQ(r.steer_episodes, 0);
}

TEST(Episode, DeterministicInCandidateMode) {
  const World world = generate_scenario({Level::Medium, 3});
  const EpisodeConfig cfg = deterministic_episode(Policy::Dess);
  Rng a(5), b(5);
  const TrialResult x = run_episode(world, cfg, a);
  const TrialResult y = run_episode(world, cfg, b);
  EXPECT_EQ(x.success, y.success);
  EXPECT_EQ(x.failure_kind, y.failure_kind);
  EXPECT_EQ(x.elapsed, y.elapsed);
  EXPECT_EQ(x.distance_travelled, y.distance_travelled);
  EXPECT_EQ(x.steer_episodes, y.steer_episodes);
  EXPECT_EQ(x.frames, y.frames);
}

TEST(Episode, SuccessImpliesNoContactAtAnyFrame) {
  const EpisodeConfig cfg = deterministic_episode(Policy::Dess);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const World world = generate_scenario({Level::Hard, seed});
    double closest = std::numeric_limits<double>::infinity();
    Rng rng(seed);
    const TrialResult r = run_episode(world, cfg, rng, [&](const FrameTrace& f) {
      closest = std::min(closest, world.signed_distance(f.state.position));
    });
    EXPECT_EQ(r.success, r.failure_kind == FailureKind::None);
    if (r.success) { EXPECT_GE(closest, cfg.planner.radius); }
  }
}

TEST(EpisodeConfig, Validation) {
  EpisodeConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.timeout = 0.0;
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Names, RoundTrip) {
  for (Level l : kAllLevels) EXPECT_EQ(parse_level(to_string(l)), l);
  for (Policy p : {Policy::Dess, Policy::FixedYawing}) EXPECT_EQ(parse_policy(to_string(p)), p);
  EXPECT_FALSE(parse_level("impossible").has_value());
  EXPECT_FALSE(parse_policy("none").has_value());
}
