#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dess/depth_image.hpp"
#include "dess/geometry.hpp"
#include "dess/planner.hpp"
#include "dess/random.hpp"
#include "dess/steering.hpp"
#include "dess/trajectory.hpp"
#include "dess/world.hpp"

namespace dess {

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

enum class Level { Easy, Medium, Hard };

inline constexpr std::array<Level, 3> kAllLevels{Level::Easy, Level::Medium, Level::Hard};

inline int obstacle_count(Level level) {
  switch (level) {
    case Level::Easy: return 29;
    case Level::Medium: return 51;
    case Level::Hard: return 67;
  }
  return 0;
}

inline std::string_view to_string(Level level) {
  switch (level) {
    case Level::Easy: return "easy";
    case Level::Medium: return "medium";
    case Level::Hard: return "hard";
  }
  return "?";
}

inline std::optional<Level> parse_level(std::string_view s) {
  for (Level l : kAllLevels) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

struct ScenarioSpec {
  Level level = Level::Easy;
  std::uint64_t seed = 0;
};

struct ScenarioParams {
  Box bounds{{0.0, -5.0, 0.0}, {15.0, 5.0, 10.0}};
  Vec3 start{0.0, 0.0, 1.0};
  Vec3 goal{17.0, 0.0, 5.0};
  double min_diameter = 0.1;
  double max_diameter = 4.0;
  double vehicle_radius = 0.3;
  double clearance = 0.3;  ///< extra free space kept around start and goal
  int max_rejections = 10000;
};

/// Draws the hard scenario's spheres from the seed and keeps the first
/// 29 / 51 / 67 of them, so every easier level is a subset of the harder ones.
inline World generate_scenario(const ScenarioSpec& spec, const ScenarioParams& params = {}) {
  Rng rng(spec.seed);
  World world;
  world.bounds = params.bounds;
  const int wanted = obstacle_count(spec.level);
  const int total = obstacle_count(Level::Hard);
  int rejections = 0;
  for (int drawn = 0; drawn < total;) {
    Sphere s;
    s.center = {uniform_real(rng, params.bounds.min.x, params.bounds.max.x),
                uniform_real(rng, params.bounds.min.y, params.bounds.max.y),
                uniform_real(rng, params.bounds.min.z, params.bounds.max.z)};
    s.radius = 0.5 * uniform_real(rng, params.min_diameter, params.max_diameter);
    const double keep_out = s.radius + params.vehicle_radius + params.clearance;
    if ((s.center - params.start).norm() < keep_out || (s.center - params.goal).norm() < keep_out) {
      if (++rejections >= params.max_rejections) {
        throw GenerationFailure("scenario generation exceeded " +
                                std::to_string(params.max_rejections) + " rejected draws");
      }
      continue;
    }
    if (drawn < wanted) world.spheres.push_back(s);
    ++drawn;
  }
  return world;
}

/// A 12 m wide, 8 m tall, 0.5 m thick wall across the start-goal line.
inline World wall_scenario() {
  World world;
  world.boxes.push_back(Box{{7.0, -6.0, -1.0}, {7.5, 6.0, 7.0}});
  return world;
}

/// A single radius-4 sphere centred on the start-goal line.
inline World spheroid_scenario(const Vec3& start = {0.0, 0.0, 1.0},
                               const Vec3& goal = {17.0, 0.0, 5.0}) {
  World world;
  world.spheres.push_back(Sphere{(start + goal) * 0.5, 4.0});
  return world;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace detail {

// Pixel interval covering the directions u/z of a ball whose projection onto
// the (u, z) plane is the disc (cu, cz, r). Returns false if nothing is in front.
inline bool projected_interval(double cu, double cz, double r, double focal, double center,
                               int size, int& lo, int& hi) {
  const double dist = std::hypot(cu, cz);
  if (dist <= r) {
    lo = 0;
    hi = size - 1;
    return true;
  }
  const double mid = std::atan2(cu, cz);
  const double half = std::asin(r / dist);
  const double a0 = mid - half;
  const double a1 = mid + half;
  constexpr double kRight = 0.5 * std::numbers::pi;
  if (a1 <= -kRight || a0 >= kRight) return false;
  const double p0 = a0 <= -kRight ? -std::numeric_limits<double>::infinity()
                                  : center + focal * std::tan(a0);
  const double p1 = a1 >= kRight ? std::numeric_limits<double>::infinity()
                                 : center + focal * std::tan(a1);
  const double l = std::floor(p0) - 1.0;
  const double h = std::ceil(p1) + 1.0;
  if (h < 0.0 || l > size - 1) return false;
  lo = static_cast<int>(std::max(0.0, l));
  hi = static_cast<int>(std::min<double>(size - 1, h));
  return true;
}

}  // namespace detail

/// Ray-cast depth frame: each pixel-centre ray stores the camera-z depth of
/// its nearest positive hit; misses and hits beyond max_range are no-return.
inline DepthImage render_depth(const World& world, const Pose& pose, const CameraIntrinsics& k,
                               double max_range) {
  k.validate();
  const CameraAxes axes(pose.yaw);
  const std::size_t n = static_cast<std::size_t>(k.width) * k.height;
  std::vector<double> zbuf(n, std::numeric_limits<double>::infinity());

  // Camera-frame ray through pixel (i, j) is (a_i, b_j, 1); its parameter is the depth.
  std::vector<double> ray_x(k.width), ray_y(k.height);
  for (int i = 0; i < k.width; ++i) ray_x[i] = (i - k.center_x) / k.focal_x;
  for (int j = 0; j < k.height; ++j) ray_y[j] = (j - k.center_y) / k.focal_y;
  auto world_dir = [&](int i, int j) {
    return axes.right * ray_x[i] + axes.down * ray_y[j] + axes.forward;
  };

  for (const Sphere& s : world.spheres) {
    const Vec3 c = world_to_camera(pose, s.center);
    if (c.z + s.radius <= 0.0) continue;
    if (c.norm() - s.radius > max_range) continue;
    int x0, x1, y0, y1;
    if (!detail::projected_interval(c.x, c.z, s.radius, k.focal_x, k.center_x, k.width, x0, x1)) continue;
    if (!detail::projected_interval(c.y, c.z, s.radius, k.focal_y, k.center_y, k.height, y0, y1)) continue;
    // Camera-frame ray-sphere test: |s * ray - c|^2 = r^2.
    const double cc = c.dot(c) - s.radius * s.radius;
    for (int j = y0; j <= y1; ++j) {
      const double ry = ray_y[j];
      const double a_row = ry * ry + 1.0;
      const double b_row = ry * c.y + c.z;
      double* row = &zbuf[static_cast<std::size_t>(j) * k.width];
      for (int i = x0; i <= x1; ++i) {
        const double rx = ray_x[i];
        const double a = rx * rx + a_row;
        const double half_b = -(rx * c.x + b_row);
        const double disc = half_b * half_b - a * cc;
        const double root = std::sqrt(std::max(disc, 0.0));
        const double t0 = (-half_b - root) / a;
        const double t1 = (-half_b + root) / a;
        const double t = t0 > 0.0 ? t0 : t1;
        row[i] = (disc >= 0.0 && t > 0.0) ? std::min(row[i], t) : row[i];
      }
    }
  }
  for (const Box& b : world.boxes) {
    for (int j = 0; j < k.height; ++j) {
      for (int i = 0; i < k.width; ++i) {
        if (auto t = b.intersect(pose.position, world_dir(i, j))) {
          double& z = zbuf[static_cast<std::size_t>(j) * k.width + i];
          z = std::min(z, *t);
        }
      }
    }
  }

  std::vector<float> data(n, DepthImage::kInvalid);
  for (std::size_t p = 0; p < n; ++p) {
    const double z = zbuf[p];
    if (!std::isfinite(z)) continue;
    // Range is Euclidean along the ray, depth is its z component.
    const double ray_len2 = ray_x[p % k.width] * ray_x[p % k.width] +
                            ray_y[p / k.width] * ray_y[p / k.width] + 1.0;
    if (z * std::sqrt(ray_len2) > max_range) continue;
    data[p] = static_cast<float>(z);
  }
  return DepthImage(k.width, k.height, std::move(data));
}

// ---------------------------------------------------------------------------
// Vehicle
// ---------------------------------------------------------------------------

/// Moves `from` toward `to` by at most max_step, along the shorter arc.
inline double rate_limited_yaw(double from, double to, double max_step) {
  const double err = normalize_angle(to - from);
  return normalize_angle(from + std::clamp(err, -max_step, max_step));
}

/// Idealized tracking for one control step. `command_time` is the time the
/// command has already been executing; trajectories are followed exactly and
/// steer commands hold the setpoint position. Yaw slews toward
/// `yaw_setpoint` at no more than `yaw_rate_limit`.
inline VehicleState step_vehicle(const VehicleState& state, const Command& cmd,
                                 double command_time, double dt, double yaw_setpoint,
                                 double yaw_rate_limit = 1.5) {
  if (!(dt > 0.0)) throw DomainError("vehicle step must be positive");
  VehicleState next = state;
  switch (cmd.kind) {
    case CommandKind::Trajectory: {
      const KinematicSample s = cmd.trajectory->eval_clamped(command_time + dt);
      next.position = s.position;
      next.velocity = s.velocity;
      next.acceleration = s.acceleration;
      break;
    }
    case CommandKind::Steer:
      next.position = cmd.position_setpoint;
      next.velocity = {};
      next.acceleration = {};
      break;
    case CommandKind::Continue:
      next.velocity = {};
      next.acceleration = {};
      break;
  }
  next.yaw = rate_limited_yaw(state.yaw, yaw_setpoint, yaw_rate_limit * dt);
  return next;
}

// ---------------------------------------------------------------------------
// Episodes
// ---------------------------------------------------------------------------

enum class Policy { Dess, FixedYawing };

inline std::string_view to_string(Policy p) {
  return p == Policy::Dess ? "dess" : "fixed-yawing";
}

inline std::optional<Policy> parse_policy(std::string_view s) {
  if (s == "dess") return Policy::Dess;
  if (s == "fixed-yawing") return Policy::FixedYawing;
  return std::nullopt;
}

struct EpisodeConfig {
  Vec3 start{0.0, 0.0, 1.0};
  Vec3 goal{17.0, 0.0, 5.0};
  double goal_radius = 0.5;
  double timeout = 120.0;
  double frame_rate = 15.0;
  double control_rate = 100.0;
  double max_range = 10.0;
  double yaw_rate_limit = 1.5;
  Policy policy = Policy::Dess;
  PlannerConfig planner;    ///< sampler and cost are set from the policy
  SteeringConfig steering;  ///< control_period is set from control_rate

  void validate() const {
    if (!(timeout > 0.0) || !(frame_rate > 0.0) || !(control_rate > 0.0) ||
        !(goal_radius > 0.0) || !(max_range > 0.0) || !(yaw_rate_limit > 0.0)) {
      throw DomainError("episode timing parameters must be positive");
    }
    planner.validate();
    steering.validate();
  }
};

enum class FailureKind { None, Collision, Timeout };

inline std::string_view to_string(FailureKind f) {
  switch (f) {
    case FailureKind::None: return "none";
    case FailureKind::Collision: return "collision";
    case FailureKind::Timeout: return "timeout";
  }
  return "?";
}

struct TrialResult {
  bool success = false;
  FailureKind failure_kind = FailureKind::Timeout;
  double distance_travelled = 0.0;
  double elapsed = 0.0;
  int steer_episodes = 0;
  std::uint64_t frames = 0;
};

/// Per-frame snapshot handed to an optional observer of run_episode.
struct FrameTrace {
  double time = 0.0;
  VehicleState state;
  CommandKind command = CommandKind::Continue;
  double best_cost = 0.0;
  PlanCounters counters;
  int steer_episodes = 0;
  const PlanOutcome* outcome = nullptr;  ///< valid only during the callback
};

/// Planner settings implied by a navigation policy.
inline PlannerConfig policy_planner(const PlannerConfig& base, Policy policy) {
  PlannerConfig cfg = base;
  if (policy == Policy::Dess) {
    cfg.sampler = SamplerKind::DepthBased;
    cfg.cost = CostKind::Direction;
  } else {
    cfg.sampler = SamplerKind::Uniform;
    cfg.cost = CostKind::AverageVelocity;
  }
  return cfg;
}

/// Closed loop: a frame is rendered and planned at frame_rate; the vehicle
/// is stepped at control_rate. Ends at the goal, on ground-truth contact, or
/// at the timeout.
inline TrialResult run_episode(const World& world, const EpisodeConfig& cfg, Rng& rng,
                               const std::function<void(const FrameTrace&)>& observer = {}) {
  cfg.validate();
  const PlannerConfig pcfg = policy_planner(cfg.planner, cfg.policy);
  SteeringConfig scfg = cfg.steering;
  scfg.control_period = 1.0 / cfg.control_rate;
  const double ctrl_dt = scfg.control_period;
  const double frame_dt = 1.0 / cfg.frame_rate;
  const bool dess = cfg.policy == Policy::Dess;

  VehicleState state;
  state.position = cfg.start;
  state.yaw = bearing(cfg.goal - cfg.start);
  SteeringState st = SteeringState::initial(state);
  Command active = Command::keep();
  double command_time = 0.0;
  Vec3 local_goal = cfg.start;

  TrialResult result;
  const long ticks = static_cast<long>(std::ceil(cfg.timeout / ctrl_dt - 1e-9));
  double next_frame = 0.0;
  for (long tick = 0; tick < ticks; ++tick) {
    const double t = tick * ctrl_dt;
    if (t + 1e-9 >= next_frame) {
      next_frame += frame_dt;
      ++result.frames;
      const Pose pose(state.position, state.yaw);
      const DepthImage img = render_depth(world, pose, pcfg.intrinsics, cfg.max_range);
      const PlanOutcome outcome = plan(img, pose, state, cfg.goal, pcfg, rng);
      Command cmd = dess ? decide(outcome, st, img, state, frame_dt, scfg)
                         : (outcome.best ? Command::track(*outcome.best) : Command::keep());
      if (observer) {
        observer({t, state, cmd.kind, outcome.best_cost, outcome.counters, st.steer_episodes, &outcome});
      }
      if (cmd.kind == CommandKind::Trajectory) {
        local_goal = cmd.trajectory->endpoint();
        active = std::move(cmd);
        command_time = 0.0;
      } else if (cmd.kind == CommandKind::Steer) {
        if (active.kind != CommandKind::Steer) command_time = 0.0;
        active = std::move(cmd);
      }
    }

    double psi_d;
    if (dess) {
      const bool steering = active.kind == CommandKind::Steer;
      const double psi_r =
          steering ? world_steering_yaw(state.yaw, active.steering_sign, scfg, ctrl_dt) : 0.0;
      const Vec3 r_err = local_goal - state.position;
      const Vec3 facing = scfg.bearing_to_global_goal ? cfg.goal - state.position : r_err;
      psi_d = yaw_setpoint(r_err, bearing(facing), steering, psi_r, st.psi_d_prev, scfg);
    } else {
      psi_d = bearing(cfg.goal - state.position);
    }

    const VehicleState next =
        step_vehicle(state, active, command_time, ctrl_dt, psi_d, cfg.yaw_rate_limit);
    result.distance_travelled += (next.position - state.position).norm();
    state = next;
    command_time += ctrl_dt;
    result.elapsed = (tick + 1) * ctrl_dt;

    if (world.signed_distance(state.position) < pcfg.radius) {
      result.failure_kind = FailureKind::Collision;
      result.steer_episodes = st.steer_episodes;
      return result;
    }
    if ((state.position - cfg.goal).norm() < cfg.goal_radius) {
      result.success = true;
      result.failure_kind = FailureKind::None;
      result.steer_episodes = st.steer_episodes;
      return result;
    }
  }
  result.failure_kind = FailureKind::Timeout;
  result.steer_episodes = st.steer_episodes;
  return result;
}

}  // namespace dess
