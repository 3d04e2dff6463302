#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "dess/collision.hpp"
#include "dess/depth_image.hpp"
#include "dess/geometry.hpp"
#include "dess/random.hpp"
#include "dess/sampling.hpp"
#include "dess/trajectory.hpp"

namespace dess {

enum class CostKind { Direction, AverageVelocity };

/// Wall-clock budgets depend on the machine; the candidate-count mode gives
/// identical outcomes everywhere.
enum class BudgetMode { WallClock, Candidates };

struct PlannerConfig {
  CameraIntrinsics intrinsics;
  SampleBounds bounds;
  double radius = 0.3;
  double v_des = 1.0;
  double budget = 0.010;                  ///< seconds, WallClock mode
  std::uint64_t candidate_budget = 300;   ///< candidates, Candidates mode
  BudgetMode budget_mode = BudgetMode::WallClock;
  double check_step = 0.02;
  double near_field = 1.0;  ///< m, see CollisionParams::near_field
  SamplerKind sampler = SamplerKind::DepthBased;
  CostKind cost = CostKind::Direction;
  DurationLimits durations;
  double peak_speed_factor = 2.0;  ///< reject trajectories faster than factor * v_des

  CollisionParams collision_params() const {
    CollisionParams p;
    p.radius = radius;
    p.step = check_step;
    p.near_field = near_field;
    return p;
  }

  void validate() const {
    intrinsics.validate();
    bounds.validate();
    if (!(radius > 0.0) || !(v_des > 0.0) || !(check_step > 0.0) ||
        !(near_field >= 0.0)) {
      throw DomainError("planner radius, speed, check step and near field must be valid");
    }
    if (budget_mode == BudgetMode::WallClock && !(budget > 0.0)) {
      throw DomainError("planner budget must be positive");
    }
    if (budget_mode == BudgetMode::Candidates && candidate_budget == 0) {
      throw DomainError("candidate budget must be positive");
    }
  }
};

struct PlanCounters {
  std::uint64_t sampled = 0;
  std::uint64_t cost_passed = 0;
  std::uint64_t collision_checked = 0;
  std::uint64_t collision_free = 0;
  std::uint64_t pixels_touched = 0;
};

struct Improvement {
  std::uint64_t candidate_index = 0;
  double cost = 0.0;
};

struct PlanOutcome {
  std::optional<PolynomialTrajectory> best;
  std::optional<Candidate> best_candidate;
  double best_cost = std::numeric_limits<double>::infinity();
  PlanCounters counters;
  std::vector<Improvement> improvements;  ///< every accepted best, in order
};

/// Cosine between the goal direction and the reversed motion direction:
/// -1 when the endpoint lies on the ray toward the goal, +1 directly away.
inline double direction_cost(const Vec3& origin, const Vec3& goal, const Vec3& endpoint) {
  const Vec3 to_goal = goal - origin;
  const Vec3 back = origin - endpoint;
  const double goal_norm = to_goal.norm();
  const double back_norm = back.norm();
  if (goal_norm == 0.0) throw DegenerateGeometry("goal coincides with vehicle position");
  if (back_norm == 0.0) throw DegenerateGeometry("endpoint coincides with vehicle position");
  return (to_goal / goal_norm).dot(back) / back_norm;
}

/// Negated mean speed toward the goal; lateral motion is free.
inline double average_velocity_cost(const Vec3& origin, const Vec3& goal, const Vec3& endpoint,
                                    double duration) {
  if (!(duration > 0.0)) throw NonPositiveDuration(duration);
  const Vec3 to_goal = goal - origin;
  const double goal_norm = to_goal.norm();
  if (goal_norm == 0.0) throw DegenerateGeometry("goal coincides with vehicle position");
  return -(to_goal / goal_norm).dot(endpoint - origin) / duration;
}

/// Sample, score, and build and check only on strict cost improvement, until
/// the budget runs out. The candidate stream depends only on `rng`, so a
/// larger budget processes a longer prefix of the same stream.
inline PlanOutcome plan(const DepthCollisionChecker& checker, const DepthImage& img,
                        const Pose& pose, const VehicleState& state, const Vec3& goal,
                        const PlannerConfig& cfg, Rng& rng) {
  using Clock = std::chrono::steady_clock;
  PlanOutcome out;
  const auto start_time = Clock::now();
  const auto deadline =
      start_time + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.budget));
  const double speed_limit = cfg.peak_speed_factor * cfg.v_des;

  for (;;) {
    if (cfg.budget_mode == BudgetMode::Candidates) {
      if (out.counters.sampled >= cfg.candidate_budget) break;
    } else if (Clock::now() >= deadline) {
      break;
    }
    const Candidate cand = sample_candidate(cfg.sampler, rng, img, cfg.intrinsics, cfg.bounds, pose);
    const std::uint64_t index = out.counters.sampled++;
    const double duration = duration_for(cand.endpoint_world, state, cfg.v_des, cfg.durations);
    const double cost =
        cfg.cost == CostKind::Direction
            ? direction_cost(state.position, goal, cand.endpoint_world)
            : average_velocity_cost(state.position, goal, cand.endpoint_world, duration);
    if (!(cost < out.best_cost)) continue;
    ++out.counters.cost_passed;
    PolynomialTrajectory traj = plan_to_rest(state, cand.endpoint_world, duration);
    if (peak_speed(traj) > speed_limit) continue;
    ++out.counters.collision_checked;
    const CollisionVerdict verdict = checker.check(traj);
    out.counters.pixels_touched += verdict.pixels_touched;
    if (!verdict.free) continue;
    ++out.counters.collision_free;
    out.best_cost = cost;
    out.best = std::move(traj);
    out.best_candidate = cand;
    out.improvements.push_back({index, cost});
  }
  return out;
}

/// Convenience overload that preprocesses the frame first. Preprocessing is
/// per-frame work and is not charged to the planning budget.
inline PlanOutcome plan(const DepthImage& img, const Pose& pose, const VehicleState& state,
                        const Vec3& goal, const PlannerConfig& cfg, Rng& rng) {
  cfg.validate();
  const DepthCollisionChecker checker(img, cfg.intrinsics, pose, cfg.collision_params());
  return plan(checker, img, pose, state, goal, cfg, rng);
}

}  // namespace dess
