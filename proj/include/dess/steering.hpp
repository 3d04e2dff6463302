#pragma once

#include <optional>

#include "dess/depth_image.hpp"
#include "dess/geometry.hpp"
#include "dess/planner.hpp"
#include "dess/trajectory.hpp"

namespace dess {

struct SteeringConfig {
  double gain = 0.6;                  ///< yaw accumulation gain K_p, rad/s
  double stuck_threshold = 1.0;       ///< s without a feasible trajectory before steering
  double local_goal_distance = 1.0;   ///< m; beyond this the camera faces the local goal
  double control_period = 0.01;       ///< s, inner control loop
  double rest_position_tolerance = 0.2;
  double rest_speed_tolerance = 0.1;
  bool bearing_to_global_goal = false;  ///< face the global goal instead of the local one

  void validate() const {
    if (!(gain > 0.0) || !(stuck_threshold > 0.0) || !(local_goal_distance > 0.0) ||
        !(control_period > 0.0)) {
      throw DomainError("steering parameters must be positive");
    }
  }
};

struct SteeringState {
  double time_without_feasible = 0.0;
  bool steering_active = false;
  Vec3 hold_position;      ///< endpoint of the last executed trajectory
  double psi_d_prev = 0.0; ///< last yaw setpoint sent to the controller
  int steer_episodes = 0;
  int gamma = +1;  ///< steering sign chosen when the current steer began

  /// Before any trajectory has run, the vehicle holds where it starts.
  static SteeringState initial(const VehicleState& vehicle) {
    SteeringState st;
    st.hold_position = vehicle.position;
    st.psi_d_prev = vehicle.yaw;
    return st;
  }
};

enum class CommandKind {
  Trajectory,  ///< track a new trajectory from now
  Steer,       ///< hold position and keep turning
  Continue,    ///< nothing new; keep executing the previous command
};

struct Command {
  CommandKind kind = CommandKind::Continue;
  std::optional<PolynomialTrajectory> trajectory;  ///< Trajectory only
  Vec3 position_setpoint;                           ///< Steer only
  double yaw_setpoint = 0.0;                        ///< Steer only
  int steering_sign = 0;                            ///< Steer only, +1 right / -1 left

  static Command track(PolynomialTrajectory traj) {
    Command c;
    c.kind = CommandKind::Trajectory;
    c.trajectory = std::move(traj);
    return c;
  }
  static Command steer(const Vec3& hold, double yaw, int sign) {
    Command c;
    c.kind = CommandKind::Steer;
    c.position_setpoint = hold;
    c.yaw_setpoint = yaw;
    c.steering_sign = sign;
    return c;
  }
  static Command keep() { return Command{}; }
};

/// +1 (turn right) when the closest return is in the left half of the frame,
/// -1 otherwise.
inline int steering_sign(const DepthImage& img) {
  const NearestPoint p = nearest_point(img);
  return 2 * p.x < img.width() ? +1 : -1;
}

/// Yaw reference for one control cycle of a steer, psi_r = psi_f + gamma * K_p * dt.
/// Here yaw is measured clockwise (positive = turning right), matching the
/// sign of gamma; see world_steering_yaw for the world-frame heading.
inline double steering_yaw(double psi_f, int gamma, const SteeringConfig& cfg, double dt) {
  if (!(dt > 0.0)) throw DomainError("steering time step must be positive");
  return normalize_angle(psi_f + gamma * cfg.gain * dt);
}

/// The same reference for a world-frame yaw (counter-clockwise about z up).
inline double world_steering_yaw(double world_yaw, int gamma, const SteeringConfig& cfg,
                                 double dt) {
  return -steering_yaw(-world_yaw, gamma, cfg, dt);
}

/// Picks the next command from one planning outcome and advances the stuck
/// bookkeeping. `frame_period` is the time since the previous call.
inline Command decide(const PlanOutcome& outcome, SteeringState& st, const DepthImage& img,
                      const VehicleState& vehicle, double frame_period,
                      const SteeringConfig& cfg) {
  if (outcome.best) {
    st.time_without_feasible = 0.0;
    st.steering_active = false;
    st.hold_position = outcome.best->endpoint();
    return Command::track(*outcome.best);
  }
  st.time_without_feasible += frame_period;
  const bool at_rest =
      (vehicle.position - st.hold_position).norm() <= cfg.rest_position_tolerance &&
      vehicle.velocity.norm() < cfg.rest_speed_tolerance;
  if (!(st.time_without_feasible > cfg.stuck_threshold && (at_rest || st.steering_active))) {
    return Command::keep();
  }
  if (!st.steering_active) {
    // The sign is chosen once per stuck episode from the frame that
    // triggered it; re-deciding every frame lets the turn oscillate.
    st.gamma = +1;
    try {
      st.gamma = steering_sign(img);
    } catch (const NoValidPixel&) {
      // Nothing in range; turn right.
    }
    st.steering_active = true;
    ++st.steer_episodes;
  }
  return Command::steer(st.hold_position,
                        world_steering_yaw(vehicle.yaw, st.gamma, cfg, cfg.control_period),
                        st.gamma);
}

/// Yaw setpoint selection: face the local goal while it is far, otherwise
/// follow the steering reference or hold the previous setpoint.
inline double yaw_setpoint(const Vec3& r_err, double psi_b, bool steering, double psi_r,
                           double& psi_d_prev, const SteeringConfig& cfg) {
  double psi_d;
  if (r_err.norm() > cfg.local_goal_distance) {
    psi_d = psi_b;
  } else if (steering) {
    psi_d = psi_r;
  } else {
    psi_d = psi_d_prev;
  }
  psi_d_prev = psi_d;
  return psi_d;
}

}  // namespace dess
