#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "dess/geometry.hpp"

namespace dess {

struct VehicleState {
  Vec3 position;
  Vec3 velocity;
  Vec3 acceleration;
  double yaw = 0.0;
};

struct KinematicSample {
  Vec3 position;
  Vec3 velocity;
  Vec3 acceleration;
};

/// Per-axis quintic p(t) = c0 + c1 t + ... + c5 t^5 on [0, T] that starts at a
/// given state and ends at rest. This is the closed-form minimum-average-jerk
/// solution for a fixed final position, velocity and acceleration.
class PolynomialTrajectory {
 public:
  using Coefficients = std::array<double, 6>;

  PolynomialTrajectory(const VehicleState& start, const Vec3& endpoint, double duration)
      : start_(start), endpoint_(endpoint), duration_(duration) {
    if (!(duration > 0.0)) throw NonPositiveDuration(duration);
    axes_[0] = solve_axis(start.position.x, start.velocity.x, start.acceleration.x, endpoint.x);
    axes_[1] = solve_axis(start.position.y, start.velocity.y, start.acceleration.y, endpoint.y);
    axes_[2] = solve_axis(start.position.z, start.velocity.z, start.acceleration.z, endpoint.z);
  }

  double duration() const { return duration_; }
  const VehicleState& start_state() const { return start_; }
  const Vec3& endpoint() const { return endpoint_; }
  const Coefficients& coefficients(int axis) const { return axes_.at(axis); }

  KinematicSample eval(double t) const {
    if (!(t >= 0.0 && t <= duration_)) throw OutOfDomain(t, duration_);
    return eval_unchecked(t);
  }

  /// Evaluation with t clamped to [0, T]; past T the vehicle sits at rest.
  KinematicSample eval_clamped(double t) const {
    return eval_unchecked(std::clamp(t, 0.0, duration_));
  }

  Vec3 position(double t) const {
    return {horner(axes_[0], t), horner(axes_[1], t), horner(axes_[2], t)};
  }

  Vec3 velocity(double t) const {
    return {derivative(axes_[0], t), derivative(axes_[1], t), derivative(axes_[2], t)};
  }

 private:
  KinematicSample eval_unchecked(double t) const {
    KinematicSample s;
    s.position = position(t);
    s.velocity = velocity(t);
    s.acceleration = {second_derivative(axes_[0], t), second_derivative(axes_[1], t),
                      second_derivative(axes_[2], t)};
    return s;
  }

  Coefficients solve_axis(double p0, double v0, double a0, double pf) const {
    const double T = duration_;
    const double T2 = T * T;
    const double T3 = T2 * T;
    const double T4 = T3 * T;
    const double T5 = T4 * T;
    // Residual of the free (jerk-less) motion at T against the rest endpoint.
    const double dp = pf - p0 - v0 * T - 0.5 * a0 * T2;
    const double dv = -v0 - a0 * T;
    const double da = -a0;
    const double alpha = (720.0 * dp - 360.0 * T * dv + 60.0 * T2 * da) / T5;
    const double beta = (-360.0 * T * dp + 168.0 * T2 * dv - 24.0 * T3 * da) / T5;
    const double gamma = (60.0 * T2 * dp - 24.0 * T3 * dv + 3.0 * T4 * da) / T5;
    return {p0, v0, 0.5 * a0, gamma / 6.0, beta / 24.0, alpha / 120.0};
  }

  static double horner(const Coefficients& c, double t) {
    return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
  }
  static double derivative(const Coefficients& c, double t) {
    return c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])));
  }
  static double second_derivative(const Coefficients& c, double t) {
    return 2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]));
  }

  VehicleState start_;
  Vec3 endpoint_;
  double duration_;
  std::array<Coefficients, 3> axes_{};
};

inline PolynomialTrajectory plan_to_rest(const VehicleState& start, const Vec3& endpoint,
                                         double duration) {
  return PolynomialTrajectory(start, endpoint, duration);
}

struct DurationLimits {
  double min_seconds = 1.0;
  double max_seconds = 5.0;
};

/// Execution time from straight-line distance at the desired speed.
inline double duration_for(const Vec3& endpoint, const VehicleState& start, double v_des,
                           const DurationLimits& limits = {}) {
  if (!(v_des > 0.0)) throw DomainError("desired speed must be positive");
  const double t = (endpoint - start.position).norm() / v_des;
  return std::clamp(t, limits.min_seconds, limits.max_seconds);
}

/// Largest speed over 101 evenly spaced samples of [0, T].
inline double peak_speed(const PolynomialTrajectory& traj) {
  constexpr int kSteps = 100;
  double peak = 0.0;
  for (int i = 0; i <= kSteps; ++i) {
    const double t = traj.duration() * i / kSteps;
    peak = std::max(peak, traj.velocity(t).norm());
  }
  return peak;
}

}  // namespace dess
