#include "gridplan/kinematic_filter.hpp"

#include <cmath>
#include <stdexcept>

namespace gridplan {

namespace {

// Minimum baseline displacement for a usable curvature estimate.
constexpr double kMinStepDistance = 0.05;

}  // namespace

bool satisfies_limits(const Trajectory& traj, const KinematicLimits& limits) {
  const int n = static_cast<int>(traj.waypoints.size());
  if (n == 0) return true;

  auto state = [&traj](int i) -> const Waypoint& {
    return i == 0 ? traj.start : traj.waypoints[static_cast<std::size_t>(i - 1)];
  };

  double prev_a = 0.0;
  bool have_prev_a = false;
  for (int i = 0; i < n; ++i) {
    const Waypoint& s0 = state(i);
    const Waypoint& s1 = state(i + 1);
    const double a = (s1.v - s0.v) / kDt;
    if (std::abs(a) > limits.max_accel) return false;
    if (have_prev_a && std::abs((a - prev_a) / kDt) > limits.max_jerk) return false;
    prev_a = a;
    have_prev_a = true;
  }
  // Curvature over a two-step baseline; single-step heading differences are
  // too noisy against the grid-sampled reference geometry.
  for (int i = 0; i + 1 < n; ++i) {
    const Waypoint& s0 = state(i);
    const Waypoint& s1 = state(i + 1);
    const Waypoint& s2 = state(i + 2);
    const double d = (s1.position() - s0.position()).norm() +
                     (s2.position() - s1.position()).norm();
    if (d <= 2.0 * kMinStepDistance) continue;
    const double kappa = std::abs(wrap_angle(s2.heading - s0.heading)) / d;
    if (kappa > limits.max_kappa) return false;
    if (s1.v * s1.v * kappa > limits.max_lat_accel) return false;
  }
  return true;
}

CandidateSet kinematic_filter(const CandidateSet& set, const KinematicLimits& limits) {
  if (!(limits.max_accel > 0.0) || !(limits.max_kappa > 0.0) || !(limits.max_jerk > 0.0) ||
      !(limits.max_lat_accel > 0.0)) {
    throw std::invalid_argument("kinematic_filter: limits must be positive");
  }
  CandidateSet out;
  out.warnings = set.warnings;
  for (const Trajectory& traj : set.candidates) {
    if (satisfies_limits(traj, limits)) out.add(traj);
  }
  return out;
}

}  // namespace gridplan
