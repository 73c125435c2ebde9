#include "gridplan/curve_sampler.hpp"

#include <cmath>

#include "gridplan/clothoid.hpp"
#include "gridplan/geometry.hpp"

namespace gridplan {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Distance traveled and speed at time t for constant acceleration with the
// speed clamped at zero (no reversing).
void motion_at(double v0, double a, double t, double* dist, double* v) {
  if (a < 0.0 && v0 + a * t < 0.0) {
    const double t_stop = v0 / -a;
    *dist = v0 * t_stop + 0.5 * a * t_stop * t_stop;
    *v = 0.0;
  } else {
    *dist = v0 * t + 0.5 * a * t * t;
    *v = v0 + a * t;
  }
}

Waypoint start_of(const EgoState& ego) {
  Waypoint wp;
  wp.t = 0.0;
  wp.x = ego.x;
  wp.y = ego.y;
  wp.heading = ego.heading;
  wp.v = ego.v;
  return wp;
}

Trajectory straight_trajectory(const EgoState& ego, double accel) {
  Trajectory traj;
  traj.source = TrajectorySource::kCurve;
  traj.maneuver = accel < -2.0 ? Maneuver::kStop : Maneuver::kLaneKeep;
  traj.start = start_of(ego);
  const Vec2 dir{std::cos(ego.heading), std::sin(ego.heading)};
  for (int k = 1; k <= kHorizonSteps; ++k) {
    const double t = kDt * k;
    double d = 0.0;
    double v = 0.0;
    motion_at(ego.v, accel, t, &d, &v);
    const Vec2 p = ego.position() + dir * d;
    traj.waypoints.push_back({t, p.x, p.y, ego.heading, v});
  }
  return traj;
}

Trajectory circle_trajectory(const EgoState& ego, double kappa, double accel) {
  Trajectory traj;
  traj.source = TrajectorySource::kCurve;
  traj.maneuver = Maneuver::kTurn;
  traj.start = start_of(ego);
  const double sin0 = std::sin(ego.heading);
  const double cos0 = std::cos(ego.heading);
  for (int k = 1; k <= kHorizonSteps; ++k) {
    const double t = kDt * k;
    double d = 0.0;
    double v = 0.0;
    motion_at(ego.v, accel, t, &d, &v);
    const double theta = ego.heading + kappa * d;
    const double x = ego.x + (std::sin(theta) - sin0) / kappa;
    const double y = ego.y - (std::cos(theta) - cos0) / kappa;
    traj.waypoints.push_back({t, x, y, wrap_angle(theta), v});
  }
  return traj;
}

// Clothoid whose curvature at the ego pose matches the ego's current path
// curvature and grows toward `direction` (+1 left, -1 right) with slope
// pi / a^2 in arc length.
Trajectory clothoid_trajectory(const EgoState& ego, double scale, double direction) {
  Trajectory traj;
  traj.source = TrajectorySource::kCurve;
  traj.maneuver = Maneuver::kTurn;
  traj.start = start_of(ego);

  const double xi0 = direction * ego.kappa * scale * scale / kPi;
  const double psi0 = direction * kPi * xi0 * xi0 / (2.0 * scale * scale);
  const double rot = ego.heading - psi0;
  const FresnelResult f0 = fresnel(xi0 / scale);
  const Vec2 p0_canonical{scale * f0.c, direction * scale * f0.s};

  for (int k = 1; k <= kHorizonSteps; ++k) {
    const double t = kDt * k;
    const double xi = xi0 + ego.v * t;
    const FresnelResult f = fresnel(xi / scale);
    const Vec2 canonical{scale * f.c, direction * scale * f.s};
    const Vec2 p = ego.position() + (canonical - p0_canonical).rotated(rot);
    const double psi = direction * kPi * xi * xi / (2.0 * scale * scale);
    traj.waypoints.push_back({t, p.x, p.y, wrap_angle(rot + psi), ego.v});
  }
  return traj;
}

}  // namespace

CandidateSet curve_sampler(const EgoState& ego, const CurveSamplerConfig& config) {
  CandidateSet set;
  if (config.straight) {
    for (double a : config.accelerations) {
      set.add(straight_trajectory(ego, a));
    }
  }
  if (config.circle) {
    for (double phi : config.steering_angles) {
      const double kappa = curvature_from_steering(phi, ego.wheelbase);
      if (std::abs(kappa) < 1e-9) continue;
      for (double a : config.accelerations) {
        set.add(circle_trajectory(ego, kappa, a));
      }
    }
  }
  if (config.clothoid) {
    for (double scale : config.clothoid_scales) {
      if (!(scale > 0.0)) continue;
      set.add(clothoid_trajectory(ego, scale, +1.0));
      set.add(clothoid_trajectory(ego, scale, -1.0));
    }
  }
  if (set.empty()) {
    set.warnings.push_back("curve_sampler: empty sweep configuration produced no candidates");
  }
  return set;
}

}  // namespace gridplan
