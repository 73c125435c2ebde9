#pragma once

#include "gridplan/types.hpp"

namespace gridplan {

struct KinematicLimits {
  double max_accel{4.0};      // [m/s^2]
  double max_kappa{0.3};      // [1/m]
  double max_jerk{15.0};      // [m/s^3]
  double max_lat_accel{4.5};  // [m/s^2]
};

// Finite-difference feasibility check over start + waypoints.
bool satisfies_limits(const Trajectory& traj, const KinematicLimits& limits);

// Drops candidates violating any limit; survivor order preserved.
CandidateSet kinematic_filter(const CandidateSet& set, const KinematicLimits& limits);

}  // namespace gridplan
