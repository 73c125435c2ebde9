#pragma once

#include <vector>

#include "gridplan/types.hpp"

namespace gridplan {

// Reference-line-free sampler: straight trajectories from an acceleration
// sweep, constant-curvature circles from a steering sweep, and clothoids
// over a scale sweep. Every candidate starts at the ego pose with speed
// continuity.
struct CurveSamplerConfig {
  std::vector<double> accelerations{-3.0, -1.5, 0.0, 1.0, 2.0};  // [m/s^2]
  std::vector<double> steering_angles{-0.3, -0.15, -0.05, 0.05, 0.15, 0.3};  // [rad]
  std::vector<double> clothoid_scales{20.0, 40.0, 80.0, 160.0};  // [m]
  bool straight{true};
  bool circle{true};
  bool clothoid{true};
};

CandidateSet curve_sampler(const EgoState& ego, const CurveSamplerConfig& config = {});

}  // namespace gridplan
