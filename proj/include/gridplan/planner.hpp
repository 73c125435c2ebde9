#pragma once

#include <vector>

#include "gridplan/evaluator.hpp"
#include "gridplan/frame.hpp"
#include "gridplan/kinematic_filter.hpp"
#include "gridplan/types.hpp"

namespace gridplan {

enum class SafetyVerdict {
  kUnchecked,
  kPassed,
  kStaticCollision,
  kDynamicCollision,
  kKinematics,
};

const char* to_string(SafetyVerdict v);

struct RankedCandidate {
  int index{-1};  // into the candidate set
  CostBreakdown cost;
};

struct PlannerDecision {
  Trajectory chosen;
  int chosen_index{-1};  // -1 for the fallback trajectory
  std::vector<RankedCandidate> ranked;      // ascending by total cost
  std::vector<SafetyVerdict> verdicts;      // per original candidate index
  double consistency_score{0.0};            // mean deviation from the previous plan [m]
  bool fallback{false};
};

// Ranks candidates ascending by E(.) and picks the cheapest; ties break by
// candidate order. Throws on an empty set.
PlannerDecision select_best(const CandidateSet& set, const EvalContext& ctx);

struct ImitationResult {
  double loss{0.0};   // mean per-waypoint distance of the closest mode
  int mode_index{-1};
};

// Multi-modal imitation loss: min over modes of the mean per-waypoint
// Euclidean distance to the ground truth.
ImitationResult multimodal_imitation_loss(const std::vector<Trajectory>& modes,
                                          const Trajectory& gt);

struct SafetyConfig {
  int reserve_n{3};                 // validated candidates cached
  double lambda_consistency{0.1};   // cost per meter of mean deviation
  double lateral_margin{0.3};       // dynamic-check box inflation [m]
  double longitudinal_margin{0.5};  // dynamic-check box inflation [m]
  double static_margin{0.3};        // static-check box inflation [m]
  double ego_length{4.9};
  double ego_width{1.9};
  double comfort_brake{3.0};        // fallback deceleration [m/s^2]
  KinematicLimits limits;
};

// Iterates the ranked candidates, validating against static occupancy,
// forecast agent boxes, and kinematic limits until reserve_n candidates are
// cached; picks the one minimizing cost + lambda * deviation-to-previous.
// When nothing validates, returns a flagged straight comfort-braking
// fallback.
PlannerDecision safety_layer(const PlannerDecision& ranked, const CandidateSet& set,
                             const OccupancyGrid& occ,
                             const std::vector<Trajectory>& forecasts,
                             const std::vector<AgentTrack>& agents,
                             const Trajectory* previous_plan, const EgoState& ego,
                             const SafetyConfig& config = {});

// Straight maximal-comfort-braking trajectory from the ego state.
Trajectory fallback_trajectory(const EgoState& ego, double comfort_brake);

// Swept-box collision check helpers shared with the simulator.
bool trajectory_hits_static(const Trajectory& traj, const OccupancyGrid& occ, double ego_length,
                            double ego_width);
bool trajectory_hits_forecasts(const Trajectory& traj,
                               const std::vector<Trajectory>& forecasts,
                               const std::vector<AgentTrack>& agents, double ego_length,
                               double ego_width, double lateral_margin,
                               double longitudinal_margin);

// Poses checked along a trajectory (start, waypoints, and midpoints).
std::vector<Waypoint> sweep_poses(const Trajectory& traj);

}  // namespace gridplan
