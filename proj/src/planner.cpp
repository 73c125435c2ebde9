#include "gridplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gridplan/geometry.hpp"

namespace gridplan {

const char* to_string(SafetyVerdict v) {
  switch (v) {
    case SafetyVerdict::kUnchecked: return "unchecked";
    case SafetyVerdict::kPassed: return "passed";
    case SafetyVerdict::kStaticCollision: return "static_collision";
    case SafetyVerdict::kDynamicCollision: return "dynamic_collision";
    case SafetyVerdict::kKinematics: return "kinematics";
  }
  return "unchecked";
}

PlannerDecision select_best(const CandidateSet& set, const EvalContext& ctx) {
  if (set.empty()) throw std::invalid_argument("select_best: empty candidate set");

  PlannerDecision decision;
  decision.ranked.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    RankedCandidate rc;
    rc.index = static_cast<int>(i);
    rc.cost = trajectory_cost(set.candidates[i], ctx.volume, ctx.occ_cost, ctx.pred,
                              ctx.model.alpha, ctx.model.beta);
    decision.ranked.push_back(std::move(rc));
  }
  std::stable_sort(decision.ranked.begin(), decision.ranked.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) {
                     return a.cost.total < b.cost.total;
                   });
  decision.chosen_index = decision.ranked.front().index;
  decision.chosen = set.candidates[static_cast<std::size_t>(decision.chosen_index)];
  decision.verdicts.assign(set.size(), SafetyVerdict::kUnchecked);
  return decision;
}

ImitationResult multimodal_imitation_loss(const std::vector<Trajectory>& modes,
                                          const Trajectory& gt) {
  if (modes.empty()) throw std::invalid_argument("multimodal_imitation_loss: no modes");
  ImitationResult result;
  result.loss = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const Trajectory& mode = modes[m];
    if (mode.waypoints.size() != gt.waypoints.size()) {
      throw std::invalid_argument("multimodal_imitation_loss: horizon mismatch");
    }
    double dist = 0.0;
    for (std::size_t k = 0; k < gt.waypoints.size(); ++k) {
      dist += (mode.waypoints[k].position() - gt.waypoints[k].position()).norm();
    }
    dist /= static_cast<double>(gt.waypoints.size());
    if (dist < result.loss) {
      result.loss = dist;
      result.mode_index = static_cast<int>(m);
    }
  }
  return result;
}

std::vector<Waypoint> sweep_poses(const Trajectory& traj) {
  std::vector<Waypoint> poses;
  poses.reserve(2 * traj.waypoints.size() + 1);
  poses.push_back(traj.start);
  const Waypoint* prev = &traj.start;
  for (const Waypoint& wp : traj.waypoints) {
    Waypoint mid;
    mid.t = 0.5 * (prev->t + wp.t);
    mid.x = 0.5 * (prev->x + wp.x);
    mid.y = 0.5 * (prev->y + wp.y);
    mid.heading = prev->heading + 0.5 * wrap_angle(wp.heading - prev->heading);
    mid.v = 0.5 * (prev->v + wp.v);
    poses.push_back(mid);
    poses.push_back(wp);
    prev = &wp;
  }
  return poses;
}

bool trajectory_hits_static(const Trajectory& traj, const OccupancyGrid& occ, double ego_length,
                            double ego_width) {
  const GridGeometry& geom = occ.geom;
  for (const Waypoint& pose : sweep_poses(traj)) {
    const OrientedBox box{pose.position(), pose.heading, ego_length, ego_width};
    // Scan the cells under the box's bounding rectangle.
    const auto corners = box.corners();
    double min_x = corners[0].x, max_x = corners[0].x;
    double min_y = corners[0].y, max_y = corners[0].y;
    for (const Vec2& c : corners) {
      min_x = std::min(min_x, c.x);
      max_x = std::max(max_x, c.x);
      min_y = std::min(min_y, c.y);
      max_y = std::max(max_y, c.y);
    }
    const int col_lo = std::max(0, static_cast<int>(std::ceil((min_x - geom.origin.x) / geom.resolution)));
    const int col_hi = std::min(geom.cols - 1,
                                static_cast<int>(std::floor((max_x - geom.origin.x) / geom.resolution)));
    const int row_lo = std::max(0, static_cast<int>(std::ceil((min_y - geom.origin.y) / geom.resolution)));
    const int row_hi = std::min(geom.rows - 1,
                                static_cast<int>(std::floor((max_y - geom.origin.y) / geom.resolution)));
    for (int r = row_lo; r <= row_hi; ++r) {
      for (int c = col_lo; c <= col_hi; ++c) {
        if (occ.at(r, c) != CellLabel::kStatic) continue;
        if (box_contains(box, geom.cell_to_world(r, c))) return true;
      }
    }
  }
  return false;
}

bool trajectory_hits_forecasts(const Trajectory& traj,
                               const std::vector<Trajectory>& forecasts,
                               const std::vector<AgentTrack>& agents, double ego_length,
                               double ego_width, double lateral_margin,
                               double longitudinal_margin) {
  const double inflated_length = ego_length + 2.0 * longitudinal_margin;
  const double inflated_width = ego_width + 2.0 * lateral_margin;
  for (std::size_t k = 0; k < traj.waypoints.size(); ++k) {
    const Waypoint& wp = traj.waypoints[k];
    const OrientedBox ego_box{wp.position(), wp.heading, inflated_length, inflated_width};
    for (std::size_t a = 0; a < forecasts.size(); ++a) {
      if (k >= forecasts[a].waypoints.size()) continue;
      const Waypoint& awp = forecasts[a].waypoints[k];
      const OrientedBox agent_box{awp.position(), awp.heading, agents[a].length,
                                  agents[a].width};
      if (boxes_overlap(ego_box, agent_box)) return true;
    }
  }
  return false;
}

Trajectory fallback_trajectory(const EgoState& ego, double comfort_brake) {
  Trajectory traj;
  traj.source = TrajectorySource::kCurve;
  traj.maneuver = Maneuver::kStop;
  traj.start = {0.0, ego.x, ego.y, ego.heading, ego.v};
  const Vec2 dir{std::cos(ego.heading), std::sin(ego.heading)};
  const double a = -std::abs(comfort_brake);
  for (int k = 1; k <= kHorizonSteps; ++k) {
    const double t = kDt * k;
    double d = 0.0;
    double v = ego.v + a * t;
    if (v <= 0.0) {
      const double t_stop = ego.v / -a;
      d = ego.v * t_stop + 0.5 * a * t_stop * t_stop;
      v = 0.0;
    } else {
      d = ego.v * t + 0.5 * a * t * t;
    }
    const Vec2 p = ego.position() + dir * d;
    traj.waypoints.push_back({t, p.x, p.y, ego.heading, v});
  }
  return traj;
}

namespace {

double mean_deviation(const Trajectory& a, const Trajectory& b) {
  const std::size_t n = std::min(a.waypoints.size(), b.waypoints.size());
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum += (a.waypoints[k].position() - b.waypoints[k].position()).norm();
  }
  return sum / static_cast<double>(n);
}

}  // namespace

PlannerDecision safety_layer(const PlannerDecision& ranked, const CandidateSet& set,
                             const OccupancyGrid& occ,
                             const std::vector<Trajectory>& forecasts,
                             const std::vector<AgentTrack>& agents,
                             const Trajectory* previous_plan, const EgoState& ego,
                             const SafetyConfig& config) {
  PlannerDecision decision = ranked;
  decision.verdicts.assign(set.size(), SafetyVerdict::kUnchecked);

  struct Validated {
    int index;
    double cost;
  };
  std::vector<Validated> cached;
  for (const RankedCandidate& rc : decision.ranked) {
    if (static_cast<int>(cached.size()) >= config.reserve_n) break;
    const Trajectory& traj = set.candidates[static_cast<std::size_t>(rc.index)];
    SafetyVerdict verdict = SafetyVerdict::kPassed;
    if (trajectory_hits_static(traj, occ, config.ego_length + 2.0 * config.static_margin,
                               config.ego_width + 2.0 * config.static_margin)) {
      verdict = SafetyVerdict::kStaticCollision;
    } else if (trajectory_hits_forecasts(traj, forecasts, agents, config.ego_length,
                                         config.ego_width, config.lateral_margin,
                                         config.longitudinal_margin)) {
      verdict = SafetyVerdict::kDynamicCollision;
    } else if (!satisfies_limits(traj, config.limits)) {
      verdict = SafetyVerdict::kKinematics;
    }
    decision.verdicts[static_cast<std::size_t>(rc.index)] = verdict;
    if (verdict == SafetyVerdict::kPassed) {
      cached.push_back({rc.index, rc.cost.total});
    }
  }

  if (cached.empty()) {
    decision.chosen = fallback_trajectory(ego, config.comfort_brake);
    decision.chosen_index = -1;
    decision.fallback = true;
    decision.consistency_score = 0.0;
    return decision;
  }

  // Cross-frame consistency among the reserved candidates.
  int best_index = cached.front().index;
  double best_score = std::numeric_limits<double>::infinity();
  double best_deviation = 0.0;
  for (const Validated& v : cached) {
    double deviation = 0.0;
    if (previous_plan != nullptr) {
      deviation = mean_deviation(set.candidates[static_cast<std::size_t>(v.index)],
                                 *previous_plan);
    }
    const double score = v.cost + config.lambda_consistency * deviation;
    if (score < best_score) {
      best_score = score;
      best_index = v.index;
      best_deviation = deviation;
    }
  }
  decision.chosen_index = best_index;
  decision.chosen = set.candidates[static_cast<std::size_t>(best_index)];
  decision.consistency_score = best_deviation;
  decision.fallback = false;
  return decision;
}

}  // namespace gridplan
