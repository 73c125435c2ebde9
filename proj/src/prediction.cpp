#include "gridplan/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gridplan/bev_raster.hpp"
#include "gridplan/geometry.hpp"

namespace gridplan {

namespace {

constexpr double kFocalEps = 1e-6;

Waypoint make_waypoint(double t, const Vec2& p, double heading, double v) {
  Waypoint wp;
  wp.t = t;
  wp.x = p.x;
  wp.y = p.y;
  wp.heading = heading;
  wp.v = v;
  return wp;
}

// Observed speed / heading of an agent; throws when unobservable.
void observed_motion(const AgentTrack& agent, double* v, double* heading) {
  if (agent.history.empty()) {
    throw std::invalid_argument("forecast_agents: agent " + agent.id + " has no history");
  }
  const AgentState& cur = agent.current();
  *heading = cur.heading;
  if (std::isfinite(cur.v)) {
    *v = std::max(0.0, cur.v);
    return;
  }
  if (agent.history.size() < 2) {
    throw std::invalid_argument("forecast_agents: agent " + agent.id +
                                " has < 2 history states and no observed speed");
  }
  const AgentState& prev = agent.history[agent.history.size() - 2];
  const Vec2 d = cur.position() - prev.position();
  *v = d.norm() / kDt;
  if (d.norm() > 1e-9) *heading = std::atan2(d.y, d.x);
}

Trajectory constant_velocity_forecast(const AgentTrack& agent) {
  double v = 0.0;
  double heading = 0.0;
  observed_motion(agent, &v, &heading);
  const Vec2 dir{std::cos(heading), std::sin(heading)};
  const Vec2 p0 = agent.current().position();

  Trajectory traj;
  traj.source = TrajectorySource::kImitation;
  traj.maneuver = Maneuver::kLaneKeep;
  traj.start = make_waypoint(0.0, p0, heading, v);
  traj.waypoints.reserve(kHorizonSteps);
  for (int k = 1; k <= kHorizonSteps; ++k) {
    const double t = kDt * k;
    traj.waypoints.push_back(make_waypoint(t, p0 + dir * (v * t), heading, v));
  }
  return traj;
}

Trajectory lane_following_forecast(const AgentTrack& agent, const ReferenceLine& ref) {
  double v = 0.0;
  double heading = 0.0;
  observed_motion(agent, &v, &heading);
  const Vec2 p0 = agent.current().position();
  const FrenetState fr = project_to_frenet(p0, ref);

  Trajectory traj;
  traj.source = TrajectorySource::kImitation;
  traj.maneuver = Maneuver::kLaneKeep;
  traj.start = make_waypoint(0.0, p0, heading, v);
  traj.waypoints.reserve(kHorizonSteps);
  const double len = ref.length();
  for (int k = 1; k <= kHorizonSteps; ++k) {
    const double t = kDt * k;
    const double s = fr.s + v * t;
    Vec2 p;
    double h = 0.0;
    if (s <= len) {
      p = ref.point_at(s) + ref.normal_at(s) * fr.l;
      h = ref.heading_at(s);
    } else {
      // Continue straight past the lane end.
      const Vec2 tangent = ref.tangent_at(len);
      const Vec2 normal = ref.normal_at(len);
      p = ref.point_at(len) + tangent * (s - len) + normal * fr.l;
      h = ref.heading_at(len);
    }
    traj.waypoints.push_back(make_waypoint(t, p, h, v));
  }
  return traj;
}

}  // namespace

PredictionGrid ground_truth_grid(const std::vector<AgentForecast>& futures,
                                 const GridGeometry& geom) {
  PredictionGrid grid = PredictionGrid::zeros(geom, kHorizonSteps);
  std::vector<float> slice(geom.cell_count());
  for (const AgentForecast& fc : futures) {
    if (fc.traj.waypoints.size() != static_cast<std::size_t>(kHorizonSteps)) {
      throw std::invalid_argument("ground_truth_grid: forecast not on the 30-step horizon");
    }
  }
  for (int t = 0; t < kHorizonSteps; ++t) {
    std::fill(slice.begin(), slice.end(), 0.0f);
    bool touched = false;
    for (const AgentForecast& fc : futures) {
      const Waypoint& wp = fc.traj.waypoints[static_cast<std::size_t>(t)];
      const OrientedBox box{wp.position(), wp.heading, fc.length, fc.width};
      touched |= fill_polygon(&slice, geom, box_to_polygon(box), 1.0f);
    }
    if (touched) {
      std::copy(slice.begin(), slice.end(),
                grid.data.begin() + static_cast<std::ptrdiff_t>(grid.index(t, 0, 0)));
    }
  }
  grid.update_boundary_to_max();
  return grid;
}

double focal_loss(const PredictionGrid& pred, const PredictionGrid& truth) {
  if (!(pred.geom == truth.geom) || pred.steps != truth.steps) {
    throw std::invalid_argument("focal_loss: grid geometry mismatch");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double g_hat = std::clamp(static_cast<double>(pred.data[i]), kFocalEps, 1.0 - kFocalEps);
    const double g_true = truth.data[i];
    loss -= g_true * (1.0 - g_hat) * (1.0 - g_hat) * std::log(g_hat) +
            (1.0 - g_true) * g_hat * g_hat * std::log(1.0 - g_hat);
  }
  return loss;
}

LanePrior accumulate_lane_prior(const PredictionGrid& grid,
                                const std::vector<Landmark>& landmarks,
                                const ForecastConfig& config) {
  LanePrior prior;
  prior.totals.resize(landmarks.size());
  if (landmarks.empty()) return prior;

  // Sum over time once; corridor membership is time-independent.
  std::vector<double> accumulated(grid.geom.cell_count(), 0.0);
  for (int t = 0; t < grid.steps; ++t) {
    const std::size_t base = grid.index(t, 0, 0);
    for (std::size_t i = 0; i < accumulated.size(); ++i) {
      accumulated[i] += grid.data[base + i];
    }
  }

  const GridGeometry& geom = grid.geom;
  std::vector<std::uint8_t> visited(geom.cell_count());
  const int reach = static_cast<int>(std::ceil(config.corridor_half_width / geom.resolution));
  for (std::size_t li = 0; li < landmarks.size(); ++li) {
    prior.totals[li].landmark_index = static_cast<int>(li);
    const Landmark& lm = landmarks[li];
    if (lm.kind != LandmarkKind::kLaneCenter || lm.points.size() < 2) continue;
    std::fill(visited.begin(), visited.end(), 0);
    double total = 0.0;
    // Walk the polyline and stamp the perpendicular corridor strip.
    const std::vector<Vec2> dense = resample_polyline(lm.points, 0.5 * geom.resolution);
    for (std::size_t i = 0; i < dense.size(); ++i) {
      const Vec2 dir = i + 1 < dense.size() ? (dense[i + 1] - dense[i]).normalized()
                                            : (dense[i] - dense[i - 1]).normalized();
      const Vec2 normal{-dir.y, dir.x};
      for (int k = -reach; k <= reach; ++k) {
        const double offset = k * geom.resolution;
        if (std::abs(offset) > config.corridor_half_width) continue;
        const auto cell = geom.world_to_cell(dense[i] + normal * offset);
        if (!cell) continue;
        const std::size_t idx =
            static_cast<std::size_t>(cell->first) * geom.cols + cell->second;
        if (visited[idx]) continue;
        visited[idx] = 1;
        total += accumulated[idx];
      }
    }
    prior.totals[li].p_lane = total;
  }

  std::vector<int> order;
  for (std::size_t li = 0; li < landmarks.size(); ++li) {
    if (landmarks[li].kind == LandmarkKind::kLaneCenter && prior.totals[li].p_lane > 0.0) {
      order.push_back(static_cast<int>(li));
    }
  }
  std::stable_sort(order.begin(), order.end(), [&prior](int a, int b) {
    return prior.totals[a].p_lane > prior.totals[b].p_lane;
  });
  if (static_cast<int>(order.size()) > config.top_k) order.resize(config.top_k);
  prior.selected = std::move(order);
  return prior;
}

std::vector<Trajectory> forecast_agents(const std::vector<AgentTrack>& agents,
                                        const std::vector<Landmark>& landmarks,
                                        const GridGeometry& geom,
                                        const ForecastConfig& config) {
  bool any_lane = false;
  for (const Landmark& lm : landmarks) {
    any_lane = any_lane || (lm.kind == LandmarkKind::kLaneCenter && lm.points.size() >= 2);
  }

  // First pass: constant-velocity forecasts.
  std::vector<Trajectory> forecasts;
  forecasts.reserve(agents.size());
  for (const AgentTrack& agent : agents) {
    forecasts.push_back(constant_velocity_forecast(agent));
  }
  if (!any_lane || agents.empty()) return forecasts;

  // Scene prior from the first-pass grid, then refine agents toward the
  // selected lanes they plausibly occupy.
  std::vector<AgentForecast> boxes;
  boxes.reserve(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    boxes.push_back({forecasts[i], agents[i].length, agents[i].width});
  }
  const PredictionGrid grid = ground_truth_grid(boxes, geom);
  const LanePrior prior = accumulate_lane_prior(grid, landmarks, config);
  if (prior.selected.empty()) return forecasts;

  for (std::size_t i = 0; i < agents.size(); ++i) {
    const AgentTrack& agent = agents[i];
    const Vec2 p0 = agent.current().position();
    int best_lane = -1;
    double best_p = 0.0;
    ReferenceLine best_ref;
    for (int li : prior.selected) {
      const Landmark& lm = landmarks[static_cast<std::size_t>(li)];
      ReferenceLine ref = ReferenceLine::from_polyline(lm.points);
      const FrenetState fr = project_to_frenet(p0, ref);
      if (std::abs(fr.l) > config.lane_gate_distance) continue;
      const double misalign =
          std::abs(wrap_angle(agent.current().heading - ref.heading_at(fr.s)));
      if (misalign > config.heading_gate) continue;
      if (prior.totals[static_cast<std::size_t>(li)].p_lane > best_p) {
        best_p = prior.totals[static_cast<std::size_t>(li)].p_lane;
        best_lane = li;
        best_ref = std::move(ref);
      }
    }
    if (best_lane >= 0) {
      forecasts[i] = lane_following_forecast(agent, best_ref);
    }
  }
  return forecasts;
}

}  // namespace gridplan
