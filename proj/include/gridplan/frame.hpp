#pragma once

#include <vector>

#include "gridplan/evaluator.hpp"
#include "gridplan/geometry.hpp"
#include "gridplan/grid.hpp"
#include "gridplan/prediction.hpp"
#include "gridplan/types.hpp"

namespace gridplan {

// Everything the planner sees in one 10 Hz tick.
struct PlanningFrame {
  EgoState ego;
  double ego_length{4.9};
  double ego_width{1.9};
  std::vector<AgentTrack> agents;
  std::vector<Landmark> landmarks;
  Route route;
  std::vector<Polygon> static_obstacles;
  TrafficLight traffic_light{TrafficLight::kPermitted};
  GridGeometry grid;
};

// Static obstacles label cells static; current agent boxes label them
// movable.
OccupancyGrid build_occupancy(const PlanningFrame& frame);

// Route polyline resampled to the standard reference-line spacing (0.5 m,
// fine enough for stable discrete curvature estimates).
ReferenceLine route_reference_line(const Route& route);

// Per-frame evaluation bundle: occupancy, forecasts, prediction grid,
// feature planes, and the decoded cost volume.
struct EvalContext {
  OccupancyGrid occ;
  ScalarField occ_cost;
  std::vector<Trajectory> forecasts;  // aligned with frame.agents
  PredictionGrid pred;
  FeaturePlanes planes;
  CostVolume volume;
  CostModel model;
};

EvalContext build_eval_context(const PlanningFrame& frame, const CostModel& model,
                               const FeatureConfig& feature_config = {},
                               const ForecastConfig& forecast_config = {});

}  // namespace gridplan
