#include "gridplan/frame.hpp"

#include "gridplan/bev_raster.hpp"

namespace gridplan {

OccupancyGrid build_occupancy(const PlanningFrame& frame) {
  OccupancyGrid occ = OccupancyGrid::empty(frame.grid);
  std::vector<float> mask(frame.grid.cell_count());

  auto stamp = [&](const Polygon& poly, CellLabel label) {
    std::fill(mask.begin(), mask.end(), 0.0f);
    fill_polygon(&mask, frame.grid, poly, 1.0f);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i] > 0.0f) occ.labels[i] = label;
    }
  };

  for (const Polygon& poly : frame.static_obstacles) stamp(poly, CellLabel::kStatic);
  for (const AgentTrack& agent : frame.agents) {
    const AgentState& cur = agent.current();
    const OrientedBox box{cur.position(), cur.heading, agent.length, agent.width};
    stamp(box_to_polygon(box), CellLabel::kMovable);
  }
  return occ;
}

ReferenceLine route_reference_line(const Route& route) {
  return ReferenceLine::from_polyline(resample_polyline(route.points, 0.5));
}

EvalContext build_eval_context(const PlanningFrame& frame, const CostModel& model,
                               const FeatureConfig& feature_config,
                               const ForecastConfig& forecast_config) {
  EvalContext ctx;
  ctx.model = model;
  ctx.occ = build_occupancy(frame);
  ctx.forecasts = forecast_agents(frame.agents, frame.landmarks, frame.grid, forecast_config);

  std::vector<AgentForecast> boxes;
  boxes.reserve(frame.agents.size());
  for (std::size_t i = 0; i < frame.agents.size(); ++i) {
    boxes.push_back({ctx.forecasts[i], frame.agents[i].length, frame.agents[i].width});
  }
  ctx.pred = ground_truth_grid(boxes, frame.grid);
  ctx.planes = build_feature_planes(nullptr, ctx.occ, ctx.pred, frame.route, feature_config);
  ctx.occ_cost = ctx.planes.occ_cost;
  ctx.volume = cost_volume(model, ctx.planes);
  return ctx;
}

}  // namespace gridplan
