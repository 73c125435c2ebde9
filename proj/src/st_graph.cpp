#include "gridplan/st_graph.hpp"

#include <cmath>
#include <stdexcept>

namespace gridplan {

double StBand::slope() const {
  double sum_t = 0.0;
  double sum_s = 0.0;
  double sum_tt = 0.0;
  double sum_ts = 0.0;
  int n = 0;
  for (int t = 0; t < kHorizonSteps; ++t) {
    if (!present(t)) continue;
    const double time = kDt * (t + 1);
    const double center = 0.5 * (lower(t) + upper(t));
    sum_t += time;
    sum_s += center;
    sum_tt += time * time;
    sum_ts += time * center;
    ++n;
  }
  if (n < 2) return 0.0;
  const double denom = n * sum_tt - sum_t * sum_t;
  if (std::abs(denom) < 1e-12) return 0.0;
  return (n * sum_ts - sum_t * sum_s) / denom;
}

StGraph build_st_graph(const ReferenceLine& ref, const std::vector<Trajectory>& forecasts,
                       const std::vector<AgentTrack>& agents, double ego_half_length,
                       const StConfig& config) {
  if (forecasts.size() != agents.size()) {
    throw std::invalid_argument("build_st_graph: forecasts and agents must align");
  }
  StGraph graph;
  graph.s_max = ref.length();
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    const Trajectory& fc = forecasts[i];
    const AgentTrack& agent = agents[i];
    if (fc.waypoints.size() != static_cast<std::size_t>(kHorizonSteps)) {
      throw std::invalid_argument("build_st_graph: forecast not on the 30-step horizon");
    }
    StBand band;
    band.agent_index = static_cast<int>(i);
    bool any = false;
    for (int t = 0; t < kHorizonSteps; ++t) {
      const Waypoint& wp = fc.waypoints[static_cast<std::size_t>(t)];
      const FrenetState fr = project_to_frenet(wp.position(), ref);
      if (std::abs(fr.l) > config.corridor_half_width + 0.5 * agent.width) continue;
      const double buffer = config.headway_buffer_s * std::max(0.0, wp.v);
      const double inflate = 0.5 * agent.length + ego_half_length + buffer;
      band.span[static_cast<std::size_t>(t)] = std::make_pair(fr.s - inflate, fr.s + inflate);
      any = true;
    }
    if (any) graph.bands.push_back(band);
  }
  return graph;
}

}  // namespace gridplan
