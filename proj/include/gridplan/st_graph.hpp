#pragma once

#include <array>
#include <optional>
#include <vector>

#include "gridplan/geometry.hpp"
#include "gridplan/types.hpp"

namespace gridplan {

struct StConfig {
  double corridor_half_width{1.75};  // lateral gate around the reference line [m]
  double headway_buffer_s{0.5};      // time-headway-equivalent s inflation [s]
};

// Occupied (s, t) band of one agent along the reference line. Free space
// below the band is the follow region, above it the overtake region.
struct StBand {
  int agent_index{-1};
  std::array<std::optional<std::pair<double, double>>, kHorizonSteps> span;

  bool present(int t) const { return span[static_cast<std::size_t>(t)].has_value(); }
  double lower(int t) const { return span[static_cast<std::size_t>(t)]->first; }
  double upper(int t) const { return span[static_cast<std::size_t>(t)]->second; }
  // Least-squares ds/dt of the band center over the present steps.
  double slope() const;
};

struct StGraph {
  std::vector<StBand> bands;
  double s_max{0.0};

  bool occupied(double s, int t_index) const {
    for (const StBand& band : bands) {
      if (!band.present(t_index)) continue;
      if (s >= band.lower(t_index) && s <= band.upper(t_index)) return true;
    }
    return false;
  }
};

// Marks each forecast's lane occupation over time, inflated by the agent
// half length, the ego half length, and a speed-scaled headway buffer.
StGraph build_st_graph(const ReferenceLine& ref, const std::vector<Trajectory>& forecasts,
                       const std::vector<AgentTrack>& agents, double ego_half_length,
                       const StConfig& config = {});

}  // namespace gridplan
