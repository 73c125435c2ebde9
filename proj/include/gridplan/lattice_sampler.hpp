#pragma once

#include <optional>
#include <vector>

#include "gridplan/geometry.hpp"
#include "gridplan/kinematic_filter.hpp"
#include "gridplan/st_graph.hpp"
#include "gridplan/types.hpp"

namespace gridplan {

struct LatticeConfig {
  // Cruise: quartic end speeds sampled around the target speed; the exact
  // target comes first so it wins exact-tie ranking.
  std::vector<double> cruise_speed_offsets{0.0, -2.0, -4.0, 2.0};
  // Lateral quintic end offsets relative to the reference line.
  std::vector<double> lateral_offsets{0.0, -0.75, 0.75};
  bool lane_change{false};
  double lane_width{3.5};
  // Follow / overtake: quintic end states placed inside the free regions of
  // the s-t graph, these many meters clear of the band edge at the horizon.
  std::vector<double> follow_gaps{2.0, 5.0, 8.0};
  std::vector<double> overtake_gaps{5.0, 10.0};
  // Stop: quintic to (stop_s - stop_margin, 0, 0) over a sweep of end times.
  std::vector<double> stop_times{1.5, 2.0, 2.5, 3.0};
  double stop_margin{1.0};
  std::optional<double> stop_s;
  // Candidates inside this lateral corridor respect the occupied s-t bands;
  // side-passing candidates beyond it are exempt.
  double corridor_half_width{1.75};
  int max_candidates{300};
  KinematicLimits limits;
};

// Frenet init state of the ego relative to a reference line.
FrenetState ego_frenet_state(const EgoState& ego, const ReferenceLine& ref);

// Frenet-frame end-state sampler: quartic cruise profiles, quintic stop and
// follow/overtake profiles placed via the s-t graph, combined with quintic
// lateral offset paths, converted to Cartesian and kinematically filtered.
CandidateSet lattice_sampler(const EgoState& ego, const ReferenceLine& ref, const StGraph& st,
                             double target_speed, const LatticeConfig& config = {});

}  // namespace gridplan
