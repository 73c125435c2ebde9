#pragma once

#include <vector>

#include "gridplan/grid.hpp"
#include "gridplan/types.hpp"

namespace gridplan {

// Forecast trajectory plus the box dimensions swept along it.
struct AgentForecast {
  Trajectory traj;
  double length{4.5};
  double width{1.9};
};

// Rasterizes agent future boxes: cell (i, j, t) = 1 iff any box at step t
// covers the cell center.
PredictionGrid ground_truth_grid(const std::vector<AgentForecast>& futures,
                                 const GridGeometry& geom);

// Pixel-wise focal loss between a predicted and a ground-truth grid.
// Predictions are clamped to [1e-6, 1 - 1e-6]. Throws on geometry mismatch.
double focal_loss(const PredictionGrid& pred, const PredictionGrid& truth);

struct ForecastConfig {
  double corridor_half_width{1.75};  // lane membership of grid cells [m]
  int top_k{2};                      // lane-prior candidates kept
  double lane_gate_distance{3.0};    // max lateral offset to adopt a lane [m]
  double heading_gate{1.0472};       // max heading misalignment [rad]
};

// Accumulated grid probability per lane-center landmark, plus the top-k
// selection. Landmarks of other kinds get a zero entry and are never
// selected.
struct LanePrior {
  struct Entry {
    int landmark_index{-1};
    double p_lane{0.0};
  };
  std::vector<Entry> totals;   // one per landmark, input order
  std::vector<int> selected;   // landmark indices, highest p_lane first
};

LanePrior accumulate_lane_prior(const PredictionGrid& grid,
                                const std::vector<Landmark>& landmarks,
                                const ForecastConfig& config = {});

// Kinematic agent forecasting over the 3 s horizon: agents with a dominant,
// nearby, aligned lane prior follow that lane at constant speed and lateral
// offset; everyone else extrapolates at constant velocity. Output is aligned
// with the input agents by index.
//
// Throws std::invalid_argument when an agent has fewer than 2 history states
// and no finite observed speed.
std::vector<Trajectory> forecast_agents(const std::vector<AgentTrack>& agents,
                                        const std::vector<Landmark>& landmarks,
                                        const GridGeometry& geom,
                                        const ForecastConfig& config = {});

}  // namespace gridplan
