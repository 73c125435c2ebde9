#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gridplan/bev_raster.hpp"
#include "gridplan/grid.hpp"
#include "gridplan/types.hpp"

namespace gridplan {

struct FeatureConfig {
  double inflation{1.0};             // occupancy cost decay distance [m]
  double route_distance_norm{20.0};  // distance mapped to feature 1.0 [m]
  double lateral_offset_norm{5.0};   // lateral offset mapped to feature 1.0 [m]
  // Distances below this are treated as on-route (feature exactly 0), so
  // candidates sharing the route tie exactly and the deterministic
  // first-index tie-break decides.
  double route_dead_zone{0.5};
};

// Hand-built feature planes the cost volume is a linear function of. The
// occupancy and prediction planes are shared with the explicit alpha / beta
// cost terms; route planes are exact point-to-polyline distances.
struct FeaturePlanes {
  GridGeometry geom;
  int steps{kHorizonSteps};
  ScalarField occ_cost;        // inflated occupancy cost, [0, 1]
  PredictionGrid pred;         // per-timestep occupancy probability, [0, 1]
  ScalarField route_distance;  // normalized distance to the route, [0, 1]
  ScalarField lateral_offset;  // normalized |lateral offset| to the route, [0, 1]
};

// The raster argument is optional; when given its geometry must match (the
// planes replace a learned decode of it). Throws on geometry mismatch or a
// route with fewer than 2 points.
FeaturePlanes build_feature_planes(const BevRaster* raster, const OccupancyGrid& occ,
                                   const PredictionGrid& pred, const Route& route,
                                   const FeatureConfig& config = {});

// Linear cost model over the feature planes plus the fixed alpha / beta
// weights on the raw occupancy and prediction terms.
struct CostModel {
  double w_occ{0.0};
  double w_pred{0.0};
  double w_route{0.0};
  double w_lat{0.0};
  double w_bias{0.0};
  double alpha{1.0};
  double beta{1.0};

  std::array<double, 5> weights() const { return {w_occ, w_pred, w_route, w_lat, w_bias}; }
  void set_weights(const std::array<double, 5>& w) {
    w_occ = w[0];
    w_pred = w[1];
    w_route = w[2];
    w_lat = w[3];
    w_bias = w[4];
  }
  static const std::array<std::string, 5>& feature_names();
};

// C(i, j, t) = w . features(i, j, t); linear in the weights.
CostVolume cost_volume(const CostModel& model, const FeaturePlanes& planes);

struct SoftSample {
  double value{0.0};
  double ddx{0.0};
  double ddy{0.0};
  bool out_of_extent{false};
};

// Bilinear interpolation over the four surrounding cell centers with the
// analytic spatial gradient. Out-of-extent points return the field's
// boundary value with zero gradient, flagged.
SoftSample sample_soft(const ScalarField& field, const Vec2& p);
SoftSample sample_soft(const SpaceTimeField& field, const Vec2& p, double t);

struct CostBreakdown {
  double total{0.0};
  double volume_term{0.0};      // sum of C samples
  double occupancy_term{0.0};   // alpha * sum of O_cc samples
  double prediction_term{0.0};  // beta * sum of G samples
  std::vector<double> per_waypoint;
  bool out_of_extent{false};
};

// E(s) = sum_t [C(s_t) + alpha * O_cc(s_t) + beta * G(s_t)] over the 30
// waypoints.
CostBreakdown trajectory_cost(const Trajectory& traj, const CostVolume& volume,
                              const ScalarField& occ_cost, const PredictionGrid& grid,
                              double alpha, double beta);

// Diff(gt, cand) = per-waypoint L2 distance + occupancy + prediction cost
// along the candidate. Zero for the ground truth itself in free space.
double diff_metric(const Trajectory& gt, const Trajectory& cand, const ScalarField& occ_cost,
                   const PredictionGrid& grid);

// Per-trajectory feature-plane sums; E is linear in these.
struct FeatureSums {
  double occ{0.0};
  double pred{0.0};
  double route{0.0};
  double lat{0.0};
  double count{0.0};  // bias accumulator (number of waypoints)

  std::array<double, 5> as_array() const { return {occ, pred, route, lat, count}; }
};

FeatureSums feature_sums(const Trajectory& traj, const FeaturePlanes& planes);
double energy(const CostModel& model, const FeatureSums& sums);

// Precomputed per-frame quantities for max-margin training.
struct MarginFrame {
  FeatureSums gt;
  std::vector<FeatureSums> candidates;
  std::vector<double> diffs;  // Diff(gt, cand_i)
};

MarginFrame make_margin_frame(const FeaturePlanes& planes, const Trajectory& gt,
                              const CandidateSet& candidates);

struct MaxMarginResult {
  double loss{0.0};
  std::array<double, 5> grad{};  // d loss / d weights
  int argmax{-1};
};

// Hinged structured margin: max(0, max_i [E(gt) - E(cand_i) + Diff_i]).
// Ties break to the first index; the gradient is the exact subgradient.
MaxMarginResult max_margin_eval(const CostModel& model, const MarginFrame& frame);
// Convenience form; throws on an empty candidate set.
MaxMarginResult max_margin_loss(const CostModel& model, const FeaturePlanes& planes,
                                const Trajectory& gt, const CandidateSet& candidates);

struct CostTrainConfig {
  double learning_rate{5e-4};
  int epochs{400};
  double tolerance{1e-6};
  double divergence_threshold{1e6};
  int max_backoffs{40};
};

struct CostTrainResult {
  CostModel model;
  std::vector<double> loss_trace;  // mean loss per accepted epoch
};

// Full-batch gradient descent on the mean margin loss with step-size backoff
// on any increase; the accepted loss trace is non-increasing. Throws
// std::runtime_error on divergence.
CostTrainResult train_cost_model(const std::vector<MarginFrame>& frames, const CostModel& init,
                                 const CostTrainConfig& config = {});

}  // namespace gridplan
