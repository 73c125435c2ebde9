#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridplan/evaluator.hpp"
#include "gridplan/generator.hpp"
#include "gridplan/simulator.hpp"
#include "gridplan/types.hpp"

namespace gridplan {

// Built-in scenarios used by the CLI (`--scenario builtin:<name>`) and the
// closed-loop acceptance suite.
std::vector<std::string> builtin_scenario_names();
// Throws std::invalid_argument for an unknown name.
Scenario builtin_scenario(const std::string& name);

// Planner setup tuned for the closed-loop scenario suite.
PlannerSetup default_planner_setup();

// Lattice and sampler settings used for dataset generation, cost training,
// and the ranking harness: a single longitudinal profile per maneuver so
// candidates are spatially distinct, plus a rich lateral sweep.
PlannerSetup dataset_harness_setup();

struct DatasetConfig {
  int frames{200};
  std::uint64_t seed{123};
  double p_cruise{0.30};
  double p_lane_change{0.20};
  double p_follow{0.20};
  double p_stop{0.15};
  double p_turn{0.15};
  double grid_extent{60.0};
  double grid_resolution{0.2};
  int max_retries{25};
};

struct LabeledFrame {
  PlanningFrame frame;
  Trajectory gt;
  std::optional<double> stop_s;
  std::string klass;
};

// Deterministic synthetic dataset over {cruise, lane change, follow, stop,
// turn-with-commuting-route} frames; each ground truth is a lattice
// candidate that passes the safety checks on its own frame. Throws
// std::runtime_error when a class cannot produce a feasible frame within
// the retry cap.
std::vector<LabeledFrame> generate_synthetic_dataset(const DatasetConfig& config);

// Candidate set used for training and ranking: the ground truth first, then
// the harness lattice candidates for the frame.
CandidateSet harness_candidates(const LabeledFrame& labeled, const PlannerSetup& harness,
                                const EvalContext& ctx);

// Margin frames for max-margin training over a labeled dataset.
std::vector<MarginFrame> build_margin_frames(const std::vector<LabeledFrame>& dataset,
                                             const PlannerSetup& harness);

// Fraction of frames whose ground truth ranks cheapest among
// gt + lattice candidates under the model.
double fraction_gt_cheapest(const std::vector<LabeledFrame>& dataset, const CostModel& model,
                            const PlannerSetup& harness);

// Single zero-cost-corridor scene for generative-planner training: straight
// route between static walls, ground truth on the centerline.
struct CorridorScene {
  PlanningFrame frame;
  GanFrame gan_frame;
  double half_width{1.75};
};
CorridorScene make_corridor_scene();

// True when every waypoint stays strictly inside the corridor.
bool inside_corridor(const Trajectory& traj, const CorridorScene& scene);

}  // namespace gridplan
