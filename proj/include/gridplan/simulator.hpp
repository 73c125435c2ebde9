#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gridplan/curve_sampler.hpp"
#include "gridplan/expert_db.hpp"
#include "gridplan/frame.hpp"
#include "gridplan/generator.hpp"
#include "gridplan/lattice_sampler.hpp"
#include "gridplan/planner.hpp"
#include "gridplan/st_graph.hpp"
#include "gridplan/types.hpp"

namespace gridplan {

struct SamplerToggles {
  bool curve{true};
  bool retrieval{false};
  bool lattice{true};
  bool generator{false};
};

struct TrackerConfig {
  double lookahead_time{0.6};  // [s]
  double min_lookahead{1.0};   // [m]
  double speed_kp{2.0};        // [1/s]
  double max_steer{0.55};      // [rad]
  double max_accel{3.0};       // [m/s^2]
  double max_brake{6.0};       // [m/s^2]
};

struct SimConfig {
  TrackerConfig tracker;
  double completion_radius{2.0};      // [m] from the route end
  double deviation_threshold{2.5};    // [m] off-route
  double lost_control_threshold{1.5}; // [m] tracker lateral error
  double discomfort_lat_accel{3.0};   // [m/s^2]
  double discomfort_jerk{5.0};        // [m/s^3]
  int discomfort_sustain_steps{3};    // 0.3 s
};

// Everything needed to plan one frame: trained models, sampler toggles and
// sweeps, safety and tracker settings.
struct PlannerSetup {
  CostModel model;
  std::optional<ToyGenerator> generator;
  const ExpertTrajectoryDb* expert_db{nullptr};
  SamplerToggles samplers;
  CurveSamplerConfig curve;
  LatticeConfig lattice;
  RetrievalConfig retrieval;
  SafetyConfig safety;
  FeatureConfig features;
  ForecastConfig forecast;
  StConfig st;
  SimConfig sim;
  int generator_draws{8};
  std::uint64_t seed{1};
};

struct FramePlan {
  EvalContext ctx;
  CandidateSet candidates;
  PlannerDecision decision;
};

// One planning tick: context, sampling, ranking, safety. `frame_seed` feeds
// the generator draws; `previous` enables cross-frame consistency.
FramePlan plan_frame(const PlanningFrame& frame, const PlannerSetup& setup,
                     const Trajectory* previous, std::uint64_t frame_seed);

struct TrackerCommand {
  double a{0.0};
  double phi{0.0};
  double lateral_error{0.0};  // distance from the ego to the plan [m]
};

// Pure-pursuit steering with proportional + feedforward speed control.
TrackerCommand pure_pursuit(const EgoState& ego, const Trajectory& plan,
                            const TrackerConfig& config);

struct SimEvent {
  enum class Kind { kCollision, kDeviation, kDiscomfort, kFallback, kLostControl };
  int step{0};
  Kind kind{Kind::kCollision};
  std::string detail;
};

const char* to_string(SimEvent::Kind k);

// One executed step of the trace (state before the step plus the commands
// and decision applied during it).
struct TraceRow {
  int step{0};
  double t{0.0};
  double x{0.0};
  double y{0.0};
  double heading{0.0};
  double v{0.0};
  double a_cmd{0.0};
  double phi_cmd{0.0};
  TrajectorySource source{TrajectorySource::kCurve};
  double cost{0.0};
  int n_candidates{0};
  bool fallback{false};
  bool collision{false};
  bool deviation{false};
  double lateral_error{0.0};
  bool completed{false};
};

struct ClosedLoopMetrics {
  double mean_lat_accel{0.0};
  double max_lat_accel{0.0};
  double mean_jerk{0.0};
  double max_jerk{0.0};
  double mean_steering_delta{0.0};
  int collisions{0};
  int deviations{0};
  int discomforts{0};
  int fallbacks{0};
  int lost_controls{0};
  double completion_time{0.0};
  bool completed{false};
  double distance_traveled{0.0};
  double interventions_per_km{0.0};
};

struct SimAgent {
  AgentScript script;
  AgentState state;
  std::vector<AgentState> history;  // absolute timestamps, oldest first
};

struct SimState {
  double clock{0.0};
  int step{0};
  EgoState ego;
  std::vector<SimAgent> agents;
  std::optional<Trajectory> previous_plan;
  std::vector<SimEvent> events;  // append-only
  double last_phi{0.0};
};

SimState init_sim(const Scenario& scenario);
// Builds the current planning frame (grid centered on the ego, agent
// histories made frame-relative).
PlanningFrame frame_from_sim(const SimState& state, const Scenario& scenario);
// Advances ego (tracking the decision) and scripted agents by one 0.1 s
// tick. Collisions are recorded and the run continues.
TrackerCommand sim_step(SimState* state, const PlannerDecision& decision,
                        const Scenario& scenario, const SimConfig& config);

// Comfort metrics and event counts from an executed trace (finite
// differences over the recorded states).
ClosedLoopMetrics compute_metrics(const std::vector<TraceRow>& trace,
                                  const std::vector<SimEvent>& events,
                                  const SimConfig& config);
// Derives discomfort / lost-control episodes from a trace.
std::vector<SimEvent> derive_trace_events(const std::vector<TraceRow>& trace,
                                          const SimConfig& config);

using FrameObserver = std::function<void(int step, const PlanningFrame& frame,
                                         const FramePlan& plan)>;

struct RunResult {
  ClosedLoopMetrics metrics;
  std::vector<TraceRow> trace;
  std::vector<SimEvent> events;
};

// Closed loop at 10 Hz: replan every step with the configured samplers and
// safety layer until the route end or the scenario duration. Deterministic
// for a fixed (scenario, setup) pair. Throws std::invalid_argument listing
// violations when the scenario is invalid.
RunResult run_closed_loop(const Scenario& scenario, const PlannerSetup& setup,
                          const FrameObserver& observer = nullptr);

struct SamplerCombo {
  std::string name;
  SamplerToggles toggles;
};

struct ComparisonRow {
  std::string scenario;
  std::string combo;
  ClosedLoopMetrics metrics;
};

// Runs every combo over every scenario.
std::vector<ComparisonRow> compare_samplers(const std::vector<Scenario>& scenarios,
                                            const std::vector<SamplerCombo>& combos,
                                            const PlannerSetup& base);

// Text renderings shared by the CLI and the tests.
std::string format_metrics(const ClosedLoopMetrics& metrics);
std::string format_comparison(const std::vector<ComparisonRow>& rows);
std::string trace_csv_header();
std::string trace_row_csv(const TraceRow& row);

}  // namespace gridplan
