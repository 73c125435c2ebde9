#include "gridplan/scenario_bank.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "gridplan/lattice_sampler.hpp"
#include "gridplan/st_graph.hpp"

namespace gridplan {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<Vec2> straight_route(double x0, double x1, double y) {
  return {{x0, y}, {x1, y}};
}

Landmark lane_center(double x0, double x1, double y, const std::string& id) {
  Landmark lm;
  lm.kind = LandmarkKind::kLaneCenter;
  lm.points = {{x0, y}, {x1, y}};
  lm.id = id;
  return lm;
}

Polygon box_polygon(double cx, double cy, double half_len, double half_wid) {
  return {{cx - half_len, cy - half_wid},
          {cx + half_len, cy - half_wid},
          {cx + half_len, cy + half_wid},
          {cx - half_len, cy + half_wid}};
}

// Right-turn commuting route: straight, quarter arc, straight.
std::vector<Vec2> turn_route(double lead_in, double radius, double lead_out) {
  std::vector<Vec2> pts;
  for (double x = -5.0; x < lead_in; x += 2.0) pts.push_back({x, 0.0});
  const Vec2 center{lead_in, -radius};
  const int arc_steps = 24;
  for (int i = 0; i <= arc_steps; ++i) {
    const double ang = kPi / 2.0 - (kPi / 2.0) * i / arc_steps;
    pts.push_back({center.x + radius * std::cos(ang), center.y + radius * std::sin(ang)});
  }
  const Vec2 end_dir{0.0, -1.0};
  const Vec2 arc_end = pts.back();
  for (double d = 2.0; d <= lead_out; d += 2.0) {
    pts.push_back(arc_end + end_dir * d);
  }
  return pts;
}

// Synthesizes an open-loop command script by tracking a target path with the
// same pure-pursuit controller the simulator uses.
std::vector<AgentCommand> script_from_path(const AgentState& init, double wheelbase,
                                           const std::vector<Vec2>& path,
                                           const std::vector<double>& speeds, int steps) {
  TrackerConfig tracker;
  tracker.max_accel = 2.5;
  tracker.max_brake = 6.0;
  EgoState sim;
  sim.x = init.x;
  sim.y = init.y;
  sim.heading = init.heading;
  sim.v = init.v;
  sim.wheelbase = wheelbase;

  std::vector<AgentCommand> commands;
  commands.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    // Build a short straight-line plan along the path from the closest point.
    Trajectory plan;
    plan.start = {0.0, sim.x, sim.y, sim.heading, sim.v};
    double best_d = 1e18;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const double d = (path[i] - sim.position()).norm();
      if (d < best_d) {
        best_d = d;
        best_i = i;
      }
    }
    const double v_ref = speeds[std::min(static_cast<std::size_t>(k), speeds.size() - 1)];
    double walked = 0.0;
    std::size_t i = best_i;
    for (int w = 1; w <= kHorizonSteps; ++w) {
      walked += v_ref * kDt;
      double acc = 0.0;
      std::size_t j = i;
      Vec2 p = path[j];
      while (j + 1 < path.size() && acc + (path[j + 1] - path[j]).norm() < walked) {
        acc += (path[j + 1] - path[j]).norm();
        ++j;
      }
      if (j + 1 < path.size()) {
        const Vec2 dir = (path[j + 1] - path[j]).normalized();
        p = path[j] + dir * (walked - acc);
      } else {
        p = path.back();
      }
      plan.waypoints.push_back({kDt * w, p.x, p.y, sim.heading, v_ref});
    }
    const TrackerCommand cmd = pure_pursuit(sim, plan, tracker);
    commands.push_back({cmd.a, cmd.phi});
    const double kappa = 2.0 * std::tan(cmd.phi) / wheelbase;
    sim.x += sim.v * std::cos(sim.heading) * kDt;
    sim.y += sim.v * std::sin(sim.heading) * kDt;
    sim.heading = wrap_angle(sim.heading + sim.v * kappa * kDt);
    sim.v = std::max(0.0, sim.v + cmd.a * kDt);
  }
  return commands;
}

Scenario base_scenario(const std::string& name, double duration, double extent) {
  Scenario s;
  s.name = name;
  s.duration = duration;
  s.grid.extent = extent;
  s.grid.resolution = kDefaultResolution;
  return s;
}

Scenario make_lead_brake() {
  Scenario s = base_scenario("lead_brake", 10.0, 80.0);
  s.ego_init.v = 10.0;
  s.route.points = straight_route(-10.0, 200.0, 0.0);
  s.route.target_speed = 10.0;
  s.landmarks.push_back(lane_center(-10.0, 200.0, 0.0, "lane_ego"));
  s.landmarks.push_back(lane_center(-10.0, 200.0, 3.5, "lane_left"));

  AgentScript lead;
  lead.id = "lead";
  lead.init = {0.0, 25.0, 0.0, 0.0, 8.0};
  for (int k = 0; k < 10; ++k) lead.commands.push_back({0.0, 0.0});
  for (int k = 0; k < 90; ++k) lead.commands.push_back({-6.0, 0.0});
  s.agents.push_back(lead);
  return s;
}

Scenario make_static_obstacle() {
  Scenario s = base_scenario("static_obstacle", 12.0, 80.0);
  s.ego_init.v = 8.0;
  s.route.points = straight_route(-10.0, 200.0, 0.0);
  s.route.target_speed = 8.0;
  s.landmarks.push_back(lane_center(-10.0, 200.0, 0.0, "lane_ego"));
  s.landmarks.push_back(lane_center(-10.0, 200.0, 3.5, "lane_left"));
  s.static_obstacles.push_back(box_polygon(35.0, 0.0, 2.3, 1.0));
  s.stop_s = 39.0;  // arc length along the route (route starts at x = -10)
  return s;
}

Scenario make_cut_in() {
  Scenario s = base_scenario("cut_in", 10.0, 80.0);
  s.ego_init.v = 10.0;
  s.route.points = straight_route(-10.0, 200.0, 0.0);
  s.route.target_speed = 10.0;
  s.landmarks.push_back(lane_center(-10.0, 200.0, 0.0, "lane_ego"));
  s.landmarks.push_back(lane_center(-10.0, 200.0, 3.5, "lane_left"));

  AgentScript merger;
  merger.id = "merger";
  merger.init = {0.0, 18.0, 3.5, 0.0, 9.0};
  // Lane-change path into the ego lane, tracked into an open-loop script.
  std::vector<Vec2> path;
  for (double x = 18.0; x <= 40.0; x += 1.0) path.push_back({x, 3.5});
  for (double x = 41.0; x <= 70.0; x += 1.0) {
    const double u = std::clamp((x - 41.0) / 25.0, 0.0, 1.0);
    const double blend = u * u * (3.0 - 2.0 * u);
    path.push_back({x, 3.5 * (1.0 - blend)});
  }
  for (double x = 71.0; x <= 160.0; x += 2.0) path.push_back({x, 0.0});
  merger.commands = script_from_path(merger.init, merger.wheelbase(), path,
                                     std::vector<double>(1, 9.0), 100);
  s.agents.push_back(merger);
  return s;
}

Scenario make_turn_commute() {
  Scenario s = base_scenario("turn_commute", 14.0, 70.0);
  s.ego_init.v = 5.0;
  s.route.points = turn_route(15.0, 12.0, 24.0);
  s.route.source = RouteSource::kCommutingHistory;
  s.route.target_speed = 5.0;
  // Map-free: no landmarks, occupancy delineates the outer boundary.
  s.static_obstacles.push_back(box_polygon(24.0, 4.0, 14.0, 1.0));
  return s;
}

Scenario make_empty_road() {
  Scenario s = base_scenario("empty_road", 12.0, 80.0);
  s.ego_init.v = 10.0;
  s.route.points = straight_route(-5.0, 95.0, 0.0);
  s.route.target_speed = 10.0;
  s.landmarks.push_back(lane_center(-5.0, 95.0, 0.0, "lane_ego"));
  return s;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  return {"lead_brake", "static_obstacle", "cut_in", "turn_commute", "empty_road"};
}

Scenario builtin_scenario(const std::string& name) {
  if (name == "lead_brake") return make_lead_brake();
  if (name == "static_obstacle") return make_static_obstacle();
  if (name == "cut_in") return make_cut_in();
  if (name == "turn_commute") return make_turn_commute();
  if (name == "empty_road") return make_empty_road();
  throw std::invalid_argument("unknown builtin scenario: " + name);
}

PlannerSetup default_planner_setup() {
  PlannerSetup setup;
  setup.model.w_occ = 4.0;
  setup.model.w_pred = 1.0;
  setup.model.w_route = 6.0;
  setup.model.w_lat = 2.0;
  setup.model.alpha = 1.0;
  setup.model.beta = 1.0;
  setup.samplers.curve = true;
  setup.samplers.lattice = true;
  setup.lattice.lane_change = true;
  return setup;
}

PlannerSetup dataset_harness_setup() {
  PlannerSetup setup = default_planner_setup();
  setup.samplers.curve = false;
  setup.samplers.lattice = true;
  setup.lattice.cruise_speed_offsets = {0.0};
  setup.lattice.lateral_offsets = {0.0, -0.75, 0.75, -1.75, 1.75};
  setup.lattice.lane_change = true;
  setup.lattice.follow_gaps = {5.0};
  setup.lattice.overtake_gaps = {10.0};
  setup.lattice.stop_times = {3.0};
  return setup;
}

namespace {

struct WorldTransform {
  Vec2 offset;
  double angle{0.0};

  Vec2 apply(const Vec2& p) const { return p.rotated(angle) + offset; }
};

void apply_transform(PlanningFrame* frame, const WorldTransform& wt) {
  const Vec2 ego_pos = wt.apply(frame->ego.position());
  frame->ego.x = ego_pos.x;
  frame->ego.y = ego_pos.y;
  frame->ego.heading = wrap_angle(frame->ego.heading + wt.angle);
  for (AgentTrack& agent : frame->agents) {
    for (AgentState& st : agent.history) {
      const Vec2 p = wt.apply(st.position());
      st.x = p.x;
      st.y = p.y;
      st.heading = wrap_angle(st.heading + wt.angle);
    }
  }
  for (Landmark& lm : frame->landmarks) {
    for (Vec2& p : lm.points) p = wt.apply(p);
  }
  for (Vec2& p : frame->route.points) p = wt.apply(p);
  for (Polygon& poly : frame->static_obstacles) {
    for (Vec2& p : poly) p = wt.apply(p);
  }
}

double uniform(std::mt19937_64* rng, double lo, double hi) {
  const double u = static_cast<double>((*rng)() >> 11) / 9007199254740992.0;
  return lo + u * (hi - lo);
}

// Sum of |lateral offset to the route| over the waypoints; the ground-truth
// pick converges to the route.
double route_adherence(const Trajectory& traj, const ReferenceLine& ref) {
  double sum = 0.0;
  for (const Waypoint& wp : traj.waypoints) {
    sum += std::abs(project_to_frenet(wp.position(), ref).l);
  }
  return sum;
}

int pick_gt_index(const CandidateSet& set, const ReferenceLine& ref, Maneuver wanted) {
  int best = -1;
  double best_score = 1e18;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Trajectory& traj = set.candidates[i];
    const bool maneuver_ok =
        wanted == Maneuver::kLaneKeep
            ? (traj.maneuver == Maneuver::kLaneKeep ||
               traj.maneuver == Maneuver::kLaneChangeLeft ||
               traj.maneuver == Maneuver::kLaneChangeRight)
            : traj.maneuver == wanted;
    if (!maneuver_ok) continue;
    const double score = route_adherence(traj, ref);
    if (score < best_score) {
      best_score = score;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

CandidateSet harness_candidates(const LabeledFrame& labeled, const PlannerSetup& harness,
                                const EvalContext& ctx) {
  CandidateSet set;
  set.add(labeled.gt);
  const ReferenceLine ref =
      route_reference_line(labeled.frame.route);
  const StGraph st = build_st_graph(ref, ctx.forecasts, labeled.frame.agents,
                                    0.5 * labeled.frame.ego_length, harness.st);
  LatticeConfig lattice = harness.lattice;
  lattice.stop_s = labeled.stop_s;
  set.merge(
      lattice_sampler(labeled.frame.ego, ref, st, labeled.frame.route.target_speed, lattice));
  return set;
}

std::vector<MarginFrame> build_margin_frames(const std::vector<LabeledFrame>& dataset,
                                             const PlannerSetup& harness) {
  std::vector<MarginFrame> frames;
  frames.reserve(dataset.size());
  for (const LabeledFrame& labeled : dataset) {
    const EvalContext ctx =
        build_eval_context(labeled.frame, harness.model, harness.features, harness.forecast);
    const CandidateSet candidates = harness_candidates(labeled, harness, ctx);
    frames.push_back(make_margin_frame(ctx.planes, labeled.gt, candidates));
  }
  return frames;
}

double fraction_gt_cheapest(const std::vector<LabeledFrame>& dataset, const CostModel& model,
                            const PlannerSetup& harness) {
  if (dataset.empty()) return 0.0;
  int cheapest = 0;
  for (const LabeledFrame& labeled : dataset) {
    const EvalContext ctx =
        build_eval_context(labeled.frame, model, harness.features, harness.forecast);
    const CandidateSet candidates = harness_candidates(labeled, harness, ctx);
    const MarginFrame mf = make_margin_frame(ctx.planes, labeled.gt, candidates);
    // Candidate 0 is the ground truth itself; cheapest with first-index ties.
    double best = energy(model, mf.candidates[0]);
    int best_i = 0;
    for (std::size_t i = 1; i < mf.candidates.size(); ++i) {
      const double e = energy(model, mf.candidates[i]);
      if (e < best) {
        best = e;
        best_i = static_cast<int>(i);
      }
    }
    if (best_i == 0) ++cheapest;
  }
  return static_cast<double>(cheapest) / static_cast<double>(dataset.size());
}

namespace {

struct FrameDraft {
  PlanningFrame frame;
  std::optional<double> stop_s;
  Maneuver gt_maneuver{Maneuver::kLaneKeep};
};

FrameDraft draft_frame(const std::string& klass, std::mt19937_64* rng,
                       const DatasetConfig& config) {
  FrameDraft draft;
  PlanningFrame& frame = draft.frame;
  frame.traffic_light = TrafficLight::kPermitted;

  // Stop frames keep the comfortable-quintic peak deceleration (v/2) inside
  // the acceleration limit.
  const double target = klass == "turn"   ? uniform(rng, 4.0, 6.0)
                        : klass == "stop" ? uniform(rng, 6.0, 7.5)
                                          : uniform(rng, 6.0, 9.0);
  frame.route.target_speed = target;
  frame.ego.v = target;
  frame.ego.a = 0.0;

  if (klass == "turn") {
    frame.route.points = turn_route(uniform(rng, 12.0, 18.0), uniform(rng, 10.0, 14.0), 24.0);
    frame.route.source = RouteSource::kCommutingHistory;
    frame.ego.x = uniform(rng, -4.0, 0.0);
    frame.ego.y = uniform(rng, -0.2, 0.2);
    frame.ego.heading = uniform(rng, -0.03, 0.03);
  } else {
    frame.route.points = straight_route(-20.0, 120.0, 0.0);
    frame.ego.x = uniform(rng, -2.0, 2.0);
    frame.ego.heading = uniform(rng, -0.05, 0.05);
    if (klass == "lane_change") {
      frame.ego.y = (uniform(rng, 0.0, 1.0) < 0.5 ? -3.5 : 3.5) + uniform(rng, -0.2, 0.2);
      frame.landmarks.push_back(lane_center(-20.0, 120.0, frame.ego.y, "lane_origin"));
    } else {
      frame.ego.y = uniform(rng, -0.3, 0.3);
    }
    frame.landmarks.push_back(lane_center(-20.0, 120.0, 0.0, "lane_route"));
  }

  if (klass == "follow") {
    AgentTrack lead;
    lead.id = "lead";
    const double gap = uniform(rng, 18.0, 26.0);
    const double lead_v = std::max(1.0, target - uniform(rng, 3.0, 5.0));
    for (int h = -2; h <= 0; ++h) {
      lead.history.push_back(
          {h * kDt, frame.ego.x + gap + lead_v * h * kDt, 0.0, 0.0, lead_v});
    }
    frame.agents.push_back(std::move(lead));
    draft.gt_maneuver = Maneuver::kFollow;
  } else if (klass == "stop") {
    // Obstacle near the natural 3 s stopping distance plus the clearance.
    const double d = 1.5 * target + uniform(rng, 4.0, 6.0);
    frame.static_obstacles.push_back(box_polygon(frame.ego.x + d, 0.0, 2.0, 1.2));
    // Arc length along the route (the route starts at x = -20).
    draft.stop_s = frame.ego.x + d - 4.0 + 20.0;
    draft.gt_maneuver = Maneuver::kStop;
  }

  // Random rigid world transform exercises the Ego-ENU frame.
  WorldTransform wt;
  wt.angle = uniform(rng, -kPi, kPi);
  wt.offset = {uniform(rng, -20.0, 20.0), uniform(rng, -20.0, 20.0)};
  apply_transform(&frame, wt);

  const double res = config.grid_resolution;
  const Vec2 center{std::round(frame.ego.x / res) * res, std::round(frame.ego.y / res) * res};
  frame.grid = GridGeometry::centered(center, config.grid_extent, res);
  return draft;
}

}  // namespace

std::vector<LabeledFrame> generate_synthetic_dataset(const DatasetConfig& config) {
  const PlannerSetup harness = dataset_harness_setup();
  std::mt19937_64 rng(config.seed);

  std::vector<std::string> classes;
  classes.reserve(static_cast<std::size_t>(config.frames));
  const double total = config.p_cruise + config.p_lane_change + config.p_follow +
                       config.p_stop + config.p_turn;
  for (int i = 0; i < config.frames; ++i) {
    const double u = uniform(&rng, 0.0, total);
    if (u < config.p_cruise) {
      classes.push_back("cruise");
    } else if (u < config.p_cruise + config.p_lane_change) {
      classes.push_back("lane_change");
    } else if (u < config.p_cruise + config.p_lane_change + config.p_follow) {
      classes.push_back("follow");
    } else if (u < total - config.p_turn) {
      classes.push_back("stop");
    } else {
      classes.push_back("turn");
    }
  }

  std::vector<LabeledFrame> dataset;
  dataset.reserve(classes.size());
  for (const std::string& klass : classes) {
    bool done = false;
    for (int attempt = 0; attempt < config.max_retries && !done; ++attempt) {
      const FrameDraft draft = draft_frame(klass, &rng, config);
      const EvalContext ctx =
          build_eval_context(draft.frame, harness.model, harness.features, harness.forecast);
      const ReferenceLine ref =
          route_reference_line(draft.frame.route);
      const StGraph st = build_st_graph(ref, ctx.forecasts, draft.frame.agents,
                                        0.5 * draft.frame.ego_length, harness.st);
      LatticeConfig lattice = harness.lattice;
      lattice.stop_s = draft.stop_s;
      const CandidateSet candidates = lattice_sampler(
          draft.frame.ego, ref, st, draft.frame.route.target_speed, lattice);
      if (candidates.empty()) continue;
      const int gt_index = pick_gt_index(candidates, ref, draft.gt_maneuver);
      if (gt_index < 0) continue;
      Trajectory gt = candidates.candidates[static_cast<std::size_t>(gt_index)];
      gt.source = TrajectorySource::kHuman;

      // The ground truth must pass the safety checks on its own frame.
      if (trajectory_hits_static(gt, ctx.occ, draft.frame.ego_length, draft.frame.ego_width)) {
        continue;
      }
      if (trajectory_hits_forecasts(gt, ctx.forecasts, draft.frame.agents,
                                    draft.frame.ego_length, draft.frame.ego_width,
                                    harness.safety.lateral_margin,
                                    harness.safety.longitudinal_margin)) {
        continue;
      }
      if (!satisfies_limits(gt, harness.safety.limits)) continue;

      LabeledFrame labeled;
      labeled.frame = draft.frame;
      labeled.gt = std::move(gt);
      labeled.stop_s = draft.stop_s;
      labeled.klass = klass;
      dataset.push_back(std::move(labeled));
      done = true;
    }
    if (!done) {
      throw std::runtime_error("generate_synthetic_dataset: no feasible frame for class " +
                               klass);
    }
  }
  return dataset;
}

CorridorScene make_corridor_scene() {
  CorridorScene scene;
  scene.half_width = 1.75;

  PlanningFrame& frame = scene.frame;
  frame.ego.v = 8.0;
  frame.route.points = straight_route(-10.0, 80.0, 0.0);
  frame.route.target_speed = 8.0;
  frame.static_obstacles.push_back(box_polygon(25.0, 3.0, 40.0, 1.25));
  frame.static_obstacles.push_back(box_polygon(25.0, -3.0, 40.0, 1.25));
  frame.grid = GridGeometry::centered({frame.ego.x, frame.ego.y}, 60.0, kDefaultResolution);

  const CostModel dummy;  // planes are model-independent
  const EvalContext ctx = build_eval_context(frame, dummy);

  GanFrame& gf = scene.gan_frame;
  const ReferenceLine ref =
      route_reference_line(frame.route);
  gf.ctx = make_generator_context(frame.ego, ref, frame.route.target_speed);
  gf.planes = ctx.planes;
  // Centerline cruise at constant speed; exactly expressible by the
  // generator's zero coefficients.
  gf.gt = ToyGenerator::zeros(4).decode(gf.ctx,
                                        std::vector<double>(4, 0.0));
  gf.gt.source = TrajectorySource::kHuman;
  return scene;
}

bool inside_corridor(const Trajectory& traj, const CorridorScene& scene) {
  for (const Waypoint& wp : traj.waypoints) {
    if (std::abs(wp.y) >= scene.half_width) return false;
  }
  return true;
}

}  // namespace gridplan
