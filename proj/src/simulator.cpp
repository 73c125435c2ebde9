#include "gridplan/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gridplan {

namespace {

double distance_to_polyline(const Vec2& p, const std::vector<Vec2>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 a = pts[i];
    const Vec2 ab = pts[i + 1] - a;
    const double len2 = ab.squared_norm();
    if (len2 < 1e-18) continue;
    const double u = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    best = std::min(best, (p - (a + ab * u)).norm());
  }
  return best;
}

double distance_to_plan(const Vec2& p, const Trajectory& plan) {
  std::vector<Vec2> pts;
  pts.reserve(plan.waypoints.size() + 1);
  pts.push_back(plan.start.position());
  for (const Waypoint& wp : plan.waypoints) pts.push_back(wp.position());
  return distance_to_polyline(p, pts);
}

void advance_bicycle(double* x, double* y, double* heading, double* v, double a, double phi,
                     double wheelbase) {
  const double kappa = 2.0 * std::tan(phi) / wheelbase;
  *x += *v * std::cos(*heading) * kDt;
  *y += *v * std::sin(*heading) * kDt;
  *heading = wrap_angle(*heading + *v * kappa * kDt);
  *v = std::max(0.0, *v + a * kDt);
}

}  // namespace

const char* to_string(SimEvent::Kind k) {
  switch (k) {
    case SimEvent::Kind::kCollision: return "collision";
    case SimEvent::Kind::kDeviation: return "deviation";
    case SimEvent::Kind::kDiscomfort: return "discomfort";
    case SimEvent::Kind::kFallback: return "fallback";
    case SimEvent::Kind::kLostControl: return "lost_control";
  }
  return "collision";
}

FramePlan plan_frame(const PlanningFrame& frame, const PlannerSetup& setup,
                     const Trajectory* previous, std::uint64_t frame_seed) {
  FramePlan plan;
  plan.ctx = build_eval_context(frame, setup.model, setup.features, setup.forecast);

  const bool route_ok = frame.route.points.size() >= 2;
  std::optional<ReferenceLine> ref;
  if (route_ok) {
    ref = route_reference_line(frame.route);
  }

  // Lattice first: its target-speed cruise profile is the preferred choice
  // when on-route candidates tie exactly.
  CandidateSet candidates;
  if (setup.samplers.lattice && ref) {
    const StGraph st = build_st_graph(*ref, plan.ctx.forecasts, frame.agents,
                                      0.5 * frame.ego_length, setup.st);
    candidates.merge(
        lattice_sampler(frame.ego, *ref, st, frame.route.target_speed, setup.lattice));
  }
  if (setup.samplers.curve) {
    candidates.merge(curve_sampler(frame.ego, setup.curve));
  }
  if (setup.samplers.retrieval && setup.expert_db != nullptr) {
    candidates.merge(retrieval_sampler(frame.ego, *setup.expert_db, setup.retrieval));
  }
  if (setup.samplers.generator && setup.generator && ref) {
    const GeneratorContext gctx =
        make_generator_context(frame.ego, *ref, frame.route.target_speed);
    candidates.merge(
        sample_generator(*setup.generator, gctx, setup.generator_draws, frame_seed));
  }
  plan.candidates = std::move(candidates);

  SafetyConfig safety = setup.safety;
  safety.ego_length = frame.ego_length;
  safety.ego_width = frame.ego_width;
  if (plan.candidates.empty()) {
    plan.decision.chosen = fallback_trajectory(frame.ego, safety.comfort_brake);
    plan.decision.fallback = true;
    plan.decision.chosen_index = -1;
    return plan;
  }
  const PlannerDecision ranked = select_best(plan.candidates, plan.ctx);
  plan.decision = safety_layer(ranked, plan.candidates, plan.ctx.occ, plan.ctx.forecasts,
                               frame.agents, previous, frame.ego, safety);
  return plan;
}

TrackerCommand pure_pursuit(const EgoState& ego, const Trajectory& plan,
                            const TrackerConfig& config) {
  TrackerCommand cmd;
  cmd.lateral_error = distance_to_plan(ego.position(), plan);

  const double lookahead = std::max(config.min_lookahead, ego.v * config.lookahead_time);
  // First plan point at or beyond the lookahead distance, interpolated.
  Vec2 target = plan.waypoints.empty() ? plan.start.position()
                                       : plan.waypoints.back().position();
  Vec2 prev = plan.start.position();
  bool found = false;
  for (const Waypoint& wp : plan.waypoints) {
    const double d_prev = (prev - ego.position()).norm();
    const double d_here = (wp.position() - ego.position()).norm();
    if (d_here >= lookahead) {
      const double span = d_here - d_prev;
      const double u = span > 1e-9 ? std::clamp((lookahead - d_prev) / span, 0.0, 1.0) : 1.0;
      target = prev + (wp.position() - prev) * u;
      found = true;
      break;
    }
    prev = wp.position();
  }
  (void)found;

  const Vec2 local = (target - ego.position()).rotated(-ego.heading);
  const double d2 = local.squared_norm();
  if (d2 > 1e-6) {
    const double kappa_cmd = 2.0 * local.y / d2;
    cmd.phi = std::clamp(std::atan(0.5 * kappa_cmd * ego.wheelbase), -config.max_steer,
                         config.max_steer);
  }

  if (!plan.waypoints.empty()) {
    // Proportional control against the plan speed half a lookahead ahead;
    // feedforward on the plan's own acceleration closes an unstable loop
    // with the replanner, so it is deliberately absent.
    const int ref_step = std::clamp(
        static_cast<int>(std::lround(0.5 * config.lookahead_time / kDt)), 1,
        static_cast<int>(plan.waypoints.size()));
    const double v_ref = plan.waypoints[static_cast<std::size_t>(ref_step - 1)].v;
    cmd.a = std::clamp(config.speed_kp * (v_ref - ego.v), -config.max_brake,
                       config.max_accel);
  }
  return cmd;
}

SimState init_sim(const Scenario& scenario) {
  SimState state;
  state.ego = scenario.ego_init;
  state.last_phi = scenario.ego_init.phi;
  for (const AgentScript& script : scenario.agents) {
    SimAgent agent;
    agent.script = script;
    agent.state = script.init;
    agent.state.t = 0.0;
    agent.history = script.history;  // pre-start states carry t <= -0.1
    agent.history.push_back(agent.state);
    state.agents.push_back(std::move(agent));
  }
  return state;
}

PlanningFrame frame_from_sim(const SimState& state, const Scenario& scenario) {
  PlanningFrame frame;
  frame.ego = state.ego;
  frame.ego_length = scenario.ego_length;
  frame.ego_width = scenario.ego_width;
  frame.landmarks = scenario.landmarks;
  frame.route = scenario.route;
  frame.static_obstacles = scenario.static_obstacles;
  frame.traffic_light = scenario.traffic_light;

  const double res = scenario.grid.resolution;
  const Vec2 center{std::round(state.ego.x / res) * res, std::round(state.ego.y / res) * res};
  frame.grid = GridGeometry::centered(center, scenario.grid.extent, res);

  for (const SimAgent& agent : state.agents) {
    AgentTrack track;
    track.id = agent.script.id;
    track.length = agent.script.length;
    track.width = agent.script.width;
    track.cls = agent.script.cls;
    const std::size_t keep = std::min(agent.history.size(),
                                      static_cast<std::size_t>(kHistorySteps));
    track.history.assign(agent.history.end() - static_cast<std::ptrdiff_t>(keep),
                         agent.history.end());
    for (AgentState& s : track.history) s.t -= state.clock;
    frame.agents.push_back(std::move(track));
  }
  return frame;
}

TrackerCommand sim_step(SimState* state, const PlannerDecision& decision,
                        const Scenario& scenario, const SimConfig& config) {
  const TrackerCommand cmd = pure_pursuit(state->ego, decision.chosen, config.tracker);

  EgoState& ego = state->ego;
  advance_bicycle(&ego.x, &ego.y, &ego.heading, &ego.v, cmd.a, cmd.phi, ego.wheelbase);
  ego.a = cmd.a;
  ego.set_steering(cmd.phi);

  for (SimAgent& agent : state->agents) {
    AgentCommand ac{0.0, 0.0};
    if (!agent.script.commands.empty()) {
      const std::size_t idx = std::min(static_cast<std::size_t>(state->step),
                                       agent.script.commands.size() - 1);
      ac = agent.script.commands[idx];
    }
    advance_bicycle(&agent.state.x, &agent.state.y, &agent.state.heading, &agent.state.v, ac.a,
                    ac.phi, agent.script.wheelbase());
    agent.state.t = state->clock + kDt;
    agent.history.push_back(agent.state);
    if (agent.history.size() > 4 * static_cast<std::size_t>(kHistorySteps)) {
      agent.history.erase(agent.history.begin(),
                          agent.history.end() - 2 * static_cast<std::ptrdiff_t>(kHistorySteps));
    }
  }

  state->clock += kDt;
  ++state->step;
  (void)scenario;
  return cmd;
}

std::vector<SimEvent> derive_trace_events(const std::vector<TraceRow>& trace,
                                          const SimConfig& config) {
  std::vector<SimEvent> events;
  const int n = static_cast<int>(trace.size());
  // Lateral acceleration and jerk by finite differences over the executed
  // state sequence.
  std::vector<double> lat_accel(static_cast<std::size_t>(n), 0.0);
  std::vector<double> accel(static_cast<std::size_t>(n), 0.0);
  std::vector<double> jerk(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    const double dtheta = wrap_angle(trace[i + 1].heading - trace[i].heading);
    lat_accel[i] = std::abs(trace[i].v * dtheta / kDt);
    accel[i] = (trace[i + 1].v - trace[i].v) / kDt;
  }
  for (int i = 1; i + 1 < n; ++i) {
    jerk[i] = (accel[i] - accel[i - 1]) / kDt;
  }

  int run = 0;
  for (int i = 0; i < n; ++i) {
    const bool uncomfortable = lat_accel[static_cast<std::size_t>(i)] > config.discomfort_lat_accel ||
                               std::abs(jerk[static_cast<std::size_t>(i)]) > config.discomfort_jerk;
    run = uncomfortable ? run + 1 : 0;
    if (run == config.discomfort_sustain_steps) {
      events.push_back({trace[static_cast<std::size_t>(i)].step, SimEvent::Kind::kDiscomfort,
                        "sustained discomfort"});
    }
  }
  bool lost = false;
  for (const TraceRow& row : trace) {
    const bool now = row.lateral_error > config.lost_control_threshold;
    if (now && !lost) {
      events.push_back({row.step, SimEvent::Kind::kLostControl, "tracker lateral error"});
    }
    lost = now;
  }
  return events;
}

ClosedLoopMetrics compute_metrics(const std::vector<TraceRow>& trace,
                                  const std::vector<SimEvent>& events,
                                  const SimConfig& config) {
  ClosedLoopMetrics m;
  const int n = static_cast<int>(trace.size());
  if (n == 0) return m;

  double sum_lat = 0.0;
  double sum_jerk = 0.0;
  double sum_dphi = 0.0;
  std::vector<double> accel(static_cast<std::size_t>(n), 0.0);
  int lat_count = 0;
  for (int i = 0; i + 1 < n; ++i) {
    const double dtheta = wrap_angle(trace[i + 1].heading - trace[i].heading);
    const double lat = std::abs(trace[i].v * dtheta / kDt);
    sum_lat += lat;
    m.max_lat_accel = std::max(m.max_lat_accel, lat);
    accel[static_cast<std::size_t>(i)] = (trace[i + 1].v - trace[i].v) / kDt;
    ++lat_count;
  }
  int jerk_count = 0;
  for (int i = 1; i + 1 < n; ++i) {
    const double j = std::abs((accel[static_cast<std::size_t>(i)] -
                               accel[static_cast<std::size_t>(i - 1)]) / kDt);
    sum_jerk += j;
    m.max_jerk = std::max(m.max_jerk, j);
    ++jerk_count;
  }
  for (int i = 0; i + 1 < n; ++i) {
    sum_dphi += std::abs(trace[i + 1].phi_cmd - trace[i].phi_cmd);
  }
  m.mean_lat_accel = lat_count > 0 ? sum_lat / lat_count : 0.0;
  m.mean_jerk = jerk_count > 0 ? sum_jerk / jerk_count : 0.0;
  m.mean_steering_delta = n > 1 ? sum_dphi / (n - 1) : 0.0;

  bool prev_collision = false;
  bool prev_deviation = false;
  bool prev_fallback = false;
  for (const TraceRow& row : trace) {
    if (row.collision && !prev_collision) ++m.collisions;
    if (row.deviation && !prev_deviation) ++m.deviations;
    if (row.fallback && !prev_fallback) ++m.fallbacks;
    prev_collision = row.collision;
    prev_deviation = row.deviation;
    prev_fallback = row.fallback;
    m.distance_traveled += row.v * kDt;
    if (row.completed && !m.completed) {
      m.completed = true;
      m.completion_time = row.t + kDt;
    }
  }
  for (const SimEvent& e : events) {
    if (e.kind == SimEvent::Kind::kDiscomfort) ++m.discomforts;
    if (e.kind == SimEvent::Kind::kLostControl) ++m.lost_controls;
  }
  if (!m.completed) {
    m.completion_time = trace.back().t + kDt;
  }
  const double km = m.distance_traveled / 1000.0;
  m.interventions_per_km = km > 1e-9 ? (m.collisions + m.fallbacks) / km : 0.0;
  (void)config;
  return m;
}

RunResult run_closed_loop(const Scenario& scenario, const PlannerSetup& setup,
                          const FrameObserver& observer) {
  const std::vector<std::string> violations = validate_scenario(scenario);
  if (!violations.empty()) {
    std::ostringstream os;
    os << "invalid scenario '" << scenario.name << "':";
    for (const std::string& v : violations) os << "\n  - " << v;
    throw std::invalid_argument(os.str());
  }

  PlannerSetup local = setup;
  if (scenario.stop_s) local.lattice.stop_s = scenario.stop_s;

  SimState state = init_sim(scenario);
  const ReferenceLine route_ref =
      route_reference_line(scenario.route);
  const double route_end = route_ref.length();

  RunResult result;
  const int n_steps = static_cast<int>(std::lround(scenario.duration / kDt));
  for (int step = 0; step < n_steps; ++step) {
    const PlanningFrame frame = frame_from_sim(state, scenario);
    const Trajectory* previous =
        state.previous_plan ? &(*state.previous_plan) : nullptr;
    const std::uint64_t frame_seed =
        local.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(step + 1));
    FramePlan plan = plan_frame(frame, local, previous, frame_seed);
    if (observer) observer(step, frame, plan);

    TraceRow row;
    row.step = step;
    row.t = state.clock;
    row.x = state.ego.x;
    row.y = state.ego.y;
    row.heading = state.ego.heading;
    row.v = state.ego.v;
    row.source = plan.decision.chosen.source;
    row.n_candidates = static_cast<int>(plan.candidates.size());
    row.fallback = plan.decision.fallback;
    if (plan.decision.fallback) {
      state.events.push_back({step, SimEvent::Kind::kFallback, "no validated candidate"});
      row.cost = 0.0;
    } else {
      for (const RankedCandidate& rc : plan.decision.ranked) {
        if (rc.index == plan.decision.chosen_index) {
          row.cost = rc.cost.total;
          break;
        }
      }
    }

    const TrackerCommand cmd = sim_step(&state, plan.decision, scenario, local.sim);
    row.a_cmd = cmd.a;
    row.phi_cmd = cmd.phi;
    row.lateral_error = cmd.lateral_error;
    state.previous_plan = plan.decision.chosen;

    // Post-step collision and deviation flags.
    const OrientedBox ego_box{state.ego.position(), state.ego.heading, scenario.ego_length,
                              scenario.ego_width};
    bool collision = false;
    for (const SimAgent& agent : state.agents) {
      const OrientedBox agent_box{agent.state.position(), agent.state.heading,
                                  agent.script.length, agent.script.width};
      if (boxes_overlap(ego_box, agent_box)) {
        collision = true;
        state.events.push_back({step, SimEvent::Kind::kCollision, agent.script.id});
      }
    }
    for (const Polygon& poly : scenario.static_obstacles) {
      if (box_overlaps_polygon(ego_box, poly)) {
        collision = true;
        state.events.push_back({step, SimEvent::Kind::kCollision, "static"});
      }
    }
    row.collision = collision;

    const double off_route = distance_to_polyline(state.ego.position(), route_ref.points());
    row.deviation = off_route > local.sim.deviation_threshold;
    if (row.deviation) {
      state.events.push_back({step, SimEvent::Kind::kDeviation, "off route"});
    }

    const FrenetState fr = project_to_frenet(state.ego.position(), route_ref);
    row.completed = fr.s >= route_end - local.sim.completion_radius &&
                    std::abs(fr.l) <= local.sim.completion_radius;
    result.trace.push_back(row);
    if (row.completed) break;
  }

  const std::vector<SimEvent> derived = derive_trace_events(result.trace, local.sim);
  result.events = state.events;
  result.events.insert(result.events.end(), derived.begin(), derived.end());
  result.metrics = compute_metrics(result.trace, result.events, local.sim);
  return result;
}

std::vector<ComparisonRow> compare_samplers(const std::vector<Scenario>& scenarios,
                                            const std::vector<SamplerCombo>& combos,
                                            const PlannerSetup& base) {
  std::vector<ComparisonRow> rows;
  for (const Scenario& scenario : scenarios) {
    for (const SamplerCombo& combo : combos) {
      PlannerSetup setup = base;
      setup.samplers = combo.toggles;
      const RunResult run = run_closed_loop(scenario, setup);
      rows.push_back({scenario.name, combo.name, run.metrics});
    }
  }
  return rows;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string format_metrics(const ClosedLoopMetrics& m) {
  std::ostringstream os;
  os << "lat_accel mean/max: " << fmt(m.mean_lat_accel) << " / " << fmt(m.max_lat_accel)
     << " m/s^2\n";
  os << "jerk mean/max: " << fmt(m.mean_jerk) << " / " << fmt(m.max_jerk) << " m/s^3\n";
  os << "steering delta mean: " << fmt(m.mean_steering_delta) << " rad\n";
  os << "events: collisions " << m.collisions << ", deviations " << m.deviations
     << ", discomforts " << m.discomforts << ", fallbacks " << m.fallbacks
     << ", lost_control " << m.lost_controls << "\n";
  os << "completed: " << (m.completed ? "yes" : "no") << " at " << fmt(m.completion_time)
     << " s, distance " << fmt(m.distance_traveled) << " m\n";
  os << "interventions_per_km: " << fmt(m.interventions_per_km) << "\n";
  return os.str();
}

std::string format_comparison(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  os << "scenario,combo,collisions,deviations,discomforts,fallbacks,lost_control,"
        "mean_lat_accel,mean_jerk,mean_steering_delta,completed,completion_time\n";
  for (const ComparisonRow& row : rows) {
    const ClosedLoopMetrics& m = row.metrics;
    os << row.scenario << ',' << row.combo << ',' << m.collisions << ',' << m.deviations << ','
       << m.discomforts << ',' << m.fallbacks << ',' << m.lost_controls << ','
       << fmt(m.mean_lat_accel) << ',' << fmt(m.mean_jerk) << ',' << fmt(m.mean_steering_delta)
       << ',' << (m.completed ? 1 : 0) << ',' << fmt(m.completion_time) << '\n';
  }
  return os.str();
}

std::string trace_csv_header() {
  return "step,t,x,y,heading,v,a_cmd,phi_cmd,source,cost,n_candidates,fallback,collision,"
         "deviation,lateral_error,completed";
}

std::string trace_row_csv(const TraceRow& row) {
  std::ostringstream os;
  os << row.step << ',' << fmt(row.t) << ',' << fmt(row.x) << ',' << fmt(row.y) << ','
     << fmt(row.heading) << ',' << fmt(row.v) << ',' << fmt(row.a_cmd) << ','
     << fmt(row.phi_cmd) << ',' << to_string(row.source) << ',' << fmt(row.cost) << ','
     << row.n_candidates << ',' << (row.fallback ? 1 : 0) << ',' << (row.collision ? 1 : 0)
     << ',' << (row.deviation ? 1 : 0) << ',' << fmt(row.lateral_error) << ','
     << (row.completed ? 1 : 0);
  return os.str();
}

}  // namespace gridplan
