#include "gridplan/types.hpp"

#include <cmath>
#include <sstream>

namespace gridplan {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kKappaTolerance = 1e-9;
constexpr double kSpacingTolerance = 1e-9;

bool finite(double x) { return std::isfinite(x); }

}  // namespace

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

void EgoState::set_steering(double phi_) {
  phi = phi_;
  kappa = 2.0 * std::tan(phi_) / wheelbase;
}

const char* to_string(AgentClass c) {
  switch (c) {
    case AgentClass::kVehicle: return "vehicle";
    case AgentClass::kPedestrian: return "pedestrian";
    case AgentClass::kCyclist: return "cyclist";
    case AgentClass::kUnknown: return "unknown";
  }
  return "unknown";
}

const char* to_string(Maneuver m) {
  switch (m) {
    case Maneuver::kLaneKeep: return "lane_keep";
    case Maneuver::kLaneChangeLeft: return "lane_change_left";
    case Maneuver::kLaneChangeRight: return "lane_change_right";
    case Maneuver::kFollow: return "follow";
    case Maneuver::kOvertake: return "overtake";
    case Maneuver::kStop: return "stop";
    case Maneuver::kTurn: return "turn";
    case Maneuver::kGenerative: return "generative";
  }
  return "lane_keep";
}

const char* to_string(TrajectorySource s) {
  switch (s) {
    case TrajectorySource::kCurve: return "curve";
    case TrajectorySource::kRetrieval: return "retrieval";
    case TrajectorySource::kLattice: return "lattice";
    case TrajectorySource::kImitation: return "imitation";
    case TrajectorySource::kGan: return "gan";
    case TrajectorySource::kHuman: return "human";
  }
  return "curve";
}

const char* to_string(RouteSource s) {
  switch (s) {
    case RouteSource::kLaneCenter: return "lane_center";
    case RouteSource::kCommutingHistory: return "commuting_history";
  }
  return "lane_center";
}

const char* to_string(LandmarkKind k) {
  switch (k) {
    case LandmarkKind::kLaneCenter: return "lane_center";
    case LandmarkKind::kLaneDivider: return "lane_divider";
    case LandmarkKind::kRoadBoundary: return "road_boundary";
    case LandmarkKind::kStopLine: return "stop_line";
  }
  return "lane_center";
}

const char* to_string(TrafficLight t) {
  switch (t) {
    case TrafficLight::kPermitted: return "permitted";
    case TrafficLight::kYield: return "yield";
    case TrafficLight::kProhibited: return "prohibited";
  }
  return "permitted";
}

namespace {

template <typename E>
std::optional<E> parse_enum(const std::string& s, std::initializer_list<E> values) {
  for (E v : values) {
    if (s == to_string(v)) return v;
  }
  return std::nullopt;
}

}  // namespace

std::optional<AgentClass> agent_class_from_string(const std::string& s) {
  return parse_enum(s, {AgentClass::kVehicle, AgentClass::kPedestrian, AgentClass::kCyclist,
                        AgentClass::kUnknown});
}

std::optional<Maneuver> maneuver_from_string(const std::string& s) {
  return parse_enum(
      s, {Maneuver::kLaneKeep, Maneuver::kLaneChangeLeft, Maneuver::kLaneChangeRight,
          Maneuver::kFollow, Maneuver::kOvertake, Maneuver::kStop, Maneuver::kTurn,
          Maneuver::kGenerative});
}

std::optional<TrajectorySource> trajectory_source_from_string(const std::string& s) {
  return parse_enum(s, {TrajectorySource::kCurve, TrajectorySource::kRetrieval,
                        TrajectorySource::kLattice, TrajectorySource::kImitation,
                        TrajectorySource::kGan, TrajectorySource::kHuman});
}

std::optional<RouteSource> route_source_from_string(const std::string& s) {
  return parse_enum(s, {RouteSource::kLaneCenter, RouteSource::kCommutingHistory});
}

std::optional<LandmarkKind> landmark_kind_from_string(const std::string& s) {
  return parse_enum(s, {LandmarkKind::kLaneCenter, LandmarkKind::kLaneDivider,
                        LandmarkKind::kRoadBoundary, LandmarkKind::kStopLine});
}

std::optional<TrafficLight> traffic_light_from_string(const std::string& s) {
  return parse_enum(s, {TrafficLight::kPermitted, TrafficLight::kYield,
                        TrafficLight::kProhibited});
}

std::vector<std::string> validate_trajectory(const Trajectory& traj) {
  std::vector<std::string> errors;
  auto fail = [&errors](const std::string& msg) { errors.push_back(msg); };

  if (traj.waypoints.size() != static_cast<std::size_t>(kHorizonSteps)) {
    std::ostringstream os;
    os << "waypoints: expected " << kHorizonSteps << " entries, got " << traj.waypoints.size();
    fail(os.str());
    return errors;
  }
  if (!finite(traj.start.x) || !finite(traj.start.y) || !finite(traj.start.heading) ||
      !finite(traj.start.v)) {
    fail("start: non-finite field");
  }
  for (std::size_t k = 0; k < traj.waypoints.size(); ++k) {
    const Waypoint& wp = traj.waypoints[k];
    const double expected_t = kDt * static_cast<double>(k + 1);
    std::ostringstream prefix;
    prefix << "waypoints[" << k << "]";
    if (!finite(wp.x) || !finite(wp.y) || !finite(wp.heading) || !finite(wp.v) || !finite(wp.t)) {
      fail(prefix.str() + ": non-finite field");
      continue;
    }
    if (std::abs(wp.t - expected_t) > kSpacingTolerance) {
      std::ostringstream os;
      os << prefix.str() << ".t: expected " << expected_t << ", got " << wp.t;
      fail(os.str());
    }
    if (wp.v < 0.0) {
      std::ostringstream os;
      os << prefix.str() << ".v: must be >= 0, got " << wp.v;
      fail(os.str());
    }
  }
  return errors;
}

namespace {

void validate_history_spacing(const std::vector<AgentState>& states, const std::string& where,
                              std::vector<std::string>* errors) {
  for (std::size_t i = 1; i < states.size(); ++i) {
    const double dt = states[i].t - states[i - 1].t;
    if (dt <= 0.0 || std::abs(dt - kDt) > kSpacingTolerance) {
      std::ostringstream os;
      os << where << ": history must be strictly increasing at " << kDt << " s spacing, step "
         << i << " has dt = " << dt;
      errors->push_back(os.str());
    }
  }
}

}  // namespace

std::vector<std::string> validate_scenario(const Scenario& scenario) {
  std::vector<std::string> errors;
  auto fail = [&errors](const std::string& msg) { errors.push_back(msg); };

  if (!(scenario.duration > 0.0)) fail("duration must be > 0");
  if (!(scenario.grid.resolution > 0.0)) fail("grid.resolution must be > 0");
  if (!(scenario.grid.extent > 0.0)) fail("grid.extent must be > 0");
  if (!(scenario.ego_length > 0.0)) fail("ego_length must be > 0");
  if (!(scenario.ego_width > 0.0)) fail("ego_width must be > 0");

  const EgoState& ego = scenario.ego_init;
  if (!(ego.wheelbase > 0.0)) fail("ego_init.wheelbase must be > 0");
  for (double field : {ego.x, ego.y, ego.heading, ego.v, ego.a, ego.phi, ego.kappa}) {
    if (!finite(field)) {
      fail("ego_init: non-finite field");
      break;
    }
  }
  if (ego.wheelbase > 0.0 &&
      std::abs(ego.kappa - 2.0 * std::tan(ego.phi) / ego.wheelbase) > kKappaTolerance) {
    fail("ego_init.kappa inconsistent with 2*tan(phi)/wheelbase");
  }

  if (scenario.route.points.size() < 2) {
    fail("route.points: need at least 2 points");
  } else {
    for (std::size_t i = 1; i < scenario.route.points.size(); ++i) {
      if ((scenario.route.points[i] - scenario.route.points[i - 1]).norm() == 0.0) {
        std::ostringstream os;
        os << "route.points[" << i << "]: duplicate consecutive point";
        fail(os.str());
      }
    }
  }
  if (scenario.route.target_speed < 0.0) fail("route.target_speed must be >= 0");

  for (std::size_t i = 0; i < scenario.landmarks.size(); ++i) {
    if (scenario.landmarks[i].points.size() < 2) {
      std::ostringstream os;
      os << "landmarks[" << i << "]: need at least 2 points";
      fail(os.str());
    }
  }
  for (std::size_t i = 0; i < scenario.static_obstacles.size(); ++i) {
    if (scenario.static_obstacles[i].size() < 3) {
      std::ostringstream os;
      os << "static_obstacles[" << i << "]: need at least 3 vertices";
      fail(os.str());
    }
  }

  for (const AgentScript& agent : scenario.agents) {
    const std::string where = "agents[" + agent.id + "]";
    if (!(agent.length > 0.0)) fail(where + ".length must be > 0");
    if (!(agent.width > 0.0)) fail(where + ".width must be > 0");
    if (agent.history.size() + 1 > static_cast<std::size_t>(kHistorySteps)) {
      fail(where + ": history longer than " + std::to_string(kHistorySteps) + " states");
    }
    std::vector<AgentState> combined = agent.history;
    combined.push_back(agent.init);
    validate_history_spacing(combined, where, &errors);
  }

  return errors;
}

}  // namespace gridplan
