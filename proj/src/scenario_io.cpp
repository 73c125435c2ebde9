#include "gridplan/scenario_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gridplan {

using nlohmann::json;

namespace {

json vec2_to_json(const Vec2& v) { return json::array({v.x, v.y}); }

Vec2 vec2_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::runtime_error("expected [x, y] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

json points_to_json(const std::vector<Vec2>& pts) {
  json arr = json::array();
  for (const Vec2& p : pts) arr.push_back(vec2_to_json(p));
  return arr;
}

std::vector<Vec2> points_from_json(const json& j) {
  std::vector<Vec2> pts;
  for (const auto& e : j) pts.push_back(vec2_from_json(e));
  return pts;
}

json agent_state_to_json(const AgentState& s) {
  return json{{"t", s.t}, {"x", s.x}, {"y", s.y}, {"heading", s.heading}, {"v", s.v}};
}

AgentState agent_state_from_json(const json& j) {
  AgentState s;
  s.t = j.value("t", 0.0);
  s.x = j.at("x").get<double>();
  s.y = j.at("y").get<double>();
  s.heading = j.value("heading", 0.0);
  s.v = j.value("v", 0.0);
  return s;
}

template <typename E>
E parse_enum_field(const json& j, const char* key, const char* fallback,
                   std::optional<E> (*parser)(const std::string&)) {
  const std::string text = j.value(key, fallback);
  auto parsed = parser(text);
  if (!parsed) throw std::runtime_error(std::string("unknown ") + key + ": " + text);
  return *parsed;
}

json waypoint_to_json(const Waypoint& w) {
  return json::array({w.t, w.x, w.y, w.heading, w.v});
}

Waypoint waypoint_from_json(const json& j) {
  if (!j.is_array() || j.size() != 5) throw std::runtime_error("waypoint needs [t,x,y,heading,v]");
  Waypoint w;
  w.t = j[0].get<double>();
  w.x = j[1].get<double>();
  w.y = j[2].get<double>();
  w.heading = j[3].get<double>();
  w.v = j[4].get<double>();
  return w;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["format_version"] = s.format_version;
  j["name"] = s.name;
  j["duration"] = s.duration;
  j["grid"] = {{"extent", s.grid.extent}, {"resolution", s.grid.resolution}};
  j["ego"] = {{"x", s.ego_init.x},       {"y", s.ego_init.y},
              {"heading", s.ego_init.heading}, {"v", s.ego_init.v},
              {"a", s.ego_init.a},       {"phi", s.ego_init.phi},
              {"wheelbase", s.ego_init.wheelbase}, {"kappa", s.ego_init.kappa},
              {"length", s.ego_length},  {"width", s.ego_width}};
  j["route"] = {{"source", to_string(s.route.source)},
                {"target_speed", s.route.target_speed},
                {"points", points_to_json(s.route.points)}};
  j["traffic_light"] = to_string(s.traffic_light);
  if (s.stop_s) j["stop_s"] = *s.stop_s;

  json landmarks = json::array();
  for (const Landmark& lm : s.landmarks) {
    landmarks.push_back({{"kind", to_string(lm.kind)},
                         {"id", lm.id},
                         {"points", points_to_json(lm.points)}});
  }
  j["landmarks"] = landmarks;

  json obstacles = json::array();
  for (const Polygon& poly : s.static_obstacles) obstacles.push_back(points_to_json(poly));
  j["static_obstacles"] = obstacles;

  json agents = json::array();
  for (const AgentScript& a : s.agents) {
    json ja;
    ja["id"] = a.id;
    ja["length"] = a.length;
    ja["width"] = a.width;
    ja["class"] = to_string(a.cls);
    ja["init"] = agent_state_to_json(a.init);
    if (!a.history.empty()) {
      json hist = json::array();
      for (const AgentState& st : a.history) hist.push_back(agent_state_to_json(st));
      ja["history"] = hist;
    }
    json cmds = json::array();
    for (const AgentCommand& c : a.commands) cmds.push_back(json::array({c.a, c.phi}));
    ja["commands"] = cmds;
    agents.push_back(ja);
  }
  j["agents"] = agents;

  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("scenario parse error: ") + e.what());
  }

  const int version = j.value("format_version", -1);
  if (version != kScenarioFormatVersion) {
    std::ostringstream os;
    os << "unsupported scenario format_version " << version << " (expected "
       << kScenarioFormatVersion << ")";
    throw std::runtime_error(os.str());
  }

  Scenario s;
  s.format_version = version;
  s.name = j.value("name", "");
  s.duration = j.value("duration", 0.0);
  if (j.contains("grid")) {
    s.grid.extent = j["grid"].value("extent", s.grid.extent);
    s.grid.resolution = j["grid"].value("resolution", s.grid.resolution);
  }
  const json& ego = j.at("ego");
  s.ego_init.x = ego.value("x", 0.0);
  s.ego_init.y = ego.value("y", 0.0);
  s.ego_init.heading = ego.value("heading", 0.0);
  s.ego_init.v = ego.value("v", 0.0);
  s.ego_init.a = ego.value("a", 0.0);
  s.ego_init.wheelbase = ego.value("wheelbase", 2.8);
  if (ego.contains("phi") && !ego.contains("kappa")) {
    s.ego_init.set_steering(ego["phi"].get<double>());
  } else {
    s.ego_init.phi = ego.value("phi", 0.0);
    s.ego_init.kappa = ego.value("kappa", 0.0);
  }
  s.ego_length = ego.value("length", 4.9);
  s.ego_width = ego.value("width", 1.9);

  const json& route = j.at("route");
  s.route.source = parse_enum_field<RouteSource>(route, "source", "lane_center",
                                                 &route_source_from_string);
  s.route.target_speed = route.value("target_speed", 0.0);
  s.route.points = points_from_json(route.at("points"));

  s.traffic_light = parse_enum_field<TrafficLight>(j, "traffic_light", "permitted",
                                                   &traffic_light_from_string);
  if (j.contains("stop_s")) s.stop_s = j["stop_s"].get<double>();

  for (const auto& jl : j.value("landmarks", json::array())) {
    Landmark lm;
    lm.kind = parse_enum_field<LandmarkKind>(jl, "kind", "lane_center",
                                             &landmark_kind_from_string);
    lm.id = jl.value("id", "");
    lm.points = points_from_json(jl.at("points"));
    s.landmarks.push_back(std::move(lm));
  }
  for (const auto& jo : j.value("static_obstacles", json::array())) {
    s.static_obstacles.push_back(points_from_json(jo));
  }
  for (const auto& ja : j.value("agents", json::array())) {
    AgentScript a;
    a.id = ja.value("id", "");
    a.length = ja.value("length", 4.5);
    a.width = ja.value("width", 1.9);
    a.cls = parse_enum_field<AgentClass>(ja, "class", "vehicle", &agent_class_from_string);
    a.init = agent_state_from_json(ja.at("init"));
    for (const auto& jh : ja.value("history", json::array())) {
      a.history.push_back(agent_state_from_json(jh));
    }
    for (const auto& jc : ja.value("commands", json::array())) {
      if (!jc.is_array() || jc.size() != 2) throw std::runtime_error("command needs [a, phi]");
      a.commands.push_back({jc[0].get<double>(), jc[1].get<double>()});
    }
    s.agents.push_back(std::move(a));
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path);
  out << scenario_to_json(scenario);
}

std::string trajectory_to_json(const Trajectory& traj) {
  json j;
  j["format_version"] = kScenarioFormatVersion;
  j["maneuver"] = to_string(traj.maneuver);
  j["source"] = to_string(traj.source);
  j["start"] = waypoint_to_json(traj.start);
  json wps = json::array();
  for (const Waypoint& w : traj.waypoints) wps.push_back(waypoint_to_json(w));
  j["waypoints"] = wps;
  return j.dump(2) + "\n";
}

Trajectory trajectory_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("trajectory parse error: ") + e.what());
  }
  Trajectory traj;
  traj.maneuver =
      parse_enum_field<Maneuver>(j, "maneuver", "lane_keep", &maneuver_from_string);
  traj.source =
      parse_enum_field<TrajectorySource>(j, "source", "human", &trajectory_source_from_string);
  if (j.contains("start")) traj.start = waypoint_from_json(j["start"]);
  for (const auto& jw : j.at("waypoints")) traj.waypoints.push_back(waypoint_from_json(jw));
  return traj;
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return trajectory_from_json(buf.str());
}

void save_trajectory(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trajectory file: " + path);
  out << trajectory_to_json(traj);
}

}  // namespace gridplan
