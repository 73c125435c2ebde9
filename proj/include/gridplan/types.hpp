#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridplan/config.hpp"

namespace gridplan {

struct Vec2 {
  double x{0.0};
  double y{0.0};

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
  Vec2 rotated(double angle) const {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * x - s * y, s * x + c * y};
  }
  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline Vec2 operator*(double k, const Vec2& v) { return v * k; }

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

enum class AgentClass { kVehicle, kPedestrian, kCyclist, kUnknown };

enum class Maneuver {
  kLaneKeep,
  kLaneChangeLeft,
  kLaneChangeRight,
  kFollow,
  kOvertake,
  kStop,
  kTurn,
  kGenerative,
};

enum class TrajectorySource { kCurve, kRetrieval, kLattice, kImitation, kGan, kHuman };
inline constexpr int kTrajectorySourceCount = 6;

enum class RouteSource { kLaneCenter, kCommutingHistory };

enum class LandmarkKind { kLaneCenter, kLaneDivider, kRoadBoundary, kStopLine };

enum class TrafficLight { kPermitted, kYield, kProhibited };

const char* to_string(AgentClass c);
const char* to_string(Maneuver m);
const char* to_string(TrajectorySource s);
const char* to_string(RouteSource s);
const char* to_string(LandmarkKind k);
const char* to_string(TrafficLight t);

std::optional<AgentClass> agent_class_from_string(const std::string& s);
std::optional<Maneuver> maneuver_from_string(const std::string& s);
std::optional<TrajectorySource> trajectory_source_from_string(const std::string& s);
std::optional<RouteSource> route_source_from_string(const std::string& s);
std::optional<LandmarkKind> landmark_kind_from_string(const std::string& s);
std::optional<TrafficLight> traffic_light_from_string(const std::string& s);

// Ego vehicle state in the Ego-ENU frame (x east, y north, heading
// counter-clockwise from east). Steering angle and path curvature are tied
// by the bicycle relation kappa = 2 tan(phi) / wheelbase.
struct EgoState {
  double x{0.0};        // [m]
  double y{0.0};        // [m]
  double heading{0.0};  // [rad]
  double v{0.0};        // [m/s]
  double a{0.0};        // [m/s^2]
  double phi{0.0};      // steering angle [rad]
  double wheelbase{2.8};  // [m]
  double kappa{0.0};    // [1/m]

  Vec2 position() const { return {x, y}; }
  // Sets phi and the matching curvature in one go.
  void set_steering(double phi_);
};

// One observed agent state at a 0.1 s tick.
struct AgentState {
  double t{0.0};  // [s], relative to the current frame (<= 0 for history)
  double x{0.0};
  double y{0.0};
  double heading{0.0};
  double v{0.0};  // NaN when speed is unobserved

  Vec2 position() const { return {x, y}; }
};

// Tracked agent with up to 1.5 s of history (oldest first, newest last).
struct AgentTrack {
  std::string id;
  double length{4.5};  // [m]
  double width{1.9};   // [m]
  AgentClass cls{AgentClass::kVehicle};
  std::vector<AgentState> history;

  const AgentState& current() const { return history.back(); }
};

struct Waypoint {
  double t{0.0};
  double x{0.0};
  double y{0.0};
  double heading{0.0};
  double v{0.0};

  Vec2 position() const { return {x, y}; }
};

// 3.0 s motion plan: 30 waypoints at 0.1 s spacing, plus the t = 0 anchor
// state the trajectory was planned from.
struct Trajectory {
  Waypoint start;                   // t = 0, the emitting frame's ego pose
  std::vector<Waypoint> waypoints;  // t = 0.1 .. 3.0
  Maneuver maneuver{Maneuver::kLaneKeep};
  TrajectorySource source{TrajectorySource::kCurve};
};

struct Route {
  std::vector<Vec2> points;
  RouteSource source{RouteSource::kLaneCenter};
  double target_speed{0.0};  // desired speed at the 3 s horizon [m/s]
};

struct Landmark {
  LandmarkKind kind{LandmarkKind::kLaneCenter};
  std::vector<Vec2> points;
  std::string id;
};

// Convex polygon, counter-clockwise vertex order.
using Polygon = std::vector<Vec2>;

struct GridConfig {
  double extent{kDefaultRasterExtent};     // square side length [m]
  double resolution{kDefaultResolution};   // [m / cell]
};

struct AgentCommand {
  double a{0.0};    // [m/s^2]
  double phi{0.0};  // [rad]
};

// Open-loop motion program for one scripted agent. The simulator integrates
// the command sequence with a kinematic bicycle; the last command is held
// once the sequence runs out.
struct AgentScript {
  std::string id;
  double length{4.5};
  double width{1.9};
  AgentClass cls{AgentClass::kVehicle};
  AgentState init;                      // state at t = 0
  std::vector<AgentState> history;      // optional pre-start states, oldest first
  std::vector<AgentCommand> commands;

  double wheelbase() const { return std::max(1.0, 0.6 * length); }
};

struct Scenario {
  int format_version{1};
  std::string name;
  double duration{0.0};  // [s]
  GridConfig grid;
  EgoState ego_init;
  double ego_length{4.9};
  double ego_width{1.9};
  Route route;
  TrafficLight traffic_light{TrafficLight::kPermitted};
  std::vector<Landmark> landmarks;
  std::vector<Polygon> static_obstacles;
  std::vector<AgentScript> agents;
  std::optional<double> stop_s;  // stop target arc length along the route, if any
};

// Bag of candidate trajectories with per-source provenance counters.
struct CandidateSet {
  std::vector<Trajectory> candidates;
  std::array<int, kTrajectorySourceCount> source_counts{};
  std::vector<std::string> warnings;

  void add(Trajectory t) {
    ++source_counts[static_cast<int>(t.source)];
    candidates.push_back(std::move(t));
  }
  void merge(CandidateSet other) {
    for (auto& t : other.candidates) add(std::move(t));
    for (auto& w : other.warnings) warnings.push_back(std::move(w));
  }
  bool empty() const { return candidates.empty(); }
  std::size_t size() const { return candidates.size(); }
};

// Returns human-readable invariant violations; empty means valid.
std::vector<std::string> validate_trajectory(const Trajectory& traj);
std::vector<std::string> validate_scenario(const Scenario& scenario);

}  // namespace gridplan
