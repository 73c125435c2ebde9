#pragma once

#include <string>

#include "gridplan/types.hpp"

namespace gridplan {

// Scenario files are JSON with a mandatory format_version field. Units are
// meters / radians / m/s throughout; see docs/FORMATS.md for the schema.
inline constexpr int kScenarioFormatVersion = 1;

std::string scenario_to_json(const Scenario& scenario);
// Throws std::runtime_error on malformed input or version mismatch.
Scenario scenario_from_json(const std::string& text);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

std::string trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const std::string& text);
Trajectory load_trajectory(const std::string& path);
void save_trajectory(const Trajectory& traj, const std::string& path);

}  // namespace gridplan
