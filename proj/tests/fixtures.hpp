#pragma once
// Paths to the bundled scenario files.

#include <argus/scenario.hpp>

#include <fstream>
#include <string>
#include <vector>

namespace argus_test {

inline std::string scenario_path(const std::string& name)
{
  return std::string(ARGUS_SCENARIO_DIR) + "/" + name + ".json";
}

inline argus::Scenario load_fixture(const std::string& name)
{
  return argus::load_scenario(scenario_path(name));
}

inline nlohmann::json fixture_json(const std::string& name)
{
  std::ifstream is(scenario_path(name));
  return nlohmann::json::parse(is);
}

inline const std::vector<std::string>& golden_names()
{
  static const std::vector<std::string> names{
    "redlight_runner_crossing", "cut_in_brake",         "swerve_into_traffic",
    "pedestrian_behind_parked", "pedestrian_crossing",  "pedestrian_pause",
    "stopsign_runner",          "red_light_wait",       "double_stop_sign",
    "straight_road_parked_vehicle", "construction_block", "parked_with_traffic"};
  return names;
}

}  // namespace argus_test
