#pragma once
/**
 * @file trajectory.hpp
 * @brief Short-horizon plan emitted by an ADS stub or by the mitigator.
 */

#include <argus/geometry.hpp>

#include <string_view>
#include <vector>

namespace argus {

enum class TrajectorySource { Ads, Mitigator };

inline std::string_view to_string(TrajectorySource s)
{
  return s == TrajectorySource::Ads ? "ADS" : "MITIGATOR";
}

struct Trajectory
{
  std::vector<Vec2> waypoints;  ///< at least 2, consecutive points distinct
  double desired_speed{0.0};    ///< m/s
  TrajectorySource source{TrajectorySource::Ads};
  double plan_step{1.0};        ///< seconds over which desired_speed should be reached

  bool operator==(const Trajectory&) const = default;
};

}  // namespace argus
