#pragma once
/**
 * @file controller.hpp
 * @brief Vehicle controller turning a trajectory into (accel, steer) commands.
 */

#include <argus/prediction.hpp>

namespace argus::sim {

struct ControllerParams
{
  double a_max{11.0};
  double b_comf{20.0};
};

/// Proportional speed tracking plus pure pursuit; degenerate trajectories brake fully.
inline ControlEstimate vehicle_controller(const KbmState& state, const Trajectory& traj,
                                          double wheelbase, const ControllerParams& p = {})
{
  if (traj.waypoints.size() < 2 || !(traj.plan_step > 0.0) || !(traj.desired_speed >= 0.0)) {
    return {-p.b_comf, 0.0};
  }
  return ego_controls_from_trajectory(traj, state, wheelbase, p.a_max, p.b_comf);
}

}  // namespace argus::sim
