#pragma once
/**
 * @file prediction.hpp
 * @brief Kinematic bicycle rollouts, control estimation and the enlarged predicted box set.
 */

#include <argus/trajectory.hpp>
#include <argus/world.hpp>

namespace argus {

struct KbmState
{
  double x{0.0};
  double y{0.0};
  double theta{0.0};
  double v{0.0};

  bool operator==(const KbmState&) const = default;
};

struct ControlEstimate
{
  double accel{0.0};  ///< m/s^2
  double steer{0.0};  ///< front-wheel angle, radians

  bool operator==(const ControlEstimate&) const = default;
};

inline constexpr double kMaxSteer = std::numbers::pi / 3.0;
/// Bounds used when differencing observed speeds of other actors.
inline constexpr double kMaxObservedAccel = 11.0;
inline constexpr double kMaxObservedDecel = 20.0;
/// Below this speed the steering angle cannot be recovered from the heading rate.
inline constexpr double kSteerRecoverySpeed = 0.5;

inline KbmState kbm_from_box(const OrientedBox& b)
{
  return {b.center.x, b.center.y, b.center.theta, b.speed};
}

/// One forward-Euler step of the kinematic bicycle model.
inline KbmState kbm_step(const KbmState& s, const ControlEstimate& c, double wheelbase, double dt)
{
  if (!(dt > 0.0) || !(wheelbase > 0.0)) {
    throw std::invalid_argument("kbm_step: dt and wheelbase must be positive");
  }
  KbmState n;
  n.x = s.x + s.v * std::cos(s.theta) * dt;
  n.y = s.y + s.v * std::sin(s.theta) * dt;
  n.theta = normalize_angle(s.theta + s.v * std::tan(c.steer) / wheelbase * dt);
  n.v = std::max(0.0, s.v + c.accel * dt);
  return n;
}

inline double clamp_steer(double d) { return std::clamp(d, -kMaxSteer, kMaxSteer); }

/**
 * Controls of `id` recovered from two consecutive snapshots. Missing in either snapshot means
 * zero controls. `wheelbase` defaults to the actor's box length.
 */
inline ControlEstimate estimate_controls(const BevSnapshot& curr, const BevSnapshot& prev,
                                         std::string_view id,
                                         std::optional<double> wheelbase = std::nullopt)
{
  const Participant* c = curr.find(id);
  const Participant* p = prev.find(id);
  if (c == nullptr || p == nullptr || curr.frame == prev.frame) {
    return {};
  }
  const double dt = curr.dt * (curr.frame - prev.frame);
  const double v = c->box.speed;
  ControlEstimate out;
  out.accel = std::clamp((v - p->box.speed) / dt, -kMaxObservedDecel, kMaxObservedAccel);
  if (v >= kSteerRecoverySpeed) {
    const double L = wheelbase.value_or(c->box.length);
    const double rate = normalize_angle(c->box.center.theta - p->box.center.theta) / dt;
    out.steer = clamp_steer(std::atan(rate * L / v));
  }
  return out;
}

class InvalidTrajectory : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Lookahead distance used for pure pursuit at speed v.
inline double lookahead_distance(double v) { return std::clamp(0.6 * v, 4.0, 15.0); }

/**
 * Pure-pursuit front-wheel angle toward the first waypoint ahead of `pose` at least the lookahead
 * distance away (the last waypoint when none is that far).
 */
inline double pure_pursuit_steer(const std::vector<Vec2>& waypoints, const Pose2& pose, double v,
                                 double wheelbase)
{
  const double ld = lookahead_distance(v);
  std::optional<Vec2> target;
  for (const auto& w : waypoints) {
    const Vec2 local = pose.to_local(w);
    if (local.x > 0.0 && local.norm() >= ld) {
      target = local;
      break;
    }
  }
  if (!target) {
    for (auto it = waypoints.rbegin(); it != waypoints.rend(); ++it) {
      const Vec2 local = pose.to_local(*it);
      if (local.x > 1e-6) {
        target = local;
        break;
      }
    }
  }
  if (!target) {
    return 0.0;
  }
  const double d2 = target->dot(*target);
  const double kappa = 2.0 * target->y / d2;
  return clamp_steer(std::atan(kappa * wheelbase));
}

/// Controls implied by a planned trajectory for a vehicle at `ego`.
inline ControlEstimate ego_controls_from_trajectory(const Trajectory& traj, const KbmState& ego,
                                                    double wheelbase, double a_max = 11.0,
                                                    double b_comf = 20.0)
{
  if (traj.waypoints.size() < 2) {
    throw InvalidTrajectory("trajectory needs at least 2 waypoints, got " +
                            std::to_string(traj.waypoints.size()));
  }
  if (!(traj.plan_step > 0.0)) {
    throw InvalidTrajectory("trajectory plan_step must be positive");
  }
  ControlEstimate c;
  c.accel = std::clamp((traj.desired_speed - ego.v) / traj.plan_step, -b_comf, a_max);
  c.steer = pure_pursuit_steer(traj.waypoints, Pose2(ego.x, ego.y, ego.theta), ego.v, wheelbase);
  return c;
}

/// Influence region of an active signal, oriented with the lane in the ego's direction of travel.
inline std::optional<OrientedBox> stop_signal_region(const StopSignal& sig, double ego_heading)
{
  if (!sig.active) {
    return std::nullopt;
  }
  double heading = sig.pose.theta;
  if (std::abs(normalize_angle(heading - ego_heading)) > std::numbers::pi / 2.0) {
    heading += std::numbers::pi;
  }
  return OrientedBox(Pose2(sig.pose.position(), heading), kStopRegionSize, kStopRegionSize, 0.0);
}

struct PredictionParams
{
  int horizon{60};             ///< H, frames
  double ego_cap{1.3};
  double vehicle_cap{2.0};
  double pedestrian_cap{1.5};
  double ego_wheelbase{2.7};
  double a_max{11.0};
  double b_comf{20.0};
};

/// Factor applied at offset i of a linearly enlarged track.
inline double linear_enlargement(int offset, int horizon, double cap)
{
  return 1.0 + (cap - 1.0) * static_cast<double>(offset) / static_cast<double>(horizon);
}

struct PredictedTrack
{
  std::string id;
  ActorKind kind{ActorKind::Vehicle};
  std::vector<OrientedBox> boxes;  ///< horizon_len + 1 boxes, index = frame offset
};

struct PredictedRegion
{
  std::string id;
  SignalKind kind{SignalKind::StopSign};
  OrientedBox box;
};

struct PredictedBoxSet
{
  int horizon_start{0};
  int horizon_len{0};
  double dt{0.05};
  PredictedTrack ego;
  std::vector<PredictedTrack> others;
  std::vector<PredictedRegion> regions;  ///< active signal regions, constant over the horizon
};

namespace detail {

inline std::vector<OrientedBox> rollout(const OrientedBox& start, const ControlEstimate& c,
                                        double wheelbase, double dt, int horizon, double cap)
{
  std::vector<OrientedBox> out;
  out.reserve(static_cast<std::size_t>(horizon) + 1);
  KbmState s = kbm_from_box(start);
  for (int i = 0; i <= horizon; ++i) {
    if (i > 0) {
      s = kbm_step(s, c, wheelbase, dt);
    }
    const OrientedBox b(Pose2(s.x, s.y, s.theta), start.length, start.width, s.v);
    out.push_back(enlarge_box(b, linear_enlargement(i, horizon, cap)));
  }
  return out;
}

}  // namespace detail

/**
 * Predicted boxes of every participant over [t, t+H].
 *
 * Ego and vehicles roll forward under frozen controls; pedestrians walk at constant velocity with a
 * constant enlargement; static obstacles are repeated unscaled; active signals contribute regions.
 */
inline PredictedBoxSet predict(const BevSnapshot& curr, const BevSnapshot& prev,
                               const Trajectory& ego_traj, const PredictionParams& p)
{
  if (p.horizon < 1) {
    throw std::invalid_argument("predict: horizon must be >= 1");
  }
  const int H = p.horizon;
  const double dt = curr.dt;
  PredictedBoxSet out;
  out.horizon_start = curr.frame;
  out.horizon_len = H;
  out.dt = dt;

  const KbmState ego_state = kbm_from_box(curr.ego.box);
  const ControlEstimate ego_c =
    ego_controls_from_trajectory(ego_traj, ego_state, p.ego_wheelbase, p.a_max, p.b_comf);
  out.ego = {curr.ego.id, ActorKind::Ego,
             detail::rollout(curr.ego.box, ego_c, p.ego_wheelbase, dt, H, p.ego_cap)};

  out.others.reserve(curr.others.size());
  for (const auto& actor : curr.others) {
    PredictedTrack track{actor.id, actor.kind, {}};
    switch (actor.kind) {
      case ActorKind::StaticObstacle:
        track.boxes.assign(static_cast<std::size_t>(H) + 1, actor.box);
        break;
      case ActorKind::Pedestrian: {
        track.boxes.reserve(static_cast<std::size_t>(H) + 1);
        const Vec2 step = actor.box.center.forward() * (actor.box.speed * dt);
        for (int i = 0; i <= H; ++i) {
          OrientedBox b = actor.box;
          b.center = Pose2(actor.box.center.position() + step * static_cast<double>(i),
                           actor.box.center.theta);
          track.boxes.push_back(enlarge_box(b, p.pedestrian_cap));
        }
        break;
      }
      default: {
        const ControlEstimate c = estimate_controls(curr, prev, actor.id);
        track.boxes = detail::rollout(actor.box, c, actor.box.length, dt, H, p.vehicle_cap);
        break;
      }
    }
    out.others.push_back(std::move(track));
  }

  for (const auto& sig : curr.signals) {
    if (auto region = stop_signal_region(sig, curr.ego.box.center.theta)) {
      out.regions.push_back({sig.id, sig.kind, *region});
    }
  }
  return out;
}

}  // namespace argus
