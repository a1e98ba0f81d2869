#pragma once
/**
 * @file ads.hpp
 * @brief Scripted stand-ins for an end-to-end driving model, one per failure archetype.
 */

#include <argus/scenario.hpp>
#include <argus/trajectory.hpp>

namespace argus::sim {

/// Emits a route-following trajectory every frame. Each kind has one scripted blind spot:
///  - oblivious-follower cruises regardless of other actors;
///  - signal-ignorer keeps distance to actors ahead but never stops for signals;
///  - freezer stops for blocking objects ahead and never finds a way around them;
///  - swerver steers into the adjacent lane from a scripted frame on.
class AdsStub
{
public:
  AdsStub(AdsSpec spec, Polyline route) : spec_(spec), route_(std::move(route)) {}

  static constexpr int kWaypoints = 10;
  static constexpr double kSpacing = 2.0;
  static constexpr double kSwerveRamp = 20.0;

  [[nodiscard]] const AdsSpec& spec() const { return spec_; }

  [[nodiscard]] Trajectory plan(const BevSnapshot& snap) const
  {
    const OrientedBox& ego = snap.ego.box;
    const double s0 = route_.project(ego.center.position()).station;
    const bool swerving = spec_.kind == AdsKind::Swerver && snap.frame >= spec_.swerve_frame;
    Trajectory t;
    t.source = TrajectorySource::Ads;
    t.plan_step = 1.0;
    for (int k = 0; k <= kWaypoints; ++k) {
      const Pose2 p = route_.pose_at(s0 + kSpacing * k);
      Vec2 w = p.position();
      if (swerving) {
        // The offset ramps in over kSwerveRamp meters of travel since the swerve began.
        const double travelled = (snap.frame - spec_.swerve_frame) * snap.dt * spec_.cruise_speed;
        const double ramp = std::min(1.0, (travelled + kSpacing * k) / kSwerveRamp);
        w = w + unit_from_heading(p.theta + std::numbers::pi / 2.0) * (spec_.swerve_offset * ramp);
      }
      t.waypoints.push_back(w);
    }
    t.desired_speed = desired_speed(snap);
    return t;
  }

private:
  [[nodiscard]] double desired_speed(const BevSnapshot& snap) const
  {
    const OrientedBox& ego = snap.ego.box;
    switch (spec_.kind) {
      case AdsKind::ObliviousFollower:
      case AdsKind::Swerver:
        return spec_.cruise_speed;
      case AdsKind::SignalIgnorer: {
        double v = spec_.cruise_speed;
        for (const auto& a : snap.others) {
          if (const auto gap = gap_ahead(ego, a.box, 60.0)) {
            v = std::min(v, std::clamp((*gap - 5.0) / spec_.follow_headway, 0.0, spec_.cruise_speed));
          }
        }
        return v;
      }
      case AdsKind::Freezer:
        for (const auto& a : snap.others) {
          const bool blocking = a.kind == ActorKind::StaticObstacle ||
                                (a.kind == ActorKind::Vehicle && a.box.speed < 1.0);
          if (blocking && gap_ahead(ego, a.box, spec_.freeze_distance)) {
            return 0.0;
          }
        }
        return spec_.cruise_speed;
    }
    return spec_.cruise_speed;
  }

  /// Bumper-to-bumper gap to `other` when it lies ahead within `range` in the ego's heading corridor.
  static std::optional<double> gap_ahead(const OrientedBox& ego, const OrientedBox& other, double range)
  {
    const Vec2 local = ego.center.to_local(other.center.position());
    const double lat = other.support(ego.axis_lat());
    if (local.x <= 0.0 || std::abs(local.y) > 0.5 * ego.width + lat + 0.3) {
      return std::nullopt;
    }
    const double gap = local.x - 0.5 * ego.length - other.support(ego.axis_long());
    if (gap > range) {
      return std::nullopt;
    }
    return std::max(0.0, gap);
  }

  AdsSpec spec_;
  Polyline route_;
};

}  // namespace argus::sim
