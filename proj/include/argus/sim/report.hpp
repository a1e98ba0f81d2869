#pragma once
/**
 * @file report.hpp
 * @brief Run configuration, per-frame trace records, violation events and run reports.
 */

#include <argus/gate.hpp>
#include <argus/mitigator.hpp>
#include <argus/scenario.hpp>
#include <argus/sim/controller.hpp>

#include <cstdint>

namespace argus::sim {

enum class ViolationKind {
  CollisionVehicle,
  CollisionPedestrian,
  CollisionStatic,
  StopSign,
  RedLight,
  StallTimeout
};

inline constexpr std::array<ViolationKind, 6> kAllViolationKinds{
  ViolationKind::CollisionVehicle, ViolationKind::CollisionPedestrian,
  ViolationKind::CollisionStatic,  ViolationKind::StopSign,
  ViolationKind::RedLight,         ViolationKind::StallTimeout};

inline std::string_view to_string(ViolationKind k)
{
  switch (k) {
    case ViolationKind::CollisionVehicle: return "collision-vehicle";
    case ViolationKind::CollisionPedestrian: return "collision-pedestrian";
    case ViolationKind::CollisionStatic: return "collision-static";
    case ViolationKind::StopSign: return "stop-sign";
    case ViolationKind::RedLight: return "red-light";
    case ViolationKind::StallTimeout: return "stall-timeout";
  }
  return "unknown";
}

inline std::optional<ViolationKind> violation_kind_from_string(std::string_view s)
{
  for (auto k : kAllViolationKinds) {
    if (to_string(k) == s) {
      return k;
    }
  }
  return std::nullopt;
}

inline bool is_collision(ViolationKind k)
{
  return k == ViolationKind::CollisionVehicle || k == ViolationKind::CollisionPedestrian ||
         k == ViolationKind::CollisionStatic;
}

inline bool is_signal(ViolationKind k)
{
  return k == ViolationKind::StopSign || k == ViolationKind::RedLight;
}

/// Multiplicative infraction penalties.
struct PenaltyTable
{
  double collision_pedestrian{0.50};
  double collision_vehicle{0.60};
  double collision_static{0.65};
  double red_light{0.70};
  double stop_sign{0.80};
  double stall_timeout{1.0};

  [[nodiscard]] double of(ViolationKind k) const
  {
    switch (k) {
      case ViolationKind::CollisionVehicle: return collision_vehicle;
      case ViolationKind::CollisionPedestrian: return collision_pedestrian;
      case ViolationKind::CollisionStatic: return collision_static;
      case ViolationKind::StopSign: return stop_sign;
      case ViolationKind::RedLight: return red_light;
      case ViolationKind::StallTimeout: return stall_timeout;
    }
    return 1.0;
  }

  void validate() const
  {
    for (auto k : kAllViolationKinds) {
      const double p = of(k);
      if (!(p > 0.0) || p > 1.0) {
        throw ConfigError("penalty for " + std::string(to_string(k)) + " must be in (0, 1]");
      }
    }
  }

  bool operator==(const PenaltyTable&) const = default;
};

struct ViolationEvent
{
  int frame{0};
  ViolationKind kind{ViolationKind::CollisionVehicle};
  double penalty{1.0};
  std::string subject;            ///< actor or signal id; empty for stalls
  std::optional<int> onset_frame; ///< stall: first stalled frame; signal: frame the region was entered

  bool operator==(const ViolationEvent&) const = default;
};

struct TakeoverEvent
{
  int frame{0};
  TakeoverCause cause{TakeoverCause::Collision};
  std::optional<int> return_frame;

  bool operator==(const TakeoverEvent&) const = default;
};

struct RunConfig
{
  bool argus{true};
  bool noise{false};
  std::optional<NoiseParams> noise_override;  ///< replaces the scenario's noise block when set
  MonitorConfig monitor;
  MitigatorConfig mitigator;
  IdmParams idm;  ///< v0 is replaced by v0_factor times the lane speed limit
  ControllerParams controller;
  PenaltyTable penalties;
  double stall_timeout{60.0};  ///< seconds
  bool async_monitor{false};

  void validate() const
  {
    monitor.validate();
    mitigator.validate();
    idm.validate();
    penalties.validate();
    if (!(stall_timeout > 0.0)) {
      throw ConfigError("stall_timeout must be > 0");
    }
    if (noise_override && (noise_override->drop_probability < 0.0 ||
                           noise_override->drop_probability > 1.0)) {
      throw ConfigError("drop probability must be in [0, 1]");
    }
  }
};

/// Perception noise effective for a run, if any.
inline std::optional<NoiseParams> effective_noise(const Scenario& s, const RunConfig& cfg)
{
  if (!cfg.noise) {
    return std::nullopt;
  }
  if (cfg.noise_override) {
    return cfg.noise_override;
  }
  if (s.noise) {
    return s.noise;
  }
  return NoiseParams{0.2, 0.02, 0.2, 0.0};
}

struct QueueSnapshot
{
  std::vector<std::int8_t> collision;
  std::vector<std::int8_t> signal;
  std::vector<std::int8_t> stall;
  std::vector<std::int8_t> recovery;

  bool operator==(const QueueSnapshot&) const = default;
};

struct FrameRecord
{
  int frame{0};
  std::uint64_t snapshot_digest{0};
  KbmState ego;  ///< ego state seen by this frame's snapshot
  std::optional<HazardReport> hazard;
  std::optional<QueueSnapshot> queues;
  GateDecision decision;
  Owner owner{Owner::Ads};  ///< owner after this frame's decision
  std::optional<TakeoverCause> cause;
  Trajectory dispatched;
  ControlEstimate command;
  std::vector<LeadingActor> leads;
  std::size_t blocked_cells{0};
  bool unreachable{false};
  std::vector<ViolationEvent> violations;  ///< ground truth after this frame's step
  double speed_after{0.0};
  double progress{0.0};  ///< furthest route station reached so far, meters
  std::uint64_t world_digest{0};
  std::uint64_t digest{0};  ///< digest of every other field

  bool operator==(const FrameRecord&) const = default;
};

enum class EndReason { RouteComplete, Collision, StallTimeout, TimeLimit };

inline std::string_view to_string(EndReason r)
{
  switch (r) {
    case EndReason::RouteComplete: return "route-complete";
    case EndReason::Collision: return "collision";
    case EndReason::StallTimeout: return "stall-timeout";
    case EndReason::TimeLimit: return "time-limit";
  }
  return "unknown";
}

inline std::optional<EndReason> end_reason_from_string(std::string_view s)
{
  for (auto r : {EndReason::RouteComplete, EndReason::Collision, EndReason::StallTimeout,
                 EndReason::TimeLimit}) {
    if (to_string(r) == s) {
      return r;
    }
  }
  return std::nullopt;
}

struct RunReport
{
  std::string scenario;
  bool argus{false};
  bool noise{false};
  double route_completion{0.0};   ///< percent
  double infraction_score{1.0};
  double driving_score{0.0};      ///< percent
  bool success{false};
  std::vector<ViolationEvent> violations;
  double distance_km{0.0};
  std::vector<TakeoverEvent> takeovers;
  int eq8_violations{0};
  int frames{0};
  EndReason end_reason{EndReason::TimeLimit};

  bool operator==(const RunReport&) const = default;
};

struct RunTrace
{
  Scenario scenario;
  RunConfig config;
  std::vector<FrameRecord> records;

  [[nodiscard]] double dt() const { return scenario.dt(); }
};

}  // namespace argus::sim
