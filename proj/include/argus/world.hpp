#pragma once
/**
 * @file world.hpp
 * @brief Road map, traffic participants, stop signals, BEV snapshots and scripted actor motion.
 *
 * The world is owned by a single simulation loop. Snapshots are immutable values; the road map
 * they reference is shared read-only.
 */

#include <argus/geometry.hpp>

#include <cmath>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace argus {

// ---------------------------------------------------------------------------------------------
// Road geometry
// ---------------------------------------------------------------------------------------------

struct PolylineProjection
{
  double station{0.0};  ///< arc length of the closest point
  double lateral{0.0};  ///< signed offset, positive to the left of the direction of travel
  double distance{0.0};
  Vec2 point;
  double heading{0.0};
};

/// Piecewise-linear curve parameterized by arc length. Beyond the ends it extends along the end
/// tangents so that stations past the last vertex remain well defined.
class Polyline
{
public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> pts) : points_(std::move(pts))
  {
    if (points_.size() < 2) {
      throw std::invalid_argument("Polyline: need at least 2 points");
    }
    cumulative_.assign(points_.size(), 0.0);
    for (std::size_t i = 1; i < points_.size(); ++i) {
      const double seg = distance(points_[i - 1], points_[i]);
      if (!(seg > 0.0)) {
        throw std::invalid_argument("Polyline: consecutive points must be distinct");
      }
      cumulative_[i] = cumulative_[i - 1] + seg;
    }
  }

  [[nodiscard]] const std::vector<Vec2>& points() const { return points_; }
  [[nodiscard]] double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  [[nodiscard]] bool empty() const { return points_.empty(); }

  [[nodiscard]] double segment_heading(std::size_t i) const
  {
    const Vec2 d = points_[i + 1] - points_[i];
    return std::atan2(d.y, d.x);
  }

  /// Pose at arc length s, heading along the local segment.
  [[nodiscard]] Pose2 pose_at(double s) const
  {
    const std::size_t n = points_.size();
    if (s <= 0.0) {
      const double h = segment_heading(0);
      return Pose2(points_[0] + unit_from_heading(h) * s, h);
    }
    if (s >= length()) {
      const double h = segment_heading(n - 2);
      return Pose2(points_[n - 1] + unit_from_heading(h) * (s - length()), h);
    }
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    const double seg_len = cumulative_[i + 1] - cumulative_[i];
    const double t = (s - cumulative_[i]) / seg_len;
    return Pose2(points_[i] + (points_[i + 1] - points_[i]) * t, segment_heading(i));
  }

  [[nodiscard]] Vec2 point_at(double s) const { return pose_at(s).position(); }

  [[nodiscard]] PolylineProjection project(Vec2 p) const
  {
    PolylineProjection best;
    best.distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
      const SegmentProjection sp = project_on_segment(p, points_[i], points_[i + 1]);
      if (sp.distance < best.distance) {
        const Vec2 d = points_[i + 1] - points_[i];
        best.distance = sp.distance;
        best.point = sp.point;
        best.station = cumulative_[i] + sp.t * (cumulative_[i + 1] - cumulative_[i]);
        best.heading = std::atan2(d.y, d.x);
        const double side = d.cross(p - points_[i]);
        best.lateral = side >= 0.0 ? sp.distance : -sp.distance;
      }
    }
    return best;
  }

private:
  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

struct Lane
{
  std::string id;
  Polyline centerline;
  double width{3.5};        ///< meters
  double speed_limit{13.9}; ///< m/s
};

/// Lane graph with rectangular-strip drivable area and boundary polylines.
struct RoadMap
{
  std::vector<Lane> lanes;
  std::vector<Polyline> boundaries;

  [[nodiscard]] const Lane* find_lane(std::string_view id) const
  {
    for (const auto& lane : lanes) {
      if (lane.id == id) {
        return &lane;
      }
    }
    return nullptr;
  }

  /// Lane whose centerline is closest to p, or nullptr for an empty map.
  [[nodiscard]] const Lane* nearest_lane(Vec2 p) const
  {
    const Lane* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& lane : lanes) {
      const double d = lane.centerline.project(p).distance;
      if (d < best_d) {
        best_d = d;
        best = &lane;
      }
    }
    return best;
  }

  [[nodiscard]] bool drivable(Vec2 p) const
  {
    for (const auto& lane : lanes) {
      const auto proj = lane.centerline.project(p);
      const double s = proj.station;
      if (proj.distance <= 0.5 * lane.width && s >= 0.0 && s <= lane.centerline.length()) {
        return true;
      }
    }
    return false;
  }

  /// Nearest point of the drivable area (p itself when already drivable).
  [[nodiscard]] Vec2 project_to_drivable(Vec2 p) const
  {
    if (lanes.empty() || drivable(p)) {
      return p;
    }
    Vec2 best = p;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& lane : lanes) {
      const auto proj = lane.centerline.project(p);
      const double half = 0.5 * lane.width;
      const double lat = std::clamp(proj.lateral, -half, half);
      const Vec2 left = unit_from_heading(proj.heading + std::numbers::pi / 2.0);
      const Vec2 q = proj.point + left * lat;
      const double d = distance(p, q);
      if (d < best_d) {
        best_d = d;
        best = q;
      }
    }
    return best;
  }
};

// ---------------------------------------------------------------------------------------------
// Participants and signals
// ---------------------------------------------------------------------------------------------

enum class ActorKind { Ego, Vehicle, Pedestrian, StaticObstacle };

inline std::string_view to_string(ActorKind k)
{
  switch (k) {
    case ActorKind::Ego: return "ego-vehicle";
    case ActorKind::Vehicle: return "vehicle";
    case ActorKind::Pedestrian: return "pedestrian";
    case ActorKind::StaticObstacle: return "static-obstacle";
  }
  return "unknown";
}

inline std::optional<ActorKind> actor_kind_from_string(std::string_view s)
{
  if (s == "ego-vehicle") return ActorKind::Ego;
  if (s == "vehicle") return ActorKind::Vehicle;
  if (s == "pedestrian") return ActorKind::Pedestrian;
  if (s == "static-obstacle") return ActorKind::StaticObstacle;
  return std::nullopt;
}

struct Participant
{
  std::string id;
  ActorKind kind{ActorKind::Vehicle};
  OrientedBox box;

  bool operator==(const Participant&) const = default;
};

enum class SignalKind { StopSign, RedLight };

inline std::string_view to_string(SignalKind k)
{
  return k == SignalKind::StopSign ? "stop-sign" : "red-light";
}

inline std::optional<SignalKind> signal_kind_from_string(std::string_view s)
{
  if (s == "stop-sign") return SignalKind::StopSign;
  if (s == "red-light") return SignalKind::RedLight;
  return std::nullopt;
}

/// Side of the square influence region of a stop signal, meters.
inline constexpr double kStopRegionSize = 3.0;

struct StopSignal
{
  std::string id;
  SignalKind kind{SignalKind::StopSign};
  Pose2 pose;        ///< stop-line point on the lane, heading along the lane
  std::string lane_ref;
  bool active{true};
  std::optional<int> green_frame;  ///< red lights: frame at which the light turns green

  bool operator==(const StopSignal&) const = default;
};

/// Influence region of a signal regardless of its activity state.
inline OrientedBox signal_region_box(const StopSignal& sig)
{
  return OrientedBox(sig.pose, kStopRegionSize, kStopRegionSize, 0.0);
}

/// One frame of the world as seen by the monitor. `map` is shared and immutable.
struct BevSnapshot
{
  int frame{0};
  double dt{0.05};
  Participant ego;
  std::vector<Participant> others;
  std::vector<StopSignal> signals;
  std::shared_ptr<const RoadMap> map;

  [[nodiscard]] const Participant* find(std::string_view id) const
  {
    if (ego.id == id) {
      return &ego;
    }
    for (const auto& p : others) {
      if (p.id == id) {
        return &p;
      }
    }
    return nullptr;
  }

  /// Field-wise equality; the map is compared by identity.
  bool operator==(const BevSnapshot& o) const
  {
    return frame == o.frame && dt == o.dt && ego == o.ego && others == o.others &&
           signals == o.signals && map == o.map;
  }
};

// ---------------------------------------------------------------------------------------------
// Scripted behaviors
// ---------------------------------------------------------------------------------------------

struct StaticBehavior
{
};

/// Constant-speed travel along a lane, optionally waiting until `start_frame`.
/// Red-light runners are lane followers that ignore signals and start at a scripted frame.
struct LaneFollowBehavior
{
  std::string lane;
  double speed{10.0};
  double station{0.0};
  int start_frame{0};
};

/// Lane follower that blends laterally into another (parallel) lane, then optionally brakes.
struct LaneCutBehavior
{
  std::string from_lane;
  std::string to_lane;
  double speed{10.0};
  double station{0.0};
  int cut_frame{0};
  double cut_duration{2.0};
  std::optional<double> brake_to;  ///< target speed after the cut
  double decel{3.0};
};

/// Straight-line walker that may pause once after `pause_after` meters.
struct CrossingPedestrianBehavior
{
  double speed{1.4};
  int start_frame{0};
  std::optional<double> pause_after;
  int pause_frames{0};
};

using Behavior =
  std::variant<StaticBehavior, LaneFollowBehavior, LaneCutBehavior, CrossingPedestrianBehavior>;

inline std::string_view behavior_name(const Behavior& b)
{
  switch (b.index()) {
    case 0: return "static";
    case 1: return "lane_follow";
    case 2: return "lane_cut";
    default: return "crossing_pedestrian";
  }
}

struct ActorState
{
  Participant participant;
  Behavior behavior;
  Pose2 origin;            ///< initial pose, used by walkers
  double progress{0.0};    ///< lane station or distance walked
  double speed{0.0};       ///< current scripted speed
  int paused_for{0};
  bool paused_done{false};
};

struct EgoState
{
  Participant participant;
  double wheelbase{2.7};
};

struct WorldState
{
  int frame{0};
  double dt{0.05};
  std::shared_ptr<const RoadMap> map;
  EgoState ego;
  std::vector<ActorState> actors;
  std::vector<StopSignal> signals;
};

struct NoiseParams
{
  double position_sigma{0.0};  ///< meters
  double heading_sigma{0.0};   ///< radians
  double speed_sigma{0.0};     ///< m/s
  double drop_probability{0.0};

  bool operator==(const NoiseParams&) const = default;
};

/**
 * Produces the BEV snapshot of the current world.
 *
 * Without noise the snapshot is an exact projection of the world. With noise every non-ego
 * participant is first subjected to a drop draw, then (if kept) perturbed with independent
 * Gaussian errors on x, y, heading and speed, in that draw order. Static obstacles keep zero speed.
 */
inline BevSnapshot snapshot(const WorldState& world, const std::optional<NoiseParams>& noise,
                            std::mt19937_64& rng)
{
  BevSnapshot snap;
  snap.frame = world.frame;
  snap.dt = world.dt;
  snap.ego = world.ego.participant;
  snap.signals = world.signals;
  snap.map = world.map;
  snap.others.reserve(world.actors.size());

  for (const auto& actor : world.actors) {
    Participant p = actor.participant;
    if (noise) {
      std::bernoulli_distribution drop(std::clamp(noise->drop_probability, 0.0, 1.0));
      if (drop(rng)) {
        continue;
      }
      std::normal_distribution<double> pos(0.0, noise->position_sigma);
      std::normal_distribution<double> head(0.0, noise->heading_sigma);
      std::normal_distribution<double> spd(0.0, noise->speed_sigma);
      const double dx = noise->position_sigma > 0.0 ? pos(rng) : 0.0;
      const double dy = noise->position_sigma > 0.0 ? pos(rng) : 0.0;
      const double dh = noise->heading_sigma > 0.0 ? head(rng) : 0.0;
      const double dv = noise->speed_sigma > 0.0 ? spd(rng) : 0.0;
      p.box.center = Pose2(p.box.center.x + dx, p.box.center.y + dy, p.box.center.theta + dh);
      if (p.kind != ActorKind::StaticObstacle) {
        p.box.speed = std::max(0.0, p.box.speed + dv);
      }
    }
    snap.others.push_back(std::move(p));
  }
  return snap;
}

namespace detail {

inline double smoothstep(double u)
{
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

inline const Lane& require_lane(const RoadMap& map, const std::string& id)
{
  const Lane* lane = map.find_lane(id);
  if (lane == nullptr) {
    throw std::invalid_argument("unknown lane '" + id + "'");
  }
  return *lane;
}

}  // namespace detail

/// Places an actor at its scripted position for the current progress. Used at load time and
/// after every advance.
inline void place_actor(ActorState& a, const RoadMap& map, int frame, double dt)
{
  auto& box = a.participant.box;
  std::visit(
    [&](const auto& b) {
      using B = std::decay_t<decltype(b)>;
      if constexpr (std::is_same_v<B, StaticBehavior>) {
        box.speed = 0.0;
      } else if constexpr (std::is_same_v<B, LaneFollowBehavior>) {
        const Lane& lane = detail::require_lane(map, b.lane);
        box.center = lane.centerline.pose_at(a.progress);
        box.speed = a.speed;
      } else if constexpr (std::is_same_v<B, LaneCutBehavior>) {
        const Lane& from = detail::require_lane(map, b.from_lane);
        const Lane& to = detail::require_lane(map, b.to_lane);
        const double elapsed = (frame - b.cut_frame) * dt;
        const double u = detail::smoothstep(b.cut_duration > 0.0 ? elapsed / b.cut_duration
                                                                 : (elapsed >= 0.0 ? 1.0 : 0.0));
        const Pose2 pf = from.centerline.pose_at(a.progress);
        const Pose2 pt = to.centerline.pose_at(to.centerline.project(pf.position()).station);
        const Vec2 pos = pf.position() * (1.0 - u) + pt.position() * u;
        double heading = pf.theta;
        if (u > 0.0 && u < 1.0 && b.cut_duration > 0.0) {
          // Heading follows the blended path: forward speed plus lateral blend rate.
          const double uu = std::clamp(elapsed / b.cut_duration, 0.0, 1.0);
          const double du_dt = 6.0 * uu * (1.0 - uu) / b.cut_duration;
          const Vec2 lateral = pt.position() - pf.position();
          const Vec2 vel = pf.forward() * a.speed + lateral * du_dt;
          if (vel.norm() > 1e-9) {
            heading = std::atan2(vel.y, vel.x);
          }
        }
        box.center = Pose2(pos, heading);
        box.speed = a.speed;
      } else {
        const Vec2 dir = unit_from_heading(a.origin.theta);
        box.center = Pose2(a.origin.position() + dir * a.progress, a.origin.theta);
        box.speed = a.speed;
      }
    },
    a.behavior);
}

/// Advances every non-ego participant by one step of dt according to its behavior script.
/// Red lights turn green when the world frame reaches their scripted frame.
inline void advance_participants(WorldState& world, double dt)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("advance_participants: dt must be positive");
  }
  const int next_frame = world.frame + 1;
  for (auto& a : world.actors) {
    std::visit(
      [&](const auto& b) {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, StaticBehavior>) {
          a.speed = 0.0;
        } else if constexpr (std::is_same_v<B, LaneFollowBehavior>) {
          a.speed = next_frame > b.start_frame ? b.speed : 0.0;
          a.progress += a.speed * dt;
        } else if constexpr (std::is_same_v<B, LaneCutBehavior>) {
          const double cut_end = b.cut_frame * dt + b.cut_duration;
          if (b.brake_to && next_frame * dt > cut_end) {
            a.speed = std::max(*b.brake_to, a.speed - b.decel * dt);
          }
          a.progress += a.speed * dt;
        } else {
          if (next_frame <= b.start_frame) {
            a.speed = 0.0;
            return;
          }
          if (b.pause_after && !a.paused_done && a.progress >= *b.pause_after) {
            a.speed = 0.0;
            if (++a.paused_for >= b.pause_frames) {
              a.paused_done = true;
            }
            return;
          }
          a.speed = b.speed;
          double step = a.speed * dt;
          if (b.pause_after && !a.paused_done) {
            step = std::min(step, *b.pause_after - a.progress);
          }
          a.progress += step;
        }
      },
      a.behavior);
  }
  world.frame = next_frame;
  for (auto& a : world.actors) {
    place_actor(a, *world.map, world.frame, dt);
  }
  for (auto& sig : world.signals) {
    if (sig.kind == SignalKind::RedLight && sig.green_frame && world.frame >= *sig.green_frame) {
      sig.active = false;
    }
  }
}

}  // namespace argus
