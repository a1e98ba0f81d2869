#pragma once
/**
 * @file mitigator.hpp
 * @brief Takeover trajectory: rerouted waypoints plus the minimum IDM speed over the leading actors.
 */

#include <argus/idm.hpp>
#include <argus/monitor.hpp>
#include <argus/planner.hpp>
#include <argus/trajectory.hpp>

#include <map>

namespace argus {

struct MitigatorConfig
{
  OccupancyParams occupancy;
  RerouteParams reroute;
  double nav_fraction{0.9};      ///< navigation point distance as a fraction of perception range
  double corridor_margin{0.5};   ///< added to ego width / 2 for the path corridor
  double v0_factor{0.72};        ///< desired speed as a fraction of the lane speed limit

  void validate() const
  {
    if (!(occupancy.perception > 0.0) || !(occupancy.cell_size > 0.0) ||
        !(occupancy.boundary_half_width > 0.0)) {
      throw ConfigError("perception range and cell size must be positive");
    }
    if (!(nav_fraction > 0.0) || !(nav_fraction < 1.0)) {
      throw ConfigError("nav_fraction must be in (0, 1)");
    }
    if (reroute.weights.w_dev < 0.0 || reroute.weights.w_turn < 0.0) {
      throw ConfigError("A* penalty weights must be >= 0");
    }
    if (reroute.smooth_passes < 0 || !(corridor_margin >= 0.0) || !(v0_factor > 0.0)) {
      throw ConfigError("invalid mitigator configuration");
    }
  }
};

namespace detail {

/// Polyline through `pts` with near-duplicates dropped; extended along `fallback` when degenerate.
inline Polyline path_polyline(const std::vector<Vec2>& pts, const Pose2& fallback)
{
  std::vector<Vec2> clean;
  for (const auto& p : pts) {
    if (clean.empty() || distance(clean.back(), p) > 1e-6) {
      clean.push_back(p);
    }
  }
  if (clean.size() < 2) {
    const Vec2 a = clean.empty() ? fallback.position() : clean.front();
    clean = {a, a + fallback.forward() * 1.0};
  }
  return Polyline(std::move(clean));
}

inline bool intersects_corridor(const OrientedBox& box, const Polyline& path, double half_width)
{
  const auto& pts = path.points();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (sat_intersects(box, segment_band(pts[i], pts[i + 1], half_width))) {
      return true;
    }
  }
  return false;
}

}  // namespace detail

/**
 * Leading actors along `path`: the nearest vehicle ahead in the corridor, actors predicted to
 * collide, static obstacles touching the corridor, and active signal regions ahead.
 *
 * Signal regions are given an extra s0 of gap so that the IDM equilibrium puts the ego's front
 * bumper at the region center.
 */
inline std::vector<LeadingActor> augment_leading_actors(const BevSnapshot& snap,
                                                        const HazardReport& report,
                                                        const std::vector<Vec2>& path,
                                                        double corridor_margin = 0.5,
                                                        double s0 = 4.0)
{
  const OrientedBox& ego = snap.ego.box;
  const Polyline pl = detail::path_polyline(path, ego.center);
  const double half = 0.5 * ego.width + corridor_margin;
  const double ego_half = 0.5 * ego.length;
  const double v = ego.speed;
  std::map<std::string, LeadingActor> leads;

  const auto measure = [&](const Participant& a) {
    const auto proj = pl.project(a.box.center.position());
    const Vec2 t = unit_from_heading(proj.heading);
    LeadingActor la;
    la.id = a.id;
    la.net_gap = std::max(0.0, proj.station - ego_half - a.box.support(t));
    const double v_lead =
      a.kind == ActorKind::StaticObstacle ? 0.0 : a.box.speed * a.box.center.forward().dot(t);
    la.rel_speed = v - v_lead;
    return la;
  };
  const auto ahead = [&](Vec2 p) { return ego.center.to_local(p).x > 0.0; };

  const Participant* nearest = nullptr;
  double nearest_station = std::numeric_limits<double>::infinity();
  for (const auto& a : snap.others) {
    if (a.kind != ActorKind::Vehicle || !ahead(a.box.center.position())) {
      continue;
    }
    const auto proj = pl.project(a.box.center.position());
    const Vec2 n = unit_from_heading(proj.heading + std::numbers::pi / 2.0);
    if (proj.distance - a.box.support(n) <= half && proj.station < nearest_station) {
      nearest_station = proj.station;
      nearest = &a;
    }
  }
  if (nearest != nullptr) {
    leads.emplace(nearest->id, measure(*nearest));
  }

  // Moving participants predicted to collide. Static obstacles are judged against the rerouted
  // path below instead, since the prediction follows the ADS trajectory.
  for (const auto& id : report.colliding_actors) {
    const Participant* a = snap.find(id);
    if (a != nullptr && (a->kind == ActorKind::Vehicle || a->kind == ActorKind::Pedestrian) &&
        ahead(a->box.center.position())) {
      leads.emplace(a->id, measure(*a));
    }
  }

  for (const auto& a : snap.others) {
    if (a.kind == ActorKind::StaticObstacle && ahead(a.box.center.position()) &&
        detail::intersects_corridor(a.box, pl, half)) {
      leads.emplace(a.id, measure(a));
    }
  }

  for (const auto& sig : snap.signals) {
    const auto region = stop_signal_region(sig, ego.center.theta);
    if (!region || !ahead(region->center.position()) ||
        !detail::intersects_corridor(*region, pl, half)) {
      continue;
    }
    const auto proj = pl.project(region->center.position());
    LeadingActor la;
    la.id = sig.id;
    la.net_gap = std::max(0.0, proj.station - ego_half + s0);
    la.rel_speed = v;
    la.is_virtual = true;
    leads.emplace(sig.id, la);
  }

  std::vector<LeadingActor> out;
  out.reserve(leads.size());
  for (auto& [id, la] : leads) {
    out.push_back(std::move(la));
  }
  return out;
}

/**
 * Navigation point on `route` about nav_fraction * perception ahead of the ego. A point that falls
 * in a blocked cell is moved forward along the route, then backward, to the nearest traversable one.
 */
inline Pose2 select_nav_point(const Polyline& route, const Pose2& ego, const OccupancyMap& occ,
                              double nav_fraction)
{
  const double perception = occ.half_extent();
  const double target = nav_fraction * perception;
  const double s_ego = route.project(ego.position()).station;
  const double step = 0.5;
  double s_nav = route.length();
  for (double s = s_ego; s <= route.length(); s += step) {
    if (distance(route.point_at(s), ego.position()) >= target) {
      s_nav = s;
      break;
    }
  }
  if (occ.traversable(route.point_at(s_nav))) {
    return route.pose_at(s_nav);
  }
  for (double s = s_nav + step;
       s <= route.length() && distance(route.point_at(s), ego.position()) < perception - 1.5;
       s += step) {
    if (occ.traversable(route.point_at(s))) {
      return route.pose_at(s);
    }
  }
  for (double s = s_nav - step; s > s_ego; s -= step) {
    if (occ.traversable(route.point_at(s))) {
      return route.pose_at(s);
    }
  }
  return route.pose_at(s_nav);
}

struct MitigationResult
{
  Trajectory trajectory;
  std::vector<LeadingActor> leads;
  Pose2 nav;
  std::size_t blocked_cells{0};
  bool unreachable{false};
  double accel{0.0};  ///< selected IDM acceleration
};

/// Takeover trajectory toward an explicit navigation pose.
inline MitigationResult mitigate(const BevSnapshot& snap, const Pose2& nav,
                                 const HazardReport& report, const MitigatorConfig& cfg,
                                 const IdmParams& base, const OccupancyMap& occ)
{
  const OrientedBox& ego = snap.ego.box;
  const double v = ego.speed;
  const double dt = snap.dt;
  IdmParams p = base;
  if (snap.map) {
    if (const Lane* lane = snap.map->nearest_lane(ego.center.position())) {
      p.v0 = cfg.v0_factor * lane->speed_limit;
    }
  }

  MitigationResult out;
  out.nav = nav;
  out.blocked_cells = occ.blocked_count();
  out.trajectory.source = TrajectorySource::Mitigator;
  out.trajectory.plan_step = dt;

  std::vector<Vec2> waypoints;
  try {
    waypoints = reroute(dense_waypoints(ego.center, nav, snap.map.get()), occ, cfg.reroute);
  } catch (const UnreachableGoal&) {
    out.unreachable = true;
  }

  if (out.unreachable) {
    out.trajectory.waypoints = {ego.center.position(), ego.center.position() + ego.center.forward()};
    out.accel = -p.b_comf;
    out.trajectory.desired_speed = std::max(0.0, v - p.b_comf * dt);
    return out;
  }

  out.leads = augment_leading_actors(snap, report, waypoints, cfg.corridor_margin, p.s0);
  double acc = idm_free_accel(v, p);
  for (const auto& la : out.leads) {
    acc = std::min(acc, idm_accel(v, la, p));
  }
  out.accel = acc;
  out.trajectory.desired_speed = std::clamp(v + dt * acc, 0.0, p.v0);
  out.trajectory.waypoints = detail::path_polyline(waypoints, ego.center).points();
  return out;
}

/// Builds the occupancy map, picks the navigation point on `route` and plans the takeover.
inline MitigationResult mitigate(const BevSnapshot& snap, const Polyline& route,
                                 const HazardReport& report, const MitigatorConfig& cfg,
                                 const IdmParams& base)
{
  const OrientedBox& ego = snap.ego.box;
  std::vector<OrientedBox> obstacles;
  for (const auto& a : snap.others) {
    if (a.kind == ActorKind::StaticObstacle) {
      obstacles.push_back(a.box);
    }
  }
  static const std::vector<Polyline> kNoBoundaries;
  const auto& boundaries = snap.map ? snap.map->boundaries : kNoBoundaries;
  OccupancyMap occ = build_occupancy(ego.center, obstacles, boundaries, ego.length, cfg.occupancy);
  // The ego may have cut into an inflation margin while tracking a detour. Unless it actually
  // touches an obstacle, the cells under its own footprint that stay clear of every obstacle are
  // freed, so the planner can lead it back out.
  if (const auto here = occ.cell_of(ego.center.position()); here && !occ.traversable(*here)) {
    const bool touching = std::any_of(obstacles.begin(), obstacles.end(), [&](const OrientedBox& o) {
      return sat_intersects(ego, o);
    });
    if (!touching) {
      occ.set_blocked(*here, false);
      for (const Cell c : occ.cells_overlapping(ego)) {
        const OrientedBox cb = occ.cell_box(c);
        if (std::none_of(obstacles.begin(), obstacles.end(),
                         [&](const OrientedBox& o) { return sat_intersects(cb, o); })) {
          occ.set_blocked(c, false);
        }
      }
    }
  }
  const Pose2 nav = select_nav_point(route, ego.center, occ, cfg.nav_fraction);
  return mitigate(snap, nav, report, cfg, base, occ);
}

}  // namespace argus
