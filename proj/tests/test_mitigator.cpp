#include "fixtures.hpp"

#include <argus/mitigator.hpp>
#include <argus/sim/harness.hpp>

#include <gtest/gtest.h>

using namespace argus;

namespace {

BevSnapshot road(double v)
{
  auto map = std::make_shared<RoadMap>();
  map->lanes.push_back({"L1", Polyline({{-100, 0}, {300, 0}}), 3.75, 13.9});
  map->lanes.push_back({"L2", Polyline({{-100, 3.75}, {300, 3.75}}), 3.75, 13.9});
  map->boundaries.push_back(Polyline({{-100, -1.875}, {300, -1.875}}));
  map->boundaries.push_back(Polyline({{-100, 5.625}, {300, 5.625}}));
  BevSnapshot s;
  s.frame = 100;
  s.ego = {"ego", ActorKind::Ego, OrientedBox(Pose2(0, 0, 0), 4, 2, v)};
  s.map = map;
  return s;
}

std::vector<Vec2> straight_path(double length = 38)
{
  std::vector<Vec2> pts;
  for (double x = 0; x <= length; x += 1.0) {
    pts.push_back({x, 0});
  }
  return pts;
}

}  // namespace

TEST(LeadingActors, EmptyRoadHasNone)
{
  EXPECT_TRUE(augment_leading_actors(road(8), HazardReport{}, straight_path()).empty());
}

TEST(LeadingActors, VehicleTwentyMetresAhead)
{
  BevSnapshot s = road(8);
  s.others.push_back({"lead", ActorKind::Vehicle, OrientedBox(Pose2(20, 0, 0), 4, 2, 5)});
  s.others.push_back({"other_lane", ActorKind::Vehicle, OrientedBox(Pose2(10, 3.75, 0), 4, 2, 5)});
  s.others.push_back({"behind", ActorKind::Vehicle, OrientedBox(Pose2(-12, 0, 0), 4, 2, 5)});
  const auto leads = augment_leading_actors(s, HazardReport{}, straight_path());
  ASSERT_EQ(leads.size(), 1U);
  EXPECT_EQ(leads[0].id, "lead");
  EXPECT_NEAR(leads[0].net_gap, 16.0, 1e-9);
  EXPECT_NEAR(leads[0].rel_speed, 3.0, 1e-9);
  EXPECT_FALSE(leads[0].is_virtual);
}

TEST(LeadingActors, PredictedColliderJoinsEvenOffPath)
{
  BevSnapshot s = road(8);
  s.others.push_back({"cutter", ActorKind::Vehicle, OrientedBox(Pose2(14, 3.75, -0.2), 4, 2, 6)});
  HazardReport r;
  r.colliding_actors = {"cutter"};
  const auto leads = augment_leading_actors(s, r, straight_path());
  ASSERT_EQ(leads.size(), 1U);
  EXPECT_EQ(leads[0].id, "cutter");
}

TEST(LeadingActors, StopRegionAheadIsVirtualLead)
{
  BevSnapshot s = road(8);
  s.signals.push_back({"stop", SignalKind::StopSign, Pose2(15, 0, 0), "L1", true, std::nullopt});
  const double s0 = 4.0;
  const auto leads = augment_leading_actors(s, HazardReport{}, straight_path(), 0.5, s0);
  ASSERT_EQ(leads.size(), 1U);
  EXPECT_TRUE(leads[0].is_virtual);
  EXPECT_DOUBLE_EQ(leads[0].rel_speed, 8.0);
  // The gap is padded by s0 so the IDM equilibrium puts the front bumper at the region center.
  EXPECT_NEAR(leads[0].net_gap, 15.0 - 2.0 + s0, 1e-9);
  s.signals[0].active = false;
  EXPECT_TRUE(augment_leading_actors(s, HazardReport{}, straight_path()).empty());
}

TEST(LeadingActors, GapsAreNeverNegative)
{
  BevSnapshot s = road(8);
  s.others.push_back({"touching", ActorKind::Vehicle, OrientedBox(Pose2(3.5, 0, 0), 4, 2, 0)});
  const auto leads = augment_leading_actors(s, HazardReport{}, straight_path());
  ASSERT_EQ(leads.size(), 1U);
  EXPECT_EQ(leads[0].net_gap, 0.0);
}

TEST(Mitigate, FreeRoadAcceleratesTowardDesiredSpeed)
{
  const BevSnapshot s = road(5);
  const MitigatorConfig cfg;
  const auto m = mitigate(s, Pose2(36, 0, 0), HazardReport{}, cfg, IdmParams{},
                          build_occupancy(Pose2(), {}, s.map->boundaries, 4));
  ASSERT_FALSE(m.unreachable);
  EXPECT_GT(m.trajectory.desired_speed, 5.0);
  EXPECT_LE(m.trajectory.desired_speed, 0.72 * 13.9);
  EXPECT_EQ(m.trajectory.source, TrajectorySource::Mitigator);
  for (const auto& p : m.trajectory.waypoints) {
    EXPECT_NEAR(p.y, 0.0, 1e-9);
  }
  for (std::size_t i = 1; i < m.trajectory.waypoints.size(); ++i) {
    EXPECT_GT(distance(m.trajectory.waypoints[i - 1], m.trajectory.waypoints[i]), 0.0);
  }
}

TEST(Mitigate, UnreachableGoalHoldsPositionAndBrakes)
{
  const BevSnapshot s = road(6);
  OccupancyMap occ(Pose2(), 40, 1);
  for (int r = 0; r < occ.rows(); ++r) {
    occ.set_blocked({r, 50});
  }
  const auto m = mitigate(s, Pose2(36, 0, 0), HazardReport{}, MitigatorConfig{}, IdmParams{}, occ);
  EXPECT_TRUE(m.unreachable);
  EXPECT_EQ(m.trajectory.waypoints.front(), s.ego.box.center.position());
  EXPECT_LT(m.trajectory.desired_speed, 6.0);
  EXPECT_GE(m.trajectory.desired_speed, 0.0);
}

TEST(Mitigate, ParkedVehicleIsPassedOnTraversableWaypoints)
{
  const Scenario sc = argus_test::load_fixture("straight_road_parked_vehicle");
  sim::RunConfig cfg;
  std::vector<OrientedBox> obstacles;
  for (const auto& a : sc.actors) {
    obstacles.emplace_back(*a.pose, a.length, a.width);
  }
  const double ego_len = sc.ego.length;
  int mitigated = 0;
  const auto result = sim::run_scenario(sc, cfg, [&](const WorldState&, const sim::FrameRecord& r) {
    if (r.owner != Owner::Mitigator || !r.decision.activate_mitigator) {
      return;
    }
    ++mitigated;
    EXPECT_FALSE(r.unreachable) << "frame " << r.frame;
    const Pose2 ego(r.ego.x, r.ego.y, r.ego.theta);
    OccupancyMap occ = build_occupancy(ego, obstacles, sc.map->boundaries, ego_len);
    // Cells under the ego footprint that clear every obstacle are released for the planner.
    const OrientedBox ego_box(ego, sc.ego.length, sc.ego.width);
    for (const Cell c : occ.cells_overlapping(ego_box)) {
      const OrientedBox cb = occ.cell_box(c);
      if (std::none_of(obstacles.begin(), obstacles.end(),
                       [&](const OrientedBox& o) { return sat_intersects(cb, o); })) {
        occ.set_blocked(c, false);
      }
    }
    const auto& wps = r.dispatched.waypoints;
    for (std::size_t i = 1; i < wps.size(); ++i) {
      EXPECT_TRUE(occ.traversable(wps[i])) << "frame " << r.frame << " wp " << i;
    }
  });
  EXPECT_GT(mitigated, 0);
  EXPECT_TRUE(result.report.violations.empty());
  EXPECT_DOUBLE_EQ(result.report.route_completion, 100.0);
  ASSERT_FALSE(result.report.takeovers.empty());
  EXPECT_TRUE(result.report.takeovers.front().return_frame.has_value());
}

TEST(Mitigate, StopSignTakeoverBrakesIntoTheRegion)
{
  const Scenario sc = argus_test::load_fixture("stopsign_runner");
  const StopSignal sig = sc.signals.at(0);
  const OrientedBox region = signal_region_box(sig);
  std::vector<double> speeds;
  bool stopped_inside = false;
  bool first_takeover_done = false;
  sim::run_scenario(sc, sim::RunConfig{}, [&](const WorldState& w, const sim::FrameRecord& r) {
    if (first_takeover_done) {
      return;
    }
    if (r.owner == Owner::Mitigator) {
      speeds.push_back(r.dispatched.desired_speed);
      if (w.ego.participant.box.speed < 0.1 && sat_intersects(w.ego.participant.box, region)) {
        stopped_inside = true;
        first_takeover_done = true;
      }
    } else if (!speeds.empty()) {
      first_takeover_done = true;
    }
  });
  ASSERT_GT(speeds.size(), 5U);
  EXPECT_TRUE(stopped_inside);
  for (std::size_t i = 1; i < speeds.size(); ++i) {
    EXPECT_LE(speeds[i], speeds[i - 1] + 1e-9) << "step " << i;
  }
  EXPECT_LT(speeds.back(), 0.1);
}

TEST(MitigatorConfig, Validation)
{
  MitigatorConfig c;
  EXPECT_NO_THROW(c.validate());
  c.nav_fraction = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.reroute.weights.w_turn = -1;
  EXPECT_THROW(c.validate(), ConfigError);
}
