#include "oracles.hpp"

#include <argus/planner.hpp>

#include <gtest/gtest.h>

using namespace argus;

namespace {

OccupancyMap empty_map() { return OccupancyMap(Pose2(0, 0, 0), 40.0, 1.0); }

}  // namespace

TEST(Occupancy, DimensionsFromExtentAndCellSize)
{
  EXPECT_EQ(empty_map().rows(), 80);
  EXPECT_EQ(OccupancyMap(Pose2(), 10.0, 0.75).cols(), 27);
  EXPECT_THROW(OccupancyMap(Pose2(), 0.0, 1.0), std::invalid_argument);
}

TEST(Occupancy, EmptyInputsLeaveEverythingFree)
{
  const OccupancyMap m = build_occupancy(Pose2(3, 4, 1.0), {}, {}, 4.5);
  EXPECT_EQ(m.blocked_count(), 0U);
}

TEST(Occupancy, InflatedObstacleBlocksExactlyOverlappingCells)
{
  // 2x2 obstacle, ego length 4: the 6x6 footprint. Offset so it straddles cell edges.
  const OrientedBox ob(Pose2(10.3, -4.6, 0.35), 2, 2);
  const OccupancyMap m = build_occupancy(Pose2(), {ob}, {}, 4.0);
  const OrientedBox footprint(ob.center, 6, 6);
  std::size_t expected = 0;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      const Vec2 ctr = m.center_of({r, c});
      const OrientedBox cell(Pose2(ctr, 0.0), 1.0, 1.0);
      // Positive-area overlap: the cell shrunk by a hair must still meet the footprint.
      const bool overlaps = argus_test::polygons_intersect(argus_test::resized(cell, -1e-9), footprint);
      expected += overlaps ? 1 : 0;
      ASSERT_EQ(!m.traversable(Cell{r, c}), overlaps) << r << "," << c;
    }
  }
  EXPECT_EQ(m.blocked_count(), expected);
}

TEST(Occupancy, ObstacleOutsideRangeChangesNothing)
{
  const OrientedBox ob(Pose2(100, 100, 0), 2, 2);
  EXPECT_EQ(build_occupancy(Pose2(), {ob}, {}, 4.0).blocked_count(), 0U);
}

TEST(Occupancy, BoundaryBandIsBlocked)
{
  const Polyline edge({{-50, 5.0}, {50, 5.0}});
  const OccupancyMap m = build_occupancy(Pose2(), {}, {edge}, 4.5);
  EXPECT_FALSE(m.traversable(Vec2{0.0, 5.2}));
  EXPECT_FALSE(m.traversable(Vec2{0.0, 4.8}));
  EXPECT_TRUE(m.traversable(Vec2{0.0, 3.5}));
  EXPECT_FALSE(m.traversable(Vec2{0.0, 45.0}));  // outside the grid
}

TEST(DenseWaypoints, StraightAheadIsCollinear)
{
  const Pose2 ego(1, 2, 0.3);
  const Pose2 nav(ego.to_world({30, 0}), 0.3);
  for (const auto& p : dense_waypoints(ego, nav, nullptr)) {
    EXPECT_NEAR(ego.to_local(p).y, 0.0, 1e-9);
  }
}

TEST(DenseWaypoints, TwoSamplesAreTheEndpoints)
{
  const Pose2 ego(0, 0, 0);
  const Pose2 nav(20, 10, 1.0);
  const auto pts = dense_waypoints(ego, nav, nullptr, 2);
  ASSERT_EQ(pts.size(), 2U);
  EXPECT_EQ(pts[0], ego.position());
  EXPECT_EQ(pts[1], nav.position());
}

TEST(DenseWaypoints, RightAngleTurnUsesRayIntersection)
{
  // Corridor: x along y = 0, then y up along x = 30, both 8 m wide.
  const Pose2 ego(0, 0, 0);
  const Pose2 nav(30, 30, std::numbers::pi / 2);
  const auto c = reference_controls(ego, nav, nullptr);
  EXPECT_NEAR(c.p1.x, 30, 1e-9);
  EXPECT_NEAR(c.p1.y, 0, 1e-9);
  EXPECT_EQ(c.p1, c.p2);
  for (const auto& p : dense_waypoints(ego, nav, nullptr, 50)) {
    const bool in_x = p.y >= -4 && p.y <= 4 && p.x <= 34;
    const bool in_y = p.x >= 26 && p.x <= 34 && p.y >= -4;
    EXPECT_TRUE(in_x || in_y) << p.x << "," << p.y;
  }
}

TEST(DenseWaypoints, ParallelHeadingsFallBackToThirds)
{
  const Pose2 ego(0, 0, 0);
  const Pose2 nav(30, 6, 0);
  const auto c = reference_controls(ego, nav, nullptr);
  EXPECT_NEAR(c.p1.x, 10, 1e-9);
  EXPECT_NEAR(c.p2.y, 4, 1e-9);
}

TEST(AStar, ZeroPenaltyMatchesReferenceOnEmptyMap)
{
  const OccupancyMap m = empty_map();
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int> cell(0, 79);
  for (int i = 0; i < 30; ++i) {
    const Cell a{cell(rng), cell(rng)};
    const Cell b{cell(rng), cell(rng)};
    const auto path = astar(m, a, b, {}, {0.0, 0.0});
    EXPECT_NEAR(cell_path_length(m, path), *argus_test::grid_shortest_path(m, a, b), 1e-9);
    EXPECT_EQ(path.front(), a);
    EXPECT_EQ(path.back(), b);
  }
}

TEST(AStar, ZeroPenaltyMatchesReferenceAmongObstacles)
{
  std::mt19937_64 rng(62);
  int checked = 0;
  for (int i = 0; i < 60; ++i) {
    const auto field = argus_test::random_reroute_field(rng);
    if (!field) {
      continue;
    }
    const auto& m = field->map;
    const Cell a = *m.cell_of(field->dense.front());
    const Cell b = *m.cell_of(field->dense.back());
    const auto path = astar(m, a, b, field->dense, {0.0, 0.0});
    for (std::size_t k = 1; k < path.size(); ++k) {
      ASSERT_TRUE(m.traversable(path[k]));
      ASSERT_LE(std::abs(path[k].row - path[k - 1].row), 1);
      ASSERT_LE(std::abs(path[k].col - path[k - 1].col), 1);
    }
    EXPECT_NEAR(cell_path_length(m, path), *argus_test::grid_shortest_path(m, a, b), 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 30);
}

TEST(AStar, WalledOffGoalIsUnreachable)
{
  OccupancyMap m = empty_map();
  const Cell goal{40, 60};
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr != 0 || dc != 0) {
        m.set_blocked({goal.row + dr, goal.col + dc});
      }
    }
  }
  EXPECT_THROW(astar(m, {40, 40}, goal, {}), UnreachableGoal);
  m.set_blocked(goal);
  EXPECT_THROW(astar(m, {40, 40}, goal, {}), UnreachableGoal);
}

TEST(AStar, DoesNotCutBlockedCorners)
{
  OccupancyMap m = empty_map();
  m.set_blocked({40, 41});
  m.set_blocked({41, 40});
  const auto path = astar(m, {40, 40}, {41, 41}, {}, {0.0, 0.0});
  EXPECT_GT(path.size(), 2U);
}

TEST(Reroute, FreeRoadPassesThrough)
{
  const OccupancyMap m = empty_map();
  const auto dense = dense_waypoints(Pose2(), Pose2(30, 0, 0), nullptr);
  const auto out = reroute(dense, m);
  ASSERT_EQ(out.size(), dense.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_NEAR(out[i].x, dense[i].x, 1e-12);
    EXPECT_NEAR(out[i].y, dense[i].y, 1e-12);
  }
}

TEST(Reroute, DetoursAroundBlockingObstacle)
{
  const OrientedBox ob(Pose2(15, 0, 0), 4.5, 1.8);
  const std::vector<Polyline> edges{Polyline({{-50, -1.875}, {50, -1.875}}),
                                    Polyline({{-50, 5.625}, {50, 5.625}})};
  const OccupancyMap m = build_occupancy(Pose2(), {ob}, edges, 4.5);
  const auto dense = dense_waypoints(Pose2(), Pose2(35, 0, 0), nullptr);
  const auto out = reroute(dense, m);
  double length = 0.0;
  double max_lateral = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_TRUE(m.traversable(out[i])) << i;
    if (i > 0) {
      length += distance(out[i - 1], out[i]);
      EXPECT_GT(distance(out[i - 1], out[i]), 0.0);
    }
    max_lateral = std::max(max_lateral, out[i].y);
  }
  EXPECT_GE(length, 35.0);
  EXPECT_GT(max_lateral, 2.0);
  EXPECT_EQ(out.front(), dense.front());
  EXPECT_EQ(out.back(), dense.back());
}

TEST(Reroute, EveryWaypointTraversableOnRandomFields)
{
  std::mt19937_64 rng(63);
  int checked = 0;
  for (int i = 0; i < 80; ++i) {
    const auto field = argus_test::random_reroute_field(rng);
    if (!field) {
      continue;
    }
    const auto out = reroute(field->dense, field->map);
    for (const auto& p : out) {
      ASSERT_TRUE(field->map.traversable(p));
    }
    ++checked;
  }
  EXPECT_GT(checked, 40);
}

TEST(Reroute, BlockedToTheEndIsUnreachable)
{
  OccupancyMap m = empty_map();
  const auto dense = dense_waypoints(Pose2(), Pose2(30, 0, 0), nullptr);
  m.set_blocked(*m.cell_of(dense.back()));
  EXPECT_THROW(reroute(dense, m), UnreachableGoal);
}

TEST(Reroute, StartInBlockedCellIsUnreachable)
{
  OccupancyMap m = empty_map();
  m.set_blocked(*m.cell_of({0, 0}));
  EXPECT_THROW(reroute(dense_waypoints(Pose2(), Pose2(30, 0, 0), nullptr), m), UnreachableGoal);
}

TEST(Smooth, NeverEntersBlockedCells)
{
  OccupancyMap m = empty_map();
  for (int c = 0; c < 80; ++c) {
    m.set_blocked({41, c});
  }
  // A zig-zag across the blocked row; averaging would pull points into it.
  std::vector<Vec2> pts;
  for (int i = 0; i < 30; ++i) {
    pts.push_back({-15.0 + i, i % 2 == 0 ? 0.5 : 2.5});
  }
  for (const auto& p : smooth_path(pts, m, 3)) {
    EXPECT_TRUE(m.traversable(p));
  }
}
