#pragma once
/**
 * @file planner.hpp
 * @brief Waypoint rerouting: Bezier reference path, penalized grid A*, and smoothing.
 */

#include <argus/occupancy.hpp>

#include <array>
#include <queue>

namespace argus {

class UnreachableGoal : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Control points of the reference curve from `ego` to `nav`.
inline BezierControl reference_controls(const Pose2& ego, const Pose2& nav, const RoadMap* map)
{
  const Vec2 p0 = ego.position();
  const Vec2 p3 = nav.position();
  const Vec2 h0 = ego.forward();
  const Vec2 h3 = nav.forward();
  const Vec2 chord = p3 - p0;
  const double denom = h0.cross(h3);
  if (std::abs(denom) > 1e-9) {
    // p0 + s*h0 = p3 - u*h3
    const double s = chord.cross(h3) / denom;
    const double u = h0.cross(chord) / denom;
    if (s > 0.0 && u > 0.0) {
      Vec2 x = p0 + h0 * s;
      if (map != nullptr) {
        x = map->project_to_drivable(x);
      }
      return {p0, x, x, p3};
    }
  }
  return {p0, p0 + chord * (1.0 / 3.0), p0 + chord * (2.0 / 3.0), p3};
}

/// n samples of the reference curve; n = 0 picks roughly one sample per meter of chord.
inline std::vector<Vec2> dense_waypoints(const Pose2& ego, const Pose2& nav, const RoadMap* map,
                                         int n = 0)
{
  if (n == 0) {
    n = std::max(2, static_cast<int>(std::ceil(distance(ego.position(), nav.position()))) + 1);
  }
  return bezier_sample(reference_controls(ego, nav, map), n);
}

struct AStarWeights
{
  double w_dev{1.0};   ///< per meter between a cell center and the nearest reference waypoint
  double w_turn{0.5};  ///< per radian of direction change between consecutive steps
};

namespace detail {

inline constexpr std::array<std::array<int, 2>, 8> kMoves{
  {{0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}}};

inline bool move_allowed(const OccupancyMap& map, Cell from, int dir)
{
  const auto [dr, dc] = kMoves[static_cast<std::size_t>(dir)];
  const Cell to{from.row + dr, from.col + dc};
  if (!map.traversable(to)) {
    return false;
  }
  if (dr != 0 && dc != 0) {
    // no corner cutting between two blocked orthogonal neighbours
    return map.traversable(Cell{from.row + dr, from.col}) &&
           map.traversable(Cell{from.row, from.col + dc});
  }
  return true;
}

inline double octile(Cell a, Cell b, double cell)
{
  const double dx = std::abs(a.col - b.col);
  const double dy = std::abs(a.row - b.row);
  return cell * ((dx + dy) + (std::numbers::sqrt2 - 2.0) * std::min(dx, dy));
}

}  // namespace detail

/**
 * Penalized A* over 8-connected cells. Search states are (cell, incoming direction) so the turn
 * penalty is exact. Ties on f are broken by the smaller deviation penalty, then row-major order.
 * Returns the cell sequence from start to goal inclusive.
 */
inline std::vector<Cell> astar(const OccupancyMap& map, Cell start, Cell goal,
                               const std::vector<Vec2>& reference, const AStarWeights& w = {})
{
  if (!map.traversable(start)) {
    throw UnreachableGoal("A*: start cell is not traversable");
  }
  if (!map.traversable(goal)) {
    throw UnreachableGoal("A*: goal cell is not traversable");
  }
  const double cs = map.cell_size();
  const std::size_t ncells = static_cast<std::size_t>(map.rows()) * map.cols();
  constexpr int kDirs = 9;  // 8 moves + "no incoming move" for the start
  const auto sid = [&](Cell c, int d) { return map.index(c) * kDirs + static_cast<std::size_t>(d); };

  std::vector<double> dev(ncells, -1.0);
  const auto deviation = [&](Cell c) {
    double& d = dev[map.index(c)];
    if (d < 0.0) {
      d = 0.0;
      if (!reference.empty() && w.w_dev != 0.0) {
        const Vec2 p = map.center_of(c);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : reference) {
          best = std::min(best, distance(p, r));
        }
        d = w.w_dev * best;
      }
    }
    return d;
  };

  struct Node
  {
    double f;
    double dev;
    std::size_t cell;
    int dir;
    double g;
  };
  const auto worse = [](const Node& a, const Node& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.dev != b.dev) return a.dev > b.dev;
    if (a.cell != b.cell) return a.cell > b.cell;
    return a.dir > b.dir;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  std::vector<double> g(ncells * kDirs, std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> parent(ncells * kDirs, -1);
  std::vector<std::uint8_t> closed(ncells * kDirs, 0);

  const std::size_t s0 = sid(start, 8);
  g[s0] = 0.0;
  open.push({detail::octile(start, goal, cs), deviation(start), map.index(start), 8, 0.0});

  const auto cell_at = [&](std::size_t idx) {
    return Cell{static_cast<int>(idx / static_cast<std::size_t>(map.cols())),
                static_cast<int>(idx % static_cast<std::size_t>(map.cols()))};
  };

  while (!open.empty()) {
    const Node n = open.top();
    open.pop();
    const std::size_t s = n.cell * kDirs + static_cast<std::size_t>(n.dir);
    if (closed[s] != 0) {
      continue;
    }
    closed[s] = 1;
    const Cell c = cell_at(n.cell);
    if (c == goal) {
      std::vector<Cell> path;
      for (std::int64_t k = static_cast<std::int64_t>(s); k >= 0; k = parent[static_cast<std::size_t>(k)]) {
        path.push_back(cell_at(static_cast<std::size_t>(k) / kDirs));
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (int d = 0; d < 8; ++d) {
      if (!detail::move_allowed(map, c, d)) {
        continue;
      }
      const auto [dr, dc] = detail::kMoves[static_cast<std::size_t>(d)];
      const Cell nc{c.row + dr, c.col + dc};
      const double step = (dr != 0 && dc != 0) ? cs * std::numbers::sqrt2 : cs;
      double turn = 0.0;
      if (n.dir != 8) {
        const int diff = std::abs(d - n.dir) % 8;
        turn = std::min(diff, 8 - diff) * (std::numbers::pi / 4.0);
      }
      const double ndev = deviation(nc);
      const double ng = n.g + step + ndev + w.w_turn * turn;
      const std::size_t t = sid(nc, d);
      if (ng < g[t]) {
        g[t] = ng;
        parent[t] = static_cast<std::int64_t>(s);
        open.push({ng + detail::octile(nc, goal, cs), ndev, map.index(nc), d, ng});
      }
    }
  }
  throw UnreachableGoal("A*: goal not reachable from start");
}

/// Euclidean length of a cell path measured between cell centers.
inline double cell_path_length(const OccupancyMap& map, const std::vector<Cell>& path)
{
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    len += distance(map.center_of(path[i - 1]), map.center_of(path[i]));
  }
  return len;
}

struct RerouteParams
{
  AStarWeights weights;
  int smooth_passes{3};
};

/// Corner-cutting averaging (1/4, 1/2, 1/4) with endpoints pinned; moves into blocked cells are
/// rejected.
inline std::vector<Vec2> smooth_path(std::vector<Vec2> pts, const OccupancyMap& map, int passes)
{
  for (int pass = 0; pass < passes; ++pass) {
    std::vector<Vec2> next = pts;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      const Vec2 q = pts[i - 1] * 0.25 + pts[i] * 0.5 + pts[i + 1] * 0.25;
      if (map.traversable(q)) {
        next[i] = q;
      }
    }
    pts = std::move(next);
  }
  return pts;
}

/**
 * Rerouted waypoints along `dense`: traversable waypoints are kept, blocked runs are replaced by an
 * A* detour to the next traversable dense waypoint, and the result is smoothed.
 */
inline std::vector<Vec2> reroute(const std::vector<Vec2>& dense, const OccupancyMap& map,
                                 const RerouteParams& p = {})
{
  if (dense.empty()) {
    throw std::invalid_argument("reroute: no dense waypoints");
  }
  if (!map.traversable(dense.front())) {
    throw UnreachableGoal("reroute: start position is not in a traversable cell");
  }
  std::vector<Vec2> out{dense.front()};
  std::size_t i = 1;
  while (i < dense.size()) {
    if (map.traversable(dense[i])) {
      out.push_back(dense[i]);
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < dense.size() && !map.traversable(dense[j])) {
      ++j;
    }
    if (j >= dense.size()) {
      throw UnreachableGoal("reroute: no traversable waypoint after index " + std::to_string(i));
    }
    const Cell start = *map.cell_of(out.back());
    const Cell goal = *map.cell_of(dense[j]);
    const std::vector<Cell> cells = astar(map, start, goal, dense, p.weights);
    for (std::size_t k = 1; k + 1 < cells.size(); ++k) {
      out.push_back(map.center_of(cells[k]));
    }
    out.push_back(dense[j]);
    i = j + 1;
  }
  return smooth_path(std::move(out), map, p.smooth_passes);
}

}  // namespace argus
