#pragma once
/**
 * @file occupancy.hpp
 * @brief Ego-centered occupancy grid with inflated static obstacles and boundary bands.
 */

#include <argus/world.hpp>

#include <cstdint>

namespace argus {

struct Cell
{
  int row{0};  ///< y index
  int col{0};  ///< x index

  bool operator==(const Cell&) const = default;
};

/// Square grid aligned with the world axes. Cell (0, 0) has its lower-left corner at
/// origin - (half_extent, half_extent).
class OccupancyMap
{
public:
  OccupancyMap() = default;
  OccupancyMap(Pose2 origin, double half_extent, double cell_size)
  : origin_(origin), half_extent_(half_extent), cell_size_(cell_size)
  {
    if (!(half_extent > 0.0) || !(cell_size > 0.0)) {
      throw std::invalid_argument("OccupancyMap: extent and cell size must be positive");
    }
    dim_ = static_cast<int>(std::ceil(2.0 * half_extent / cell_size - 1e-9));
    blocked_.assign(static_cast<std::size_t>(dim_) * static_cast<std::size_t>(dim_), 0);
  }

  [[nodiscard]] const Pose2& origin() const { return origin_; }
  [[nodiscard]] double half_extent() const { return half_extent_; }
  [[nodiscard]] double cell_size() const { return cell_size_; }
  [[nodiscard]] int rows() const { return dim_; }
  [[nodiscard]] int cols() const { return dim_; }
  [[nodiscard]] Vec2 corner() const { return origin_.position() - Vec2{half_extent_, half_extent_}; }

  [[nodiscard]] bool in_bounds(Cell c) const
  {
    return c.row >= 0 && c.col >= 0 && c.row < dim_ && c.col < dim_;
  }

  [[nodiscard]] std::optional<Cell> cell_of(Vec2 p) const
  {
    const Vec2 local = p - corner();
    const Cell c{static_cast<int>(std::floor(local.y / cell_size_)),
                 static_cast<int>(std::floor(local.x / cell_size_))};
    if (!in_bounds(c)) {
      return std::nullopt;
    }
    return c;
  }

  [[nodiscard]] Vec2 center_of(Cell c) const
  {
    return corner() + Vec2{(c.col + 0.5) * cell_size_, (c.row + 0.5) * cell_size_};
  }

  [[nodiscard]] OrientedBox cell_box(Cell c) const
  {
    return OrientedBox(Pose2(center_of(c), 0.0), cell_size_, cell_size_);
  }

  [[nodiscard]] std::size_t index(Cell c) const
  {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(dim_) +
           static_cast<std::size_t>(c.col);
  }

  [[nodiscard]] bool traversable(Cell c) const { return in_bounds(c) && blocked_[index(c)] == 0; }

  /// Out-of-grid points are not traversable.
  [[nodiscard]] bool traversable(Vec2 p) const
  {
    const auto c = cell_of(p);
    return c && traversable(*c);
  }

  void set_blocked(Cell c, bool blocked = true) { blocked_.at(index(c)) = blocked ? 1 : 0; }

  [[nodiscard]] std::size_t blocked_count() const
  {
    return static_cast<std::size_t>(std::count(blocked_.begin(), blocked_.end(), std::uint8_t{1}));
  }

  /// Cells sharing positive area with `footprint`.
  [[nodiscard]] std::vector<Cell> cells_overlapping(const OrientedBox& footprint) const
  {
    const auto cs = footprint.corners();
    double xmin = cs[0].x, xmax = cs[0].x, ymin = cs[0].y, ymax = cs[0].y;
    for (const auto& c : cs) {
      xmin = std::min(xmin, c.x);
      xmax = std::max(xmax, c.x);
      ymin = std::min(ymin, c.y);
      ymax = std::max(ymax, c.y);
    }
    const Vec2 k = corner();
    const int c0 = std::max(0, static_cast<int>(std::floor((xmin - k.x) / cell_size_)));
    const int c1 = std::min(dim_ - 1, static_cast<int>(std::floor((xmax - k.x) / cell_size_)));
    const int r0 = std::max(0, static_cast<int>(std::floor((ymin - k.y) / cell_size_)));
    const int r1 = std::min(dim_ - 1, static_cast<int>(std::floor((ymax - k.y) / cell_size_)));
    std::vector<Cell> out;
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        if (sat_overlaps_interior(cell_box(Cell{r, c}), footprint)) {
          out.push_back(Cell{r, c});
        }
      }
    }
    return out;
  }

  /// Blocks every cell sharing positive area with `footprint`. Returns the number newly blocked.
  std::size_t rasterize(const OrientedBox& footprint)
  {
    std::size_t added = 0;
    for (const Cell cell : cells_overlapping(footprint)) {
      if (blocked_[index(cell)] == 0) {
        blocked_[index(cell)] = 1;
        ++added;
      }
    }
    return added;
  }

private:
  Pose2 origin_;
  double half_extent_{40.0};
  double cell_size_{1.0};
  int dim_{0};
  std::vector<std::uint8_t> blocked_;
};

struct OccupancyParams
{
  double perception{40.0};  ///< half extent of the grid, meters
  double cell_size{1.0};
  double boundary_half_width{0.5};  ///< half width of the band rasterized along each boundary
};

/**
 * Grid around `ego` with every static obstacle inflated by ego_length / 2 on each side and every
 * boundary polyline rasterized as a band.
 */
inline OccupancyMap build_occupancy(const Pose2& ego, const std::vector<OrientedBox>& obstacles,
                                    const std::vector<Polyline>& boundaries, double ego_length,
                                    const OccupancyParams& p = {})
{
  if (!(p.perception > 0.0)) {
    throw std::invalid_argument("build_occupancy: perception must be positive");
  }
  OccupancyMap map(ego, p.perception, p.cell_size);
  for (const auto& ob : obstacles) {
    map.rasterize(inflate_box(ob, 0.5 * ego_length));
  }
  for (const auto& b : boundaries) {
    const auto& pts = b.points();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      map.rasterize(segment_band(pts[i], pts[i + 1], p.boundary_half_width));
    }
  }
  return map;
}

}  // namespace argus
