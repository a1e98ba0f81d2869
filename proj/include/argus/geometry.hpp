#pragma once
/**
 * @file geometry.hpp
 * @brief Planar poses, oriented boxes, separating-axis overlap and cubic Bezier curves.
 *
 * Conventions:
 * - World frame is right-handed, x forward / y left, headings CCW from +x.
 * - Headings are kept in (-pi, pi].
 * - Box intersection is closed-set: boxes that only touch count as intersecting.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace argus {

struct Vec2
{
  double x{0.0};
  double y{0.0};

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr bool operator==(const Vec2&) const = default;

  [[nodiscard]] constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  [[nodiscard]] constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  [[nodiscard]] double norm() const { return std::hypot(x, y); }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

inline Vec2 unit_from_heading(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (!std::isfinite(a)) {
    return a;
  }
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) {
    a += two_pi;
  } else if (a > std::numbers::pi) {
    a -= two_pi;
  }
  return a;
}

struct Pose2
{
  double x{0.0};
  double y{0.0};
  double theta{0.0};

  constexpr Pose2() = default;
  Pose2(double px, double py, double heading) : x(px), y(py), theta(normalize_angle(heading)) {}
  Pose2(Vec2 p, double heading) : Pose2(p.x, p.y, heading) {}

  [[nodiscard]] Vec2 position() const { return {x, y}; }
  [[nodiscard]] Vec2 forward() const { return unit_from_heading(theta); }
  bool operator==(const Pose2&) const = default;

  /// Expresses a world point in this pose's frame.
  [[nodiscard]] Vec2 to_local(Vec2 p) const
  {
    const Vec2 d = p - position();
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * d.x + s * d.y, -s * d.x + c * d.y};
  }

  [[nodiscard]] Vec2 to_world(Vec2 local) const
  {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {x + c * local.x - s * local.y, y + s * local.x + c * local.y};
  }
};

/// Pose + footprint + speed of an actor or virtual region at one frame.
struct OrientedBox
{
  Pose2 center;
  double length{1.0};  ///< along heading, meters
  double width{1.0};   ///< meters
  double speed{0.0};   ///< m/s, zero for static regions

  OrientedBox() = default;
  OrientedBox(Pose2 c, double len, double wid, double v = 0.0)
  : center(c), length(len), width(wid), speed(v)
  {
    if (!(length > 0.0) || !(width > 0.0)) {
      throw std::invalid_argument("OrientedBox: length and width must be positive");
    }
    if (!(speed >= 0.0)) {
      throw std::invalid_argument("OrientedBox: speed must be non-negative");
    }
  }

  bool operator==(const OrientedBox&) const = default;

  [[nodiscard]] Vec2 axis_long() const { return center.forward(); }
  [[nodiscard]] Vec2 axis_lat() const
  {
    const Vec2 f = center.forward();
    return {-f.y, f.x};
  }

  /// Corners in CCW order starting at front-right.
  [[nodiscard]] std::array<Vec2, 4> corners() const
  {
    const Vec2 c = center.position();
    const Vec2 l = axis_long() * (0.5 * length);
    const Vec2 w = axis_lat() * (0.5 * width);
    return {c + l - w, c + l + w, c - l + w, c - l - w};
  }

  /// Half-extent of the footprint projected on a unit direction.
  [[nodiscard]] double support(Vec2 unit_dir) const
  {
    return 0.5 * length * std::abs(axis_long().dot(unit_dir)) +
           0.5 * width * std::abs(axis_lat().dot(unit_dir));
  }

  [[nodiscard]] bool contains(Vec2 p, double tol = 0.0) const
  {
    const Vec2 local = center.to_local(p);
    return std::abs(local.x) <= 0.5 * length + tol && std::abs(local.y) <= 0.5 * width + tol;
  }
};

/// Contact tolerance for the closed-set test; absorbs rounding on exactly touching edges.
inline constexpr double kContactTolerance = 1e-9;

/**
 * Minimum projected overlap of two boxes over the four candidate separating axes.
 *
 * Positive: the boxes overlap by at least this much on every axis.
 * Zero: touching. Negative: separated, a gap of at least -depth exists on some axis.
 */
inline double sat_overlap_depth(const OrientedBox& a, const OrientedBox& b)
{
  const std::array<Vec2, 4> axes{a.axis_long(), a.axis_lat(), b.axis_long(), b.axis_lat()};
  const Vec2 d = b.center.position() - a.center.position();
  double depth = std::numeric_limits<double>::infinity();
  for (const Vec2& n : axes) {
    const double overlap = a.support(n) + b.support(n) - std::abs(d.dot(n));
    depth = std::min(depth, overlap);
  }
  return depth;
}

/// True iff the two rectangles share at least one point.
inline bool sat_intersects(const OrientedBox& a, const OrientedBox& b)
{
  return sat_overlap_depth(a, b) >= -kContactTolerance;
}

/// True iff the rectangles share a region of positive area.
inline bool sat_overlaps_interior(const OrientedBox& a, const OrientedBox& b)
{
  return sat_overlap_depth(a, b) > kContactTolerance;
}

/// Scales length and width about the center. factor must be >= 1.
inline OrientedBox enlarge_box(const OrientedBox& b, double factor)
{
  if (!(factor >= 1.0) || !std::isfinite(factor)) {
    throw std::invalid_argument("enlarge_box: factor must be >= 1, got " + std::to_string(factor));
  }
  OrientedBox out = b;
  out.length *= factor;
  out.width *= factor;
  return out;
}

/// Grows a box by `margin` on every side.
inline OrientedBox inflate_box(const OrientedBox& b, double margin)
{
  OrientedBox out = b;
  out.length += 2.0 * margin;
  out.width += 2.0 * margin;
  return out;
}

/// Rectangle covering segment [a, b] buffered by half_width on every side.
inline OrientedBox segment_band(Vec2 a, Vec2 b, double half_width)
{
  const Vec2 d = b - a;
  const double len = d.norm();
  const double heading = len > 0.0 ? std::atan2(d.y, d.x) : 0.0;
  const Vec2 mid = (a + b) * 0.5;
  return OrientedBox(Pose2(mid, heading), len + 2.0 * half_width, 2.0 * half_width);
}

struct BezierControl
{
  Vec2 p0, p1, p2, p3;
};

inline Vec2 bezier_point(const BezierControl& c, double zeta)
{
  const double u = 1.0 - zeta;
  return c.p0 * (u * u * u) + c.p1 * (3.0 * u * u * zeta) + c.p2 * (3.0 * u * zeta * zeta) +
         c.p3 * (zeta * zeta * zeta);
}

/// n samples at uniform parameter spacing; endpoints are exactly p0 and p3.
inline std::vector<Vec2> bezier_sample(const BezierControl& c, int n)
{
  if (n < 2) {
    throw std::invalid_argument("bezier_sample: need at least 2 samples, got " + std::to_string(n));
  }
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n));
  out.push_back(c.p0);
  for (int i = 1; i < n - 1; ++i) {
    out.push_back(bezier_point(c, static_cast<double>(i) / (n - 1)));
  }
  out.push_back(c.p3);
  return out;
}

/// Closest point on segment [a, b] to p, with the clamped parameter in [0, 1].
struct SegmentProjection
{
  Vec2 point;
  double t{0.0};
  double distance{0.0};
};

inline SegmentProjection project_on_segment(Vec2 p, Vec2 a, Vec2 b)
{
  const Vec2 d = b - a;
  const double len2 = d.dot(d);
  double t = len2 > 0.0 ? (p - a).dot(d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 q = a + d * t;
  return {q, t, distance(p, q)};
}

}  // namespace argus
