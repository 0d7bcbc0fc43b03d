#pragma once
// Planar primitives shared by every stage.
//
// Coordinate convention: pixel (col, row) has its center at (col, row) and its
// corners at half-integer offsets; y grows upward. Images are flipped on load so
// the visually lowest row is row 0.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "predicates.hpp"

namespace contourforge {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend constexpr Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point, Point) = default;
  // Lexicographic (x, then y); used for deterministic ordering and deduplication.
  friend constexpr auto operator<=>(Point a, Point b) {
    if (auto c = a.x <=> b.x; c != 0) return c;
    return a.y <=> b.y;
  }
};

struct PixelCoord {
  std::int32_t col = 0;
  std::int32_t row = 0;
  friend constexpr bool operator==(PixelCoord, PixelCoord) = default;
};

inline constexpr Point pixel_center(PixelCoord p) {
  return {static_cast<double>(p.col), static_cast<double>(p.row)};
}

inline constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(b - a); }
inline constexpr Point midpoint(Point a, Point b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

inline int orient(Point a, Point b, Point c) {
  return predicates::orient2d(a.x, a.y, b.x, b.y, c.x, c.y);
}

inline int in_circle(Point a, Point b, Point c, Point d) {
  return predicates::incircle(a.x, a.y, b.x, b.y, c.x, c.y, d.x, d.y);
}

/// Shoelace area of a closed polygon; positive for counterclockwise order.
inline double signed_area(std::span<const Point> pts) {
  const std::size_t n = pts.size();
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += cross(pts[i], pts[(i + 1) % n]);
  return 0.5 * acc;
}

/// Area-weighted centroid of a closed polygon. Undefined for zero area.
inline Point polygon_centroid(std::span<const Point> pts) {
  const std::size_t n = pts.size();
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = pts[i], q = pts[(i + 1) % n];
    const double w = cross(p, q);
    a += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  return {cx / (3.0 * a), cy / (3.0 * a)};
}

inline double perimeter(std::span<const Point> pts) {
  const std::size_t n = pts.size();
  double len = 0.0;
  for (std::size_t i = 0; i < n && n > 1; ++i) len += distance(pts[i], pts[(i + 1) % n]);
  return len;
}

/// Euclidean distance from p to the closed segment ab.
inline double point_segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

/// True if c lies on the closed segment ab (exact).
inline bool on_segment(Point a, Point b, Point c) {
  if (orient(a, b, c) != 0) return false;
  return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
         c.y <= std::max(a.y, b.y);
}

/// Closed-segment intersection test (touching counts), exact.
inline bool segments_intersect(Point a, Point b, Point c, Point d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

/// Interiors cross at a single point that is not an endpoint of either segment.
inline bool segments_cross_properly(Point a, Point b, Point c, Point d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

/// Winding number of a closed polygon around p. p must not lie on the polygon.
inline int winding_number(Point p, std::span<const Point> poly) {
  int w = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = poly[i], b = poly[(i + 1) % n];
    if (a.y <= p.y) {
      if (b.y > p.y && orient(a, b, p) > 0) ++w;
    } else if (b.y <= p.y && orient(a, b, p) < 0) {
      --w;
    }
  }
  return w;
}

/// True when no two non-adjacent edges of the closed polygon touch and no
/// adjacent edges overlap. O(n^2); intended for checks and modest contours.
inline bool is_simple_polygon(std::span<const Point> pts) {
  const std::size_t n = pts.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = pts[i], b = pts[(i + 1) % n];
    if (a == b) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point c = pts[j], d = pts[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Shared vertex only: the far endpoint must not lie on the other edge.
        const Point shared = (j == i + 1) ? b : a;
        const Point far_ab = (shared == b) ? a : b;
        const Point far_cd = (shared == c) ? d : c;
        if (n == 3) continue;
        if (on_segment(c, d, far_ab) || on_segment(a, b, far_cd)) return false;
        continue;
      }
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

}  // namespace contourforge
