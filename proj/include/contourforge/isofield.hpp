#pragma once
// Isocontours by displacing dilated support points along range vectors.
//
// A dilated support point sits on the edge shared by two pixels. Its range
// vector joins the two pixel centers, from the higher to the lower value, and
// bounds where the point may move. With linear interpolation the point that
// carries exactly the isovalue is at parameter
//     t = (hi - iso) / (hi - lo)
// measured from the hotter center. Points on the image border have no outer
// pixel; they are pinned and never move.

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "boundary.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "raster.hpp"

namespace contourforge {

struct RangeVector {
  Point origin;    // center of the higher-valued pixel
  Point endpoint;  // center of the lower-valued pixel
  double hi = 0.0;
  double lo = 0.0;
  PixelCoord hot;
  PixelCoord cold;
  bool pinned = false;  // support point on the image border; origin == endpoint
};

inline std::vector<RangeVector> build_range_vectors(const Contour& contour, const Grid& grid) {
  if (contour.sources.size() != contour.points.size())
    throw Error(ErrorCode::ContourGridMismatch, "contour carries no pixel sources");
  std::vector<RangeVector> out;
  out.reserve(contour.points.size());
  for (const EdgeSource& s : contour.sources) {
    if (!grid.contains(s.inner) || (s.outer_in_grid && !grid.contains(s.outer)))
      throw Error(ErrorCode::ContourGridMismatch, "contour pixel outside grid");
    RangeVector r;
    if (!s.outer_in_grid) {
      r.origin = r.endpoint = pixel_center(s.inner);
      r.hi = r.lo = grid.value(s.inner);
      r.hot = r.cold = s.inner;
      r.pinned = true;
    } else {
      const double vi = grid.value(s.inner), vo = grid.value(s.outer);
      const bool inner_hot = vi >= vo;
      r.hot = inner_hot ? s.inner : s.outer;
      r.cold = inner_hot ? s.outer : s.inner;
      r.origin = pixel_center(r.hot);
      r.endpoint = pixel_center(r.cold);
      r.hi = inner_hot ? vi : vo;
      r.lo = inner_hot ? vo : vi;
    }
    out.push_back(r);
  }
  return out;
}

/// Interpolation parameter along the range vector; 0.5 on a plateau (hi == lo).
inline double iso_parameter(const RangeVector& r, double iso) {
  if (r.hi == r.lo) return 0.5;
  return (r.hi - iso) / (r.hi - r.lo);
}

inline Point point_on_range(const RangeVector& r, double t) {
  return {r.origin.x + t * (r.endpoint.x - r.origin.x), r.origin.y + t * (r.endpoint.y - r.origin.y)};
}

inline Contour displace_to_iso(const Contour& contour, std::span<const RangeVector> ranges,
                               double iso) {
  if (ranges.size() != contour.points.size())
    throw Error(ErrorCode::ContourGridMismatch, "one range vector per support point required");
  Contour out = contour;
  out.kind = ContourKind::Iso;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const RangeVector& r = ranges[i];
    if (r.pinned) continue;
    if (!(r.lo <= iso && iso <= r.hi))
      throw Error(ErrorCode::IsovalueOutOfRange,
                  "isovalue outside [" + std::to_string(r.lo) + ", " + std::to_string(r.hi) +
                      "] at point " + std::to_string(i));
    out.points[i] = point_on_range(r, iso_parameter(r, iso));
  }
  return out;
}

/// Moves every non-pinned support point to the hotter pixel center.
inline Contour to_bptc_via_ranges(const Contour& contour, std::span<const RangeVector> ranges) {
  Contour out = contour;
  out.kind = ContourKind::PixelTrace;
  for (std::size_t i = 0; i < ranges.size() && i < out.points.size(); ++i)
    if (!ranges[i].pinned) out.points[i] = ranges[i].origin;
  out.degenerate = out.area() == 0.0;
  return out;
}

/// Aux field values at parameter t along a range vector.
inline std::vector<double> sample_fields_at(const RangeVector& r, double t, const Grid& grid) {
  std::vector<double> out;
  out.reserve(grid.aux_fields().size());
  const std::size_t hot = grid.index(r.hot.col, r.hot.row);
  const std::size_t cold = grid.index(r.cold.col, r.cold.row);
  for (const AuxField& f : grid.aux_fields()) {
    const double a = f.values[hot], b = f.values[cold];
    out.push_back(r.pinned ? a : a + t * (b - a));
  }
  return out;
}

/// Aux field values at a point lying on its range vector.
inline std::vector<double> sample_fields(Point p, const RangeVector& r, const Grid& grid) {
  const Point d = r.endpoint - r.origin;
  const double len2 = dot(d, d);
  const double t = len2 == 0.0 ? 0.0 : dot(p - r.origin, d) / len2;
  return sample_fields_at(r, t, grid);
}

/// Primary field value at parameter t (the quantity that defines the isocontour).
inline double sample_value_at(const RangeVector& r, double t) {
  return r.pinned ? r.hi : r.hi + t * (r.lo - r.hi);
}

/// Mask `value >= iso`, dilated contours, displaced to the isovalue.
inline std::vector<Contour> extract_isocontours(const Grid& grid, double iso,
                                                const TurnPolicy& policy, unsigned workers = 1) {
  const SelectionMask mask = threshold_select(grid, iso, std::numeric_limits<double>::infinity());
  std::vector<Contour> out = extract_contours(mask, policy, ContourMode::Dilated, workers);
  for (Contour& c : out) c = displace_to_iso(c, build_range_vectors(c, grid), iso);
  return out;
}

}  // namespace contourforge
