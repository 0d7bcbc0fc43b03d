#pragma once
// Freeze-out hyper-surface of a 1+1D hydrodynamic history.
//
// The grid's columns are the radius r and its rows the time t, both in
// lattice units with the first cell centred at r = t = 0. The surface is the
// thermal isocontour T = T_f around all cells with T >= T_f, traced with the
// pixel-disconnecting (left) turn rule. Each retained contour edge becomes an
// element at its midpoint with a normal of edge length pointing away from
// the hot region.

#include <limits>
#include <string>
#include <vector>

#include "boundary.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "isofield.hpp"
#include "raster.hpp"

namespace contourforge {

struct FreezeoutElement {
  double t = 0.0;         // time of the edge midpoint
  double r = 0.0;         // radius of the edge midpoint
  double dsigma_t = 0.0;  // normal, time component
  double dsigma_r = 0.0;  // normal, radial component
  double temperature = 0.0;
  std::vector<double> fields;  // aux fields in grid order
  bool touches_pinned = false;
  /// Edge endpoints in (r, t) lattice coordinates.
  Point from;
  Point to;
};

/// Maximal runs of consecutive retained edges, in contour order.
struct FreezeoutSurface {
  double isovalue = 0.0;
  std::string temperature_name;
  std::vector<std::string> field_names;
  std::vector<std::vector<FreezeoutElement>> sections;

  std::size_t element_count() const {
    std::size_t n = 0;
    for (const auto& s : sections) n += s.size();
    return n;
  }
};

/// True for support points in the unphysical region r <= 0 or t <= 0.
inline bool outside_physical_domain(Point p) { return p.x <= 0.0 || p.y <= 0.0; }

inline FreezeoutSurface extract_fohs(const Grid& grid, double t_freeze, unsigned workers = 1) {
  const SelectionMask mask = threshold_select(grid, t_freeze, std::numeric_limits<double>::infinity());
  if (mask.count() == 0) throw Error(ErrorCode::EmptySurface, "no cell reaches the freeze-out temperature");

  FreezeoutSurface surf;
  surf.isovalue = t_freeze;
  surf.temperature_name = grid.name();
  for (const AuxField& f : grid.aux_fields()) surf.field_names.push_back(f.name);

  for (const Contour& dilated : extract_contours(mask, TurnPolicy::left(), ContourMode::Dilated, workers)) {
    const std::vector<RangeVector> ranges = build_range_vectors(dilated, grid);
    const Contour iso = displace_to_iso(dilated, ranges, t_freeze);
    const std::size_t n = iso.points.size();

    std::vector<bool> keep(n);
    for (std::size_t i = 0; i < n; ++i)
      keep[i] = !(outside_physical_domain(iso.points[i]) && outside_physical_domain(iso.points[(i + 1) % n]));

    // Start right after a dropped edge so that sections do not wrap.
    std::size_t start = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (!keep[i]) {
        start = (i + 1) % n;
        break;
      }

    const auto endpoint_state = [&](std::size_t i, double& temp, std::vector<double>& fields) {
      const RangeVector& r = ranges[i];
      const double t = r.pinned ? 0.0 : iso_parameter(r, t_freeze);
      temp = sample_value_at(r, t);
      fields = sample_fields_at(r, t, grid);
    };

    std::vector<FreezeoutElement> run;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = (start + k) % n, j = (i + 1) % n;
      if (!keep[i]) {
        if (!run.empty()) surf.sections.push_back(std::move(run));
        run.clear();
        continue;
      }
      const Point a = iso.points[i], b = iso.points[j];
      // Two support points meet when a cell sits exactly at T_f; such an edge
      // spans no surface.
      if (a == b) continue;
      FreezeoutElement e;
      e.from = a;
      e.to = b;
      const Point m = midpoint(a, b);
      e.r = m.x;
      e.t = m.y;
      // The hot region lies to the left of every contour edge; outward is
      // the edge direction turned clockwise.
      e.dsigma_r = b.y - a.y;
      e.dsigma_t = -(b.x - a.x);
      double ta = 0.0, tb = 0.0;
      std::vector<double> fa, fb;
      endpoint_state(i, ta, fa);
      endpoint_state(j, tb, fb);
      e.temperature = 0.5 * (ta + tb);
      e.fields.resize(fa.size());
      for (std::size_t f = 0; f < fa.size(); ++f) e.fields[f] = 0.5 * (fa[f] + fb[f]);
      e.touches_pinned = ranges[i].pinned || ranges[j].pinned;
      run.push_back(std::move(e));
    }
    if (!run.empty()) surf.sections.push_back(std::move(run));
  }
  if (surf.sections.empty()) throw Error(ErrorCode::AllEdgesDropped, "every edge lies at r <= 0 or t <= 0");
  return surf;
}

}  // namespace contourforge
