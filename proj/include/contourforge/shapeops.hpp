#pragma once
// Contour down-sampling, length filtering and area/centroid measurement.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "boundary.hpp"
#include "cdt.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "raster.hpp"

namespace contourforge {

struct SimplifyParams {
  double w0 = 0.7;  // tolerance in pixel widths
  /// With a containment mask: whether chords may run outside the image.
  bool outside_image_allowed = false;
};

/// True when segment p-q stays inside the union of selected pixel squares
/// (closed squares, so running along a boundary between a selected and an
/// unselected pixel is allowed).
inline bool segment_within_mask(Point p, Point q, const SelectionMask& mask, bool outside_allowed = false) {
  std::vector<double> ts{0.0, 1.0};
  const auto crossings = [&](double a, double b) {
    if (a == b) return;
    const double lo = std::min(a, b), hi = std::max(a, b);
    for (double k = std::ceil(lo - 0.5) + 0.5; k < hi; k += 1.0)
      if (k > lo) ts.push_back((k - a) / (b - a));
  };
  crossings(p.x, q.x);
  crossings(p.y, q.y);
  std::sort(ts.begin(), ts.end());
  const auto selected = [&](std::int64_t c, std::int64_t r) {
    if (c < 0 || r < 0 || c >= mask.width() || r >= mask.height()) return outside_allowed;
    return mask(static_cast<std::int32_t>(c), static_cast<std::int32_t>(r));
  };
  // Candidate pixel indices along one axis: two when the coordinate sits on a grid line.
  const auto cells = [](double v, std::int64_t out[2]) {
    const double s = v + 0.5;
    const double f = std::floor(s);
    out[0] = static_cast<std::int64_t>(f);
    if (s == f) {
      out[1] = out[0] - 1;
      return 2;
    }
    return 1;
  };
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    if (ts[i + 1] - ts[i] <= 0.0) continue;
    const double t = 0.5 * (ts[i] + ts[i + 1]);
    const Point m = p + t * (q - p);
    std::int64_t cx[2], cy[2];
    const int nx = cells(m.x, cx), ny = cells(m.y, cy);
    bool ok = false;
    for (int a = 0; a < nx && !ok; ++a)
      for (int b = 0; b < ny && !ok; ++b) ok = selected(cx[a], cy[b]);
    if (!ok) return false;
  }
  return true;
}

namespace detail {

// A set of polylines over shared vertices that are simplified together so
// that no chord ever crosses or overlaps another current edge.
class PolylineSimplifier {
 public:
  struct Chain {
    std::vector<std::uint32_t> v;  // vertex ids in order
    bool closed = false;
  };

  PolylineSimplifier(std::vector<Point> pts, std::vector<Chain> chains, SimplifyParams params,
                     const SelectionMask* within)
      : pts_(std::move(pts)), chains_(std::move(chains)), params_(params), within_(within) {
    alive_.resize(chains_.size());
    for (std::size_t c = 0; c < chains_.size(); ++c) alive_[c].assign(chains_[c].v.size(), true);
    rebuild_edges();
  }

  void run() {
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t c = 0; c < chains_.size(); ++c) {
        const std::size_t n = chains_[c].v.size();
        for (std::size_t i = 0; i < n; ++i)
          if (try_remove(c, i)) changed = true;
      }
    }
  }

  bool alive(std::size_t chain, std::size_t i) const { return alive_[chain][i]; }
  const std::vector<Chain>& chains() const { return chains_; }
  const std::vector<Point>& points() const { return pts_; }

 private:
  std::size_t alive_count(std::size_t c) const {
    return static_cast<std::size_t>(std::count(alive_[c].begin(), alive_[c].end(), true));
  }

  // Previous/next alive position on the chain; n when there is none.
  std::size_t step(std::size_t c, std::size_t i, bool forward) const {
    const std::size_t n = chains_[c].v.size();
    std::size_t j = i;
    for (std::size_t k = 0; k < n; ++k) {
      if (forward) {
        if (j + 1 == n && !chains_[c].closed) return n;
        j = (j + 1) % n;
      } else {
        if (j == 0 && !chains_[c].closed) return n;
        j = (j + n - 1) % n;
      }
      if (alive_[c][j]) return j;
    }
    return n;
  }

  void rebuild_edges() {
    edges_.clear();
    for (std::size_t c = 0; c < chains_.size(); ++c) {
      const std::size_t n = chains_[c].v.size();
      for (std::size_t i = 0; i < n; ++i) {
        if (!alive_[c][i]) continue;
        const std::size_t j = step(c, i, true);
        if (j != n) edges_.insert(key(chains_[c].v[i], chains_[c].v[j]));
      }
    }
  }

  static std::pair<std::uint32_t, std::uint32_t> key(std::uint32_t a, std::uint32_t b) { return std::minmax(a, b); }

  bool chord_clear(std::uint32_t a, std::uint32_t b, std::uint32_t p) const {
    const Point pa = pts_[a], pb = pts_[b];
    const double minx = std::min(pa.x, pb.x), maxx = std::max(pa.x, pb.x);
    const double miny = std::min(pa.y, pb.y), maxy = std::max(pa.y, pb.y);
    for (const auto& [c, d] : edges_) {
      if ((c == p || d == p)) continue;  // the two edges being replaced
      const Point pc = pts_[c], pd = pts_[d];
      if (std::max(pc.x, pd.x) < minx || std::min(pc.x, pd.x) > maxx || std::max(pc.y, pd.y) < miny ||
          std::min(pc.y, pd.y) > maxy)
        continue;
      const int shared = (c == a || c == b) + (d == a || d == b);
      if (shared == 2) return false;
      if (shared == 1) {
        const std::uint32_t s = (c == a || c == b) ? c : d;
        const std::uint32_t e = s == c ? d : c;
        const std::uint32_t o = s == a ? b : a;
        const Point ps = pts_[s], pe = pts_[e], po = pts_[o];
        if (orient(ps, po, pe) == 0 && dot(po - ps, pe - ps) > 0) return false;
        continue;
      }
      if (segments_intersect(pa, pb, pc, pd)) return false;
    }
    return true;
  }

  bool try_remove(std::size_t c, std::size_t i) {
    if (!alive_[c][i]) return false;
    const Chain& ch = chains_[c];
    const std::size_t n = ch.v.size();
    if (!ch.closed && (i == 0 || i + 1 == n)) return false;
    const std::size_t ip = step(c, i, false), in = step(c, i, true);
    if (ip == n || in == n || ip == in) return false;
    const std::uint32_t a = ch.v[ip], b = ch.v[in], p = ch.v[i];
    // A closed chain keeps a triangle; an open one starting and ending at the
    // same vertex keeps two interior points.
    if (ch.closed && alive_count(c) <= 3) return false;
    if (!ch.closed && a == b) return false;
    if (!ch.closed && ch.v.front() == ch.v.back() && alive_count(c) <= 4) return false;
    if (pts_[a] == pts_[b]) return false;

    // Every original point between the new neighbours stays within w0.
    for (std::size_t k = (ip + 1) % n; k != in; k = (k + 1) % n)
      if (point_segment_distance(pts_[ch.v[k]], pts_[a], pts_[b]) > params_.w0) return false;
    if (within_ && !segment_within_mask(pts_[a], pts_[b], *within_, params_.outside_image_allowed)) return false;
    if (!chord_clear(a, b, p)) return false;
    if (ch.closed) {
      const double before = current_area(c);
      const double after = before - 0.5 * (cross(pts_[a], pts_[p]) + cross(pts_[p], pts_[b]) - cross(pts_[a], pts_[b]));
      if (after == 0.0 || (after > 0) != (before > 0)) return false;
    }
    alive_[c][i] = false;
    edges_.erase(key(a, p));
    edges_.erase(key(p, b));
    edges_.insert(key(a, b));
    return true;
  }

  double current_area(std::size_t c) const {
    double acc = 0.0;
    const std::size_t n = chains_[c].v.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive_[c][i]) continue;
      const std::size_t j = step(c, i, true);
      acc += cross(pts_[chains_[c].v[i]], pts_[chains_[c].v[j]]);
    }
    return 0.5 * acc;
  }

  std::vector<Point> pts_;
  std::vector<Chain> chains_;
  SimplifyParams params_;
  const SelectionMask* within_;
  std::vector<std::vector<bool>> alive_;
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges_;
};

}  // namespace detail

/// Removes support points in ascending index order, sweeping until nothing
/// changes. A point goes when every original point between its surviving
/// neighbours lies within w0 of their chord, the chord keeps the contour
/// simple with the same orientation, and (given `within`) the chord stays
/// inside the selected pixels. Contours of three or fewer points are
/// returned unchanged.
inline Contour simplify(const Contour& contour, SimplifyParams params = {}, const SelectionMask* within = nullptr) {
  if (contour.points.size() <= 3) return contour;
  std::vector<std::uint32_t> ids(contour.points.size());
  for (std::uint32_t i = 0; i < ids.size(); ++i) ids[i] = i;
  detail::PolylineSimplifier s(contour.points, {{ids, true}}, params, within);
  s.run();
  Contour out = contour;
  out.points.clear();
  out.sources.clear();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!s.alive(0, i)) continue;
    out.points.push_back(contour.points[i]);
    if (i < contour.sources.size()) out.sources.push_back(contour.sources[i]);
  }
  if (out.sources.size() != out.points.size()) out.sources.clear();
  return out;
}

/// Simplifies a planar network of undirected segments as a whole: vertices of
/// degree other than two, and any `pinned` point, stay; the chains between
/// them are thinned with the same rules as `simplify`, checked against every
/// other current segment. Returns the removed points.
inline std::set<Point> simplify_network(std::span<const std::pair<Point, Point>> segments, SimplifyParams params = {},
                                        const SelectionMask* within = nullptr, std::span<const Point> pinned = {}) {
  std::map<Point, std::uint32_t> index;
  std::vector<Point> pts;
  const auto id = [&](Point p) {
    auto [it, fresh] = index.emplace(p, static_cast<std::uint32_t>(pts.size()));
    if (fresh) pts.push_back(p);
    return it->second;
  };
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const auto& [a, b] : segments)
    if (a != b) edges.insert(std::minmax(id(a), id(b)));
  std::vector<std::vector<std::uint32_t>> adj(pts.size());
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> fixed(pts.size());
  for (std::uint32_t v = 0; v < pts.size(); ++v) fixed[v] = adj[v].size() != 2;
  for (const Point& p : pinned)
    if (auto it = index.find(p); it != index.end()) fixed[it->second] = true;

  // Visit vertices in point order for determinism.
  std::vector<std::uint32_t> order(pts.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return pts[a] < pts[b]; });
  for (auto& nb : adj) std::sort(nb.begin(), nb.end(), [&](std::uint32_t a, std::uint32_t b) { return pts[a] < pts[b]; });

  std::set<std::pair<std::uint32_t, std::uint32_t>> used;
  std::vector<detail::PolylineSimplifier::Chain> chains;
  const auto walk = [&](std::uint32_t start, std::uint32_t first) {
    detail::PolylineSimplifier::Chain ch;
    ch.v.push_back(start);
    std::uint32_t prev = start, cur = first;
    used.insert(std::minmax(prev, cur));
    while (!fixed[cur] && cur != start) {
      ch.v.push_back(cur);
      const std::uint32_t next = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
      prev = cur;
      cur = next;
      used.insert(std::minmax(prev, cur));
    }
    if (cur == start && !fixed[start]) {
      ch.closed = true;
    } else {
      ch.v.push_back(cur);
    }
    return ch;
  };
  for (std::uint32_t v : order) {
    if (!fixed[v]) continue;
    for (std::uint32_t nb : adj[v])
      if (!used.count(std::minmax(v, nb))) chains.push_back(walk(v, nb));
  }
  for (std::uint32_t v : order) {
    if (fixed[v] || adj[v].size() != 2 || used.count(std::minmax(v, adj[v][0]))) continue;
    chains.push_back(walk(v, adj[v][0]));
  }

  detail::PolylineSimplifier s(pts, chains, params, within);
  s.run();
  std::set<Point> removed;
  for (std::size_t c = 0; c < chains.size(); ++c)
    for (std::size_t i = 0; i < chains[c].v.size(); ++i)
      if (!s.alive(c, i)) removed.insert(pts[chains[c].v[i]]);
  return removed;
}

/// Copy of `c` without the given points.
inline Contour drop_points(const Contour& c, const std::set<Point>& removed) {
  Contour out = c;
  out.points.clear();
  out.sources.clear();
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    if (removed.count(c.points[i])) continue;
    out.points.push_back(c.points[i]);
    if (i < c.sources.size()) out.sources.push_back(c.sources[i]);
  }
  if (out.sources.size() != out.points.size()) out.sources.clear();
  return out;
}

/// Contours whose perimeter exceeds `min_length`.
inline std::vector<Contour> filter_by_length(std::span<const Contour> contours, double min_length) {
  std::vector<Contour> out;
  for (const Contour& c : contours)
    if (perimeter(c.points) > min_length) out.push_back(c);
  return out;
}

struct AreaCentroid {
  double area = 0.0;
  Point centroid;
};

/// Area-weighted mean of triangle centroids over the interior triangles of
/// `tri` that lie inside `contour`.
inline AreaCentroid area_and_centroid(const Contour& contour, const Triangulation& tri) {
  AreaCentroid r;
  double cx = 0.0, cy = 0.0;
  for (std::uint32_t t = 0; t < tri.triangles.size(); ++t) {
    if (!tri.triangles[t].interior) continue;
    const Point g = tri.centroid(t);
    if (winding_number(g, contour.points) == 0) continue;
    const double a = tri.area(t);
    r.area += a;
    cx += a * g.x;
    cy += a * g.y;
  }
  if (!(r.area > 0.0)) throw Error(ErrorCode::ZeroArea, "contour encloses no area");
  r.centroid = {cx / r.area, cy / r.area};
  return r;
}

/// Same, triangulating the contour on its own.
inline AreaCentroid area_and_centroid(const Contour& contour) {
  if (contour.points.size() < 3 || signed_area(contour.points) == 0.0)
    throw Error(ErrorCode::ZeroArea, "degenerate contour");
  const std::vector<Contour> one{contour};
  return area_and_centroid(contour, triangulate_contours(one));
}

}  // namespace contourforge
