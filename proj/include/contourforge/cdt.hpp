#pragma once
// Constrained Delaunay triangulation without Steiner points.
//
// Points are inserted incrementally (Bowyer-Watson) in Hilbert-curve order.
// A vertex at infinity closes the convex hull with "ghost" triangles, so no
// bounding triangle is needed and hull updates fall out of the same cavity
// code. Constraint segments are recovered afterwards by flipping away the
// edges they cross, followed by local Delaunay restoration of the new edges.
//
// All geometric decisions use the exact predicates, so lattice inputs with
// many cocircular and collinear points are handled deterministically: an
// in-circle tie never triggers a flip, which makes the earliest inserted
// configuration win.

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "boundary.hpp"
#include "error.hpp"
#include "geometry.hpp"

namespace contourforge {

inline constexpr std::uint32_t kNoTriangle = std::numeric_limits<std::uint32_t>::max();

struct IndexEdge {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  friend bool operator==(const IndexEdge&, const IndexEdge&) = default;
};

struct Triangle {
  std::array<std::uint32_t, 3> v{};    // counterclockwise
  std::array<std::uint32_t, 3> adj{};  // neighbour across edge (v[i], v[i+1]) or kNoTriangle
  std::array<bool, 3> constrained{};
  std::array<bool, 3> virtual_edge{};  // boundary created by pruning
  bool interior = false;

  int index_of(std::uint32_t vertex) const {
    for (int i = 0; i < 3; ++i)
      if (v[i] == vertex) return i;
    return -1;
  }
  /// Edge slot whose endpoints are {a, b} in either direction, or -1.
  int edge_index(std::uint32_t a, std::uint32_t b) const {
    for (int i = 0; i < 3; ++i) {
      const std::uint32_t p = v[i], q = v[(i + 1) % 3];
      if ((p == a && q == b) || (p == b && q == a)) return i;
    }
    return -1;
  }
  friend bool operator==(const Triangle&, const Triangle&) = default;
};

struct Triangulation {
  std::vector<Point> points;
  std::vector<Triangle> triangles;

  Point corner(std::uint32_t t, int i) const { return points[triangles[t].v[i]]; }
  Point centroid(std::uint32_t t) const {
    const Point a = corner(t, 0), b = corner(t, 1), c = corner(t, 2);
    return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
  }
  double area(std::uint32_t t) const {
    const Point a = corner(t, 0), b = corner(t, 1), c = corner(t, 2);
    return 0.5 * cross(b - a, c - a);
  }
  std::size_t hull_edge_count() const {
    std::size_t n = 0;
    for (const auto& t : triangles)
      for (auto a : t.adj) n += a == kNoTriangle;
    return n;
  }

  /// Directed edge (a, b) -> (triangle, slot). Built on demand.
  std::unordered_map<std::uint64_t, std::pair<std::uint32_t, int>> edge_lookup() const {
    std::unordered_map<std::uint64_t, std::pair<std::uint32_t, int>> m;
    m.reserve(triangles.size() * 3);
    for (std::uint32_t t = 0; t < triangles.size(); ++t)
      for (int i = 0; i < 3; ++i) m.emplace(key(triangles[t].v[i], triangles[t].v[(i + 1) % 3]), std::pair{t, i});
    return m;
  }
  static constexpr std::uint64_t key(std::uint32_t a, std::uint32_t b) {
    return (std::uint64_t{a} << 32) | b;
  }

  friend bool operator==(const Triangulation&, const Triangulation&) = default;
};

namespace detail {

inline std::uint64_t hilbert_index(std::uint32_t n, std::uint32_t x, std::uint32_t y) {
  std::uint64_t d = 0;
  for (std::uint32_t s = n / 2; s > 0; s /= 2) {
    const std::uint32_t rx = (x & s) > 0 ? 1u : 0u;
    const std::uint32_t ry = (y & s) > 0 ? 1u : 0u;
    d += std::uint64_t{s} * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = n - 1 - x;
        y = n - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

inline std::vector<std::uint32_t> hilbert_order(std::span<const Point> pts) {
  std::vector<std::uint32_t> order(pts.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  if (pts.empty()) return order;
  double x0 = pts[0].x, x1 = x0, y0 = pts[0].y, y1 = y0;
  for (const Point& p : pts) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-300});
  constexpr std::uint32_t n = 1u << 16;
  std::vector<std::uint64_t> key(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto q = [&](double v, double lo) {
      return static_cast<std::uint32_t>(std::min((v - lo) / span * (n - 1), double(n - 1)));
    };
    key[i] = hilbert_index(n, q(pts[i].x, x0), q(pts[i].y, y0));
  }
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return key[a] != key[b] ? key[a] < key[b] : a < b;
  });
  return order;
}

class CdtBuilder {
 public:
  static constexpr std::uint32_t kGhost = std::numeric_limits<std::uint32_t>::max();

  explicit CdtBuilder(std::span<const Point> pts) : pts_(pts), vtri_(pts.size(), kNoTriangle) {}

  /// Returns false when the points are all collinear (no triangles exist).
  bool insert_points() {
    check_duplicates();
    if (pts_.size() < 3) return false;
    const std::vector<std::uint32_t> order = hilbert_order(pts_);
    const std::uint32_t a = order[0], b = order[1];
    std::size_t k = 2;
    while (k < order.size() && orient_v(a, b, order[k]) == 0) ++k;
    if (k == order.size()) return false;
    seed(a, b, order[k]);
    for (std::size_t i = 2; i < order.size(); ++i)
      if (i != k) insert_point(order[i]);
    return true;
  }

  void insert_constraint(std::uint32_t a, std::uint32_t b) {
    const std::uint32_t goal = b;
    while (a != goal) a = recover_segment(a, goal);
  }

  Triangulation finish() const {
    Triangulation out;
    out.points.assign(pts_.begin(), pts_.end());
    std::vector<std::uint32_t> keep;
    for (std::uint32_t t = 0; t < tris_.size(); ++t)
      if (tris_[t].alive && !is_ghost(t)) keep.push_back(t);
    // Canonical form: each triangle starts at its smallest vertex, triangles
    // sorted lexicographically. Identical input then gives identical output
    // regardless of the internal slot history.
    std::vector<std::pair<std::array<std::uint32_t, 3>, std::uint32_t>> canon;
    std::vector<int> shift(tris_.size(), 0);
    for (std::uint32_t t : keep) {
      const auto& v = tris_[t].v;
      int s = 0;
      if (v[1] < v[s]) s = 1;
      if (v[2] < v[s]) s = 2;
      shift[t] = s;
      canon.push_back({{v[s], v[(s + 1) % 3], v[(s + 2) % 3]}, t});
    }
    std::sort(canon.begin(), canon.end());
    std::vector<std::uint32_t> remap(tris_.size(), kNoTriangle);
    for (std::uint32_t i = 0; i < canon.size(); ++i) remap[canon[i].second] = i;
    out.triangles.resize(canon.size());
    for (std::uint32_t i = 0; i < canon.size(); ++i) {
      const std::uint32_t t = canon[i].second;
      Triangle& o = out.triangles[i];
      for (int j = 0; j < 3; ++j) {
        const int src = (j + shift[t]) % 3;
        o.v[j] = tris_[t].v[src];
        o.adj[j] = remap[tris_[t].n[src]];
        o.constrained[j] = tris_[t].c[src];
      }
    }
    return out;
  }

 private:
  struct Tri {
    std::array<std::uint32_t, 3> v{};
    std::array<std::uint32_t, 3> n{kNoTriangle, kNoTriangle, kNoTriangle};
    std::array<bool, 3> c{};
    bool alive = true;
  };

  std::span<const Point> pts_;
  std::vector<Tri> tris_;
  std::vector<std::uint32_t> vtri_;  // some live triangle incident to each vertex
  std::vector<std::uint32_t> free_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::uint32_t hint_ = 0;
  std::uint32_t walk_rng_ = 12345;

  const Point& P(std::uint32_t v) const { return pts_[v]; }
  int orient_v(std::uint32_t a, std::uint32_t b, std::uint32_t c) const { return orient(P(a), P(b), P(c)); }
  bool is_ghost(std::uint32_t t) const {
    const auto& v = tris_[t].v;
    return v[0] == kGhost || v[1] == kGhost || v[2] == kGhost;
  }
  static int next(int i) { return i == 2 ? 0 : i + 1; }
  static int prev(int i) { return i == 0 ? 2 : i - 1; }

  void check_duplicates() const {
    std::vector<std::uint32_t> idx(pts_.size());
    for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return P(a) != P(b) ? P(a) < P(b) : a < b; });
    for (std::size_t i = 1; i < idx.size(); ++i)
      if (P(idx[i]) == P(idx[i - 1]))
        throw Error(ErrorCode::DuplicatePoint, "points " + std::to_string(idx[i - 1]) + " and " +
                                                   std::to_string(idx[i]) + " coincide");
    for (const Point& p : pts_)
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw Error(ErrorCode::InvalidArgument, "non-finite point coordinate");
  }

  std::uint32_t new_tri(std::array<std::uint32_t, 3> v) {
    std::uint32_t t;
    if (!free_.empty()) {
      t = free_.back();
      free_.pop_back();
      tris_[t] = Tri{};
    } else {
      t = static_cast<std::uint32_t>(tris_.size());
      tris_.emplace_back();
      stamp_.push_back(0);
    }
    tris_[t].v = v;
    for (std::uint32_t x : v)
      if (x != kGhost) vtri_[x] = t;
    return t;
  }
  void kill(std::uint32_t t) {
    tris_[t].alive = false;
    free_.push_back(t);
  }
  void link(std::uint32_t t, int i, std::uint32_t u, int j) {
    tris_[t].n[i] = u;
    tris_[u].n[j] = t;
  }
  int edge_slot(std::uint32_t t, std::uint32_t a, std::uint32_t b) const {
    const auto& v = tris_[t].v;
    for (int i = 0; i < 3; ++i)
      if (v[i] == a && v[next(i)] == b) return i;
    return -1;
  }

  void seed(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    if (orient_v(a, b, c) < 0) std::swap(a, b);
    const std::uint32_t f = new_tri({a, b, c});
    const std::uint32_t g0 = new_tri({b, a, kGhost});
    const std::uint32_t g1 = new_tri({c, b, kGhost});
    const std::uint32_t g2 = new_tri({a, c, kGhost});
    link(f, 0, g0, 0);
    link(f, 1, g1, 0);
    link(f, 2, g2, 0);
    link(g0, 1, g2, 2);
    link(g0, 2, g1, 1);
    link(g1, 2, g2, 1);
    vtri_[a] = vtri_[b] = vtri_[c] = f;
    hint_ = f;
  }

  // Strictly between a and b, given that the three points are collinear.
  bool strictly_between(std::uint32_t a, std::uint32_t b, std::uint32_t p) const {
    const Point &pa = P(a), &pb = P(b), &pp = P(p);
    return pa < pb ? (pa < pp && pp < pb) : (pb < pp && pp < pa);
  }

  bool in_conflict(std::uint32_t t, std::uint32_t p) const {
    const auto& v = tris_[t].v;
    if (is_ghost(t)) {
      int g = 0;
      while (v[g] != kGhost) ++g;
      const std::uint32_t a = v[next(g)], b = v[prev(g)];
      // Hull edge a->b for the ghost (a, b, inf) is v[g+1] -> v[g+2].
      const int o = orient_v(a, b, p);
      return o > 0 || (o == 0 && strictly_between(a, b, p));
    }
    return in_circle(P(v[0]), P(v[1]), P(v[2]), P(p)) > 0;
  }

  std::uint32_t locate(std::uint32_t p) {
    std::uint32_t t = hint_;
    if (!tris_[t].alive || is_ghost(t)) {
      t = 0;
      while (!tris_[t].alive || is_ghost(t)) ++t;
    }
    for (;;) {
      if (is_ghost(t)) return t;
      walk_rng_ = walk_rng_ * 1103515245u + 12345u;
      const int start = static_cast<int>((walk_rng_ >> 16) % 3);
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        const int i = (start + k) % 3;
        const auto& v = tris_[t].v;
        if (orient_v(v[i], v[next(i)], p) < 0) {
          t = tris_[t].n[i];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
  }

  struct BoundaryEdge {
    std::uint32_t a, b, outside;
    int slot;
    bool constrained;
  };

  void insert_point(std::uint32_t p) {
    const std::uint32_t t0 = locate(p);
    ++epoch_;
    const std::uint32_t in = epoch_;
    const std::uint32_t out = ++epoch_;
    std::vector<std::uint32_t> cavity{t0};
    stamp_[t0] = in;
    std::vector<BoundaryEdge> boundary;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      const std::uint32_t t = cavity[k];
      for (int i = 0; i < 3; ++i) {
        const std::uint32_t nb = tris_[t].n[i];
        if (stamp_[nb] == in) continue;
        if (stamp_[nb] != out && in_conflict(nb, p)) {
          stamp_[nb] = in;
          cavity.push_back(nb);
          continue;
        }
        stamp_[nb] = out;
        const std::uint32_t a = tris_[t].v[i], b = tris_[t].v[next(i)];
        boundary.push_back({a, b, nb, edge_slot(nb, b, a), tris_[t].c[i]});
      }
    }
    for (std::uint32_t t : cavity) kill(t);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> by_start;
    by_start.reserve(boundary.size());
    for (const BoundaryEdge& e : boundary) {
      const std::uint32_t t = new_tri({e.a, e.b, p});
      tris_[t].c[0] = e.constrained;
      link(t, 0, e.outside, e.slot);
      by_start.push_back({e.a, t});
      if (e.a != kGhost && e.b != kGhost) hint_ = t;
    }
    std::sort(by_start.begin(), by_start.end());
    const auto find_start = [&](std::uint32_t v) {
      return std::lower_bound(by_start.begin(), by_start.end(), std::pair{v, std::uint32_t{0}})->second;
    };
    for (const auto& [a, t] : by_start) {
      const std::uint32_t b = tris_[t].v[1];
      link(t, 1, find_start(b), 2);
    }
  }

  void mark_constrained(std::uint32_t t, int i) {
    tris_[t].c[i] = true;
    const std::uint32_t nb = tris_[t].n[i];
    tris_[nb].c[edge_slot(nb, tris_[t].v[next(i)], tris_[t].v[i])] = true;
  }

  // Triangles around vertex a, in rotation order.
  std::vector<std::uint32_t> ring(std::uint32_t a) const {
    std::vector<std::uint32_t> r;
    const std::uint32_t start = vtri_[a];
    std::uint32_t t = start;
    do {
      r.push_back(t);
      const int i = tris_[t].v[0] == a ? 0 : (tris_[t].v[1] == a ? 1 : 2);
      t = tris_[t].n[prev(i)];
    } while (t != start && r.size() <= tris_.size());
    return r;
  }

  bool collinear_between(std::uint32_t a, std::uint32_t b, std::uint32_t x) const {
    return x != kGhost && orient_v(a, b, x) == 0 && strictly_between(a, b, x);
  }

  [[noreturn]] void crossing(std::uint32_t a, std::uint32_t b) const {
    throw Error(ErrorCode::CrossingConstraints,
                "constraint " + std::to_string(a) + "-" + std::to_string(b) + " crosses another constraint");
  }

  // Slot of edge {a, b} in the triangle holding the directed edge a->b.
  std::pair<std::uint32_t, int> find_edge(std::uint32_t a, std::uint32_t b) const {
    for (std::uint32_t t : ring(a)) {
      const int i = edge_slot(t, a, b);
      if (i >= 0) return {t, i};
    }
    return {kNoTriangle, -1};
  }

  // Replaces the diagonal in slot i of t by the other diagonal of the quad.
  // With t = (u, w, p) and its neighbour (w, u, q) the result is
  // t = (u, q, p) and neighbour = (q, w, p).
  void flip(std::uint32_t t, int i) {
    const std::uint32_t nb = tris_[t].n[i];
    const int j = edge_slot(nb, tris_[t].v[next(i)], tris_[t].v[i]);
    const std::uint32_t u = tris_[t].v[i], w = tris_[t].v[next(i)], p = tris_[t].v[prev(i)];
    const std::uint32_t q = tris_[nb].v[prev(j)];
    struct Side {
      std::uint32_t tri;
      bool c;
    };
    const Side uq{tris_[nb].n[next(j)], tris_[nb].c[next(j)]};
    const Side qw{tris_[nb].n[prev(j)], tris_[nb].c[prev(j)]};
    const Side wp{tris_[t].n[next(i)], tris_[t].c[next(i)]};
    const Side pu{tris_[t].n[prev(i)], tris_[t].c[prev(i)]};
    const auto attach = [&](std::uint32_t tri, int slot, Side s, std::uint32_t a, std::uint32_t b) {
      tris_[tri].c[slot] = s.c;
      link(tri, slot, s.tri, edge_slot(s.tri, b, a));
    };
    tris_[t].v = {u, q, p};
    tris_[nb].v = {q, w, p};
    tris_[t].c = {false, false, false};
    tris_[nb].c = {false, false, false};
    attach(t, 0, uq, u, q);
    attach(t, 2, pu, p, u);
    attach(nb, 0, qw, q, w);
    attach(nb, 1, wp, w, p);
    link(t, 1, nb, 2);
    vtri_[u] = vtri_[q] = vtri_[p] = t;
    vtri_[w] = nb;
  }

  // Inserts the part of segment a-b up to the first vertex it meets and
  // returns that vertex (b itself, or a collinear vertex in between).
  // Crossing edges are removed by flipping (Sloan's method), then the
  // Delaunay property is restored around the new edges.
  std::uint32_t recover_segment(std::uint32_t a, std::uint32_t b) {
    std::uint32_t start = kNoTriangle, x = 0, y = 0;
    int start_slot = 0;
    for (std::uint32_t t : ring(a)) {
      if (is_ghost(t)) continue;
      const int i = tris_[t].v[0] == a ? 0 : (tris_[t].v[1] == a ? 1 : 2);
      const std::uint32_t tx = tris_[t].v[next(i)], ty = tris_[t].v[prev(i)];
      if (tx == b || collinear_between(a, b, tx)) {
        mark_constrained(t, i);
        return tx;
      }
      if (ty == b || collinear_between(a, b, ty)) {
        mark_constrained(t, prev(i));
        return ty;
      }
      if (start == kNoTriangle && orient_v(a, tx, b) > 0 && orient_v(a, ty, b) < 0) {
        start = t;
        start_slot = next(i);
        x = tx;
        y = ty;
      }
    }
    if (start == kNoTriangle)
      throw Error(ErrorCode::InvalidArgument, "cannot locate constraint " + std::to_string(a) + "-" +
                                                  std::to_string(b));

    // Collect the edges pierced by the segment. x stays right of a->b, y left.
    std::deque<IndexEdge> crossed;
    std::uint32_t t = start;
    int slot = start_slot;
    std::uint32_t end = kGhost;
    while (end == kGhost) {
      if (tris_[t].c[slot]) crossing(a, b);
      crossed.push_back({x, y});
      const std::uint32_t nt = tris_[t].n[slot];
      const int j = edge_slot(nt, y, x);
      const std::uint32_t z = tris_[nt].v[prev(j)];
      if (z == kGhost) throw Error(ErrorCode::InvalidArgument, "constraint leaves the convex hull");
      const int o = z == b ? 0 : orient_v(a, b, z);
      if (o == 0) {
        end = z;
        break;
      }
      t = nt;
      if (o > 0) {
        slot = next(j);  // edge (x, z)
        y = z;
      } else {
        slot = prev(j);  // edge (z, y)
        x = z;
      }
    }

    const auto pierces = [&](std::uint32_t p, std::uint32_t q) {
      return orient_v(a, end, p) * orient_v(a, end, q) < 0;
    };
    std::vector<IndexEdge> fresh;
    std::size_t stalled = 0;
    while (!crossed.empty()) {
      const IndexEdge e = crossed.front();
      crossed.pop_front();
      const auto [tt, i] = find_edge(e.a, e.b);
      const std::uint32_t nb = tris_[tt].n[i];
      const std::uint32_t p = tris_[tt].v[prev(i)];
      const std::uint32_t q = tris_[nb].v[prev(edge_slot(nb, e.b, e.a))];
      if (orient_v(e.a, q, p) <= 0 || orient_v(q, e.b, p) <= 0) {
        crossed.push_back(e);  // quad not strictly convex yet
        // A full pass without a convex quad cannot happen for valid input.
        if (++stalled > crossed.size())
          throw Error(ErrorCode::InvalidArgument, "constraint recovery did not converge");
        continue;
      }
      stalled = 0;
      flip(tt, i);
      if (pierces(p, q))
        crossed.push_back({q, p});
      else
        fresh.push_back({q, p});
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (IndexEdge& e : fresh) {
        if ((e.a == a && e.b == end) || (e.a == end && e.b == a)) continue;
        const auto [tt, i] = find_edge(e.a, e.b);
        if (tris_[tt].c[i]) continue;
        const std::uint32_t nb = tris_[tt].n[i];
        if (is_ghost(tt) || is_ghost(nb)) continue;
        const std::uint32_t p = tris_[tt].v[prev(i)];
        const std::uint32_t q = tris_[nb].v[prev(edge_slot(nb, e.b, e.a))];
        const auto& v = tris_[tt].v;
        if (in_circle(P(v[0]), P(v[1]), P(v[2]), P(q)) > 0) {
          flip(tt, i);
          e = {q, p};
          changed = true;
        }
      }
    }
    const auto [tt, i] = find_edge(a, end);
    if (tt == kNoTriangle) throw Error(ErrorCode::InvalidArgument, "constraint recovery failed");
    mark_constrained(tt, i);
    hint_ = tt;
    return end;
  }
};

}  // namespace detail

/// Constrained Delaunay triangulation of `points` containing every edge of
/// `constraints` (pairs of point indices). Interior flags are left unset.
inline Triangulation triangulate(std::span<const Point> points, std::span<const IndexEdge> constraints = {}) {
  for (const IndexEdge& e : constraints) {
    if (e.a >= points.size() || e.b >= points.size())
      throw Error(ErrorCode::InvalidArgument, "constraint index out of range");
    if (e.a == e.b) throw Error(ErrorCode::InvalidArgument, "zero-length constraint");
  }
  detail::CdtBuilder builder(points);
  if (!builder.insert_points()) {
    Triangulation out;
    out.points.assign(points.begin(), points.end());
    return out;
  }
  for (const IndexEdge& e : constraints) builder.insert_constraint(e.a, e.b);
  return builder.finish();
}

namespace detail {

// Vertex path along segment a-b through collinear triangulation vertices, or
// nothing when a-b is not covered by triangulation edges.
inline std::optional<std::vector<std::uint32_t>> edge_path(
    const Triangulation& tri, const std::vector<std::vector<std::uint32_t>>& star, std::uint32_t a,
    std::uint32_t b) {
  std::vector<std::uint32_t> path{a};
  const Point pa = tri.points[a], pb = tri.points[b];
  std::uint32_t cur = a;
  while (cur != b) {
    std::uint32_t step = kNoTriangle;
    for (std::uint32_t t : star[cur]) {
      for (std::uint32_t x : tri.triangles[t].v) {
        if (x == cur) continue;
        if (x == b) {
          step = b;
          break;
        }
        const Point px = tri.points[x];
        if (orient(pa, pb, px) == 0 && (pa < pb ? (tri.points[cur] < px && px < pb)
                                                : (pb < px && px < tri.points[cur]))) {
          step = x;
        }
      }
      if (step == b) break;
    }
    if (step == kNoTriangle) return std::nullopt;
    path.push_back(step);
    cur = step;
  }
  return path;
}

}  // namespace detail

/// Sets `interior` on every triangle whose centroid has nonzero winding number
/// with respect to the given closed contours.
inline void classify_interior(Triangulation& tri, std::span<const Contour> contours) {
  for (auto& t : tri.triangles) t.interior = false;
  if (tri.triangles.empty() || contours.empty()) return;

  std::map<Point, std::uint32_t> index;
  for (std::uint32_t i = 0; i < tri.points.size(); ++i) index.emplace(tri.points[i], i);
  std::vector<std::vector<std::uint32_t>> star(tri.points.size());
  for (std::uint32_t t = 0; t < tri.triangles.size(); ++t)
    for (std::uint32_t v : tri.triangles[t].v) star[v].push_back(t);

  // Net number of contour edges running a->b minus b->a, keyed on directed a->b.
  std::unordered_map<std::uint64_t, int> flow;
  bool representable = true;
  for (const Contour& c : contours) {
    const std::size_t n = c.points.size();
    for (std::size_t i = 0; i < n && representable; ++i) {
      const Point p = c.points[i], q = c.points[(i + 1) % n];
      if (p == q) continue;
      const auto ip = index.find(p), iq = index.find(q);
      if (ip == index.end() || iq == index.end()) {
        representable = false;
        break;
      }
      const auto path = detail::edge_path(tri, star, ip->second, iq->second);
      if (!path) {
        representable = false;
        break;
      }
      for (std::size_t k = 0; k + 1 < path->size(); ++k) {
        ++flow[Triangulation::key((*path)[k], (*path)[k + 1])];
        --flow[Triangulation::key((*path)[k + 1], (*path)[k])];
      }
    }
  }

  if (!representable) {
    for (std::uint32_t t = 0; t < tri.triangles.size(); ++t) {
      const Point c = tri.centroid(t);
      int w = 0;
      for (const Contour& ct : contours) w += winding_number(c, ct.points);
      tri.triangles[t].interior = w != 0;
    }
    return;
  }

  const auto delta = [&](std::uint32_t a, std::uint32_t b) {
    const auto it = flow.find(Triangulation::key(a, b));
    return it == flow.end() ? 0 : it->second;
  };
  std::vector<int> winding(tri.triangles.size(), 0);
  std::vector<bool> seen(tri.triangles.size(), false);
  std::vector<std::uint32_t> queue;
  for (std::uint32_t t = 0; t < tri.triangles.size() && queue.empty(); ++t)
    for (int i = 0; i < 3; ++i)
      if (tri.triangles[t].adj[i] == kNoTriangle) {
        // Outside the hull the winding number is zero; a triangle lies to the
        // left of its own edges, so a->b contour flow adds to it.
        winding[t] = delta(tri.triangles[t].v[i], tri.triangles[t].v[(i + 1) % 3]);
        seen[t] = true;
        queue.push_back(t);
        break;
      }
  for (std::size_t k = 0; k < queue.size(); ++k) {
    const std::uint32_t t = queue[k];
    const Triangle& tr = tri.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const std::uint32_t nb = tr.adj[i];
      if (nb == kNoTriangle || seen[nb]) continue;
      seen[nb] = true;
      winding[nb] = winding[t] - delta(tr.v[i], tr.v[(i + 1) % 3]);
      queue.push_back(nb);
    }
  }
  for (std::uint32_t t = 0; t < tri.triangles.size(); ++t) tri.triangles[t].interior = winding[t] != 0;
}

/// CDT of the union of the contours' support points with every contour edge
/// as a constraint, interior flags set. Repeated points are merged and
/// zero-length edges skipped.
inline Triangulation triangulate_contours(std::span<const Contour> contours,
                                          std::span<const Point> extra_points = {}) {
  std::vector<Point> pts;
  std::map<Point, std::uint32_t> index;
  const auto add = [&](Point p) {
    auto [it, inserted] = index.emplace(p, static_cast<std::uint32_t>(pts.size()));
    if (inserted) pts.push_back(p);
    return it->second;
  };
  std::vector<IndexEdge> edges;
  std::vector<std::uint64_t> seen;
  for (const Contour& c : contours) {
    const std::size_t n = c.points.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t a = add(c.points[i]), b = add(c.points[(i + 1) % n]);
      if (a == b) continue;
      seen.push_back(Triangulation::key(std::min(a, b), std::max(a, b)));
      edges.push_back({a, b});
    }
  }
  for (const Point& p : extra_points) add(p);
  // Drop repeated undirected edges, keeping the first occurrence.
  std::vector<IndexEdge> unique_edges;
  {
    std::vector<std::uint64_t> sorted = seen;
    std::sort(sorted.begin(), sorted.end());
    std::vector<bool> used(sorted.size(), false);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto pos = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), seen[i]) - sorted.begin());
      if (used[pos]) continue;
      used[pos] = true;
      unique_edges.push_back(edges[i]);
    }
  }
  Triangulation tri = triangulate(pts, unique_edges);
  classify_interior(tri, contours);
  return tri;
}

}  // namespace contourforge
