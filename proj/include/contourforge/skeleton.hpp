#pragma once
// Triangle classification, chordal-axis skeleton, significance pruning and
// limb/torso decomposition on a classified CDT.
//
// An interior triangle edge is external when it is constrained, marked
// virtual by pruning, lies on the hull, or borders a non-interior triangle.
// The number of external edges gives the class: 3 isolated, 2 terminated,
// 1 sleeve, 0 junction.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <tuple>
#include <vector>

#include "cdt.hpp"
#include "geometry.hpp"

namespace contourforge {

enum class TriClass : std::uint8_t { Exterior, Isolated, Terminated, Sleeve, Junction };

inline const char* to_string(TriClass c) {
  switch (c) {
    case TriClass::Exterior: return "exterior";
    case TriClass::Isolated: return "isolated";
    case TriClass::Terminated: return "terminated";
    case TriClass::Sleeve: return "sleeve";
    case TriClass::Junction: return "junction";
  }
  return "?";
}

inline bool is_external(const Triangulation& tri, std::uint32_t t, int i) {
  const Triangle& tr = tri.triangles[t];
  const std::uint32_t nb = tr.adj[i];
  return tr.constrained[i] || tr.virtual_edge[i] || nb == kNoTriangle || !tri.triangles[nb].interior;
}

inline int external_count(const Triangulation& tri, std::uint32_t t) {
  return is_external(tri, t, 0) + is_external(tri, t, 1) + is_external(tri, t, 2);
}

/// Class of every triangle; non-interior triangles are Exterior.
inline std::vector<TriClass> classify(const Triangulation& tri) {
  std::vector<TriClass> out(tri.triangles.size(), TriClass::Exterior);
  static constexpr std::array<TriClass, 4> by_count{TriClass::Junction, TriClass::Sleeve,
                                                    TriClass::Terminated, TriClass::Isolated};
  for (std::uint32_t t = 0; t < tri.triangles.size(); ++t)
    if (tri.triangles[t].interior) out[t] = by_count[external_count(tri, t)];
  return out;
}

struct ClassHistogram {
  std::size_t isolated = 0, terminated = 0, sleeve = 0, junction = 0;
  std::size_t interior() const { return isolated + terminated + sleeve + junction; }
  friend bool operator==(const ClassHistogram&, const ClassHistogram&) = default;
};

inline ClassHistogram histogram(std::span<const TriClass> classes) {
  ClassHistogram h;
  for (TriClass c : classes) {
    h.isolated += c == TriClass::Isolated;
    h.terminated += c == TriClass::Terminated;
    h.sleeve += c == TriClass::Sleeve;
    h.junction += c == TriClass::Junction;
  }
  return h;
}

struct SkeletonSegment {
  Point a;
  Point b;
  std::uint32_t triangle = 0;
  friend bool operator==(const SkeletonSegment&, const SkeletonSegment&) = default;
};

struct SkeletonPoint {
  Point p;
  std::uint32_t triangle = 0;
  friend bool operator==(const SkeletonPoint&, const SkeletonPoint&) = default;
};

struct Skeleton {
  std::vector<SkeletonSegment> segments;
  std::vector<SkeletonPoint> points;  // isolated-triangle markers
  std::vector<int> nesting;           // per triangle; -1 unless junction
  friend bool operator==(const Skeleton&, const Skeleton&) = default;
};

/// Hop distance from each junction triangle to the nearest interior triangle
/// that has an external edge, through internal edges. -1 for non-junctions.
inline std::vector<int> nesting_levels(const Triangulation& tri, std::span<const TriClass> classes) {
  const std::size_t n = tri.triangles.size();
  std::vector<int> dist(n, -1);
  std::vector<std::uint32_t> queue;
  for (std::uint32_t t = 0; t < n; ++t)
    if (classes[t] != TriClass::Exterior && classes[t] != TriClass::Junction) {
      dist[t] = 0;
      queue.push_back(t);
    }
  for (std::size_t k = 0; k < queue.size(); ++k) {
    const std::uint32_t t = queue[k];
    for (int i = 0; i < 3; ++i) {
      if (is_external(tri, t, i)) continue;
      const std::uint32_t nb = tri.triangles[t].adj[i];
      if (dist[nb] >= 0) continue;
      dist[nb] = dist[t] + 1;
      queue.push_back(nb);
    }
  }
  for (std::uint32_t t = 0; t < n; ++t)
    if (classes[t] != TriClass::Junction) dist[t] = -1;
  return dist;
}

inline Point edge_midpoint(const Triangulation& tri, std::uint32_t t, int i) {
  return midpoint(tri.corner(t, i), tri.corner(t, (i + 1) % 3));
}

inline Skeleton extract_skeleton(const Triangulation& tri, std::span<const TriClass> classes) {
  Skeleton s;
  for (std::uint32_t t = 0; t < tri.triangles.size(); ++t) {
    int internal[3];
    int k = 0;
    for (int i = 0; i < 3; ++i)
      if (!is_external(tri, t, i)) internal[k++] = i;
    switch (classes[t]) {
      case TriClass::Exterior: break;
      case TriClass::Isolated: s.points.push_back({tri.centroid(t), t}); break;
      case TriClass::Terminated:
        s.segments.push_back({edge_midpoint(tri, t, internal[0]), tri.corner(t, (internal[0] + 2) % 3), t});
        break;
      case TriClass::Sleeve:
        s.segments.push_back({edge_midpoint(tri, t, internal[0]), edge_midpoint(tri, t, internal[1]), t});
        break;
      case TriClass::Junction:
        for (int i = 0; i < 3; ++i) s.segments.push_back({edge_midpoint(tri, t, i), tri.centroid(t), t});
        break;
    }
  }
  s.nesting = nesting_levels(tri, classes);
  return s;
}

struct PruneParams {
  double rho0 = 0.6;
};

struct PruneResult {
  Triangulation tri;
  std::vector<TriClass> classes;
  Skeleton skeleton;
  std::size_t removed_triangles = 0;
};

namespace detail {

// Breadth-first search over interior triangles starting behind slot `edge` of
// junction `j`, never re-entering `j`. Tracks the significance of the branch
// as it grows and gives up (returning +inf) once it exceeds `bound`. A branch
// that reaches `j` through a second edge is not separable and also yields +inf.
inline double branch_rho(const Triangulation& tri, std::uint32_t j, int edge, double bound,
                         std::vector<std::uint32_t>& branch, std::vector<std::uint32_t>& mark,
                         std::uint32_t stamp) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const Triangle& J = tri.triangles[j];
  const std::uint32_t a = J.v[edge], b = J.v[(edge + 1) % 3], c = J.v[(edge + 2) % 3];
  const Point pa = tri.points[a], pb = tri.points[b];
  const double len = distance(pa, pb);
  double rho = 0.0;
  branch.clear();
  const std::uint32_t start = J.adj[edge];
  branch.push_back(start);
  mark[start] = stamp;
  for (std::size_t k = 0; k < branch.size(); ++k) {
    const std::uint32_t t = branch[k];
    for (std::uint32_t v : tri.triangles[t].v)
      if (v != a && v != b && v != c) rho = std::max(rho, point_segment_distance(tri.points[v], pa, pb) / len);
    if (rho > bound) return kInf;
    for (int i = 0; i < 3; ++i) {
      if (is_external(tri, t, i)) continue;
      const std::uint32_t nb = tri.triangles[t].adj[i];
      if (nb == j) {
        if (t != start || i != tri.triangles[t].edge_index(a, b)) return kInf;
        continue;
      }
      if (mark[nb] == stamp) continue;
      mark[nb] = stamp;
      branch.push_back(nb);
    }
  }
  return rho;
}

}  // namespace detail

/// Maximum over the branch's contour points (excluding A, B and the junction's
/// third vertex) of the clamped distance to AB, divided by |AB|. Infinite for
/// a branch that loops back to the junction.
inline double branch_significance(const Triangulation& tri, std::uint32_t junction, int edge) {
  std::vector<std::uint32_t> mark(tri.triangles.size(), 0), branch;
  return detail::branch_rho(tri, junction, edge, std::numeric_limits<double>::infinity(), branch, mark, 1);
}

/// Removes insignificant junction branches (significance below rho0).
///
/// Branches are removed as a threshold sweep: at every step the least
/// significant separable branch in the whole shape goes first, ties going to
/// the more deeply nested junction and then to the lower triangle index.
/// All edges of that junction sharing the minimal significance are removed
/// together, so a junction can turn into a sleeve, terminal or isolated
/// triangle. Because the order never depends on rho0, raising the threshold
/// only extends the removal sequence, and a second run removes nothing.
/// Removed triangles lose their interior flag and the junction edge becomes a
/// virtual boundary.
inline PruneResult prune(const Triangulation& input, PruneParams params) {
  PruneResult r{input, {}, {}, 0};
  Triangulation& tri = r.tri;
  std::vector<std::uint32_t> mark(tri.triangles.size(), 0), branch;
  std::uint32_t stamp = 0;
  for (;;) {
    const std::vector<TriClass> classes = classify(tri);
    const std::vector<int> level = nesting_levels(tri, classes);
    std::uint32_t best = kNoTriangle;
    double best_rho = params.rho0;
    std::array<double, 3> best_edges{};
    for (std::uint32_t j = 0; j < classes.size(); ++j) {
      if (classes[j] != TriClass::Junction) continue;
      std::array<double, 3> rho{};
      for (int i = 0; i < 3; ++i) {
        // Anything above the current best (or at/above rho0) cannot win.
        const double bound = best == kNoTriangle ? std::nextafter(params.rho0, 0.0) : best_rho;
        rho[i] = detail::branch_rho(tri, j, i, bound, branch, mark, ++stamp);
      }
      const double m = std::min({rho[0], rho[1], rho[2]});
      const bool better = best == kNoTriangle ? m < params.rho0
                                              : (m < best_rho || (m == best_rho && level[j] > level[best]));
      if (better) {
        best = j;
        best_rho = m;
        best_edges = rho;
      }
    }
    if (best == kNoTriangle) break;
    std::array<std::vector<std::uint32_t>, 3> drop;
    for (int i = 0; i < 3; ++i)
      if (best_edges[i] == best_rho) {
        detail::branch_rho(tri, best, i, std::numeric_limits<double>::infinity(), branch, mark, ++stamp);
        drop[i] = branch;
      }
    for (int i = 0; i < 3; ++i) {
      if (drop[i].empty()) continue;
      Triangle& J = tri.triangles[best];
      J.virtual_edge[i] = true;
      Triangle& N = tri.triangles[J.adj[i]];
      N.virtual_edge[N.edge_index(J.v[i], J.v[(i + 1) % 3])] = true;
      for (std::uint32_t t : drop[i]) tri.triangles[t].interior = false;
      r.removed_triangles += drop[i].size();
    }
  }
  r.classes = classify(tri);
  r.skeleton = extract_skeleton(tri, r.classes);
  return r;
}

enum class ChainKind : std::uint8_t { Limb, Torso, DegenerateLimb, DegenerateTorso };

inline const char* to_string(ChainKind k) {
  switch (k) {
    case ChainKind::Limb: return "limb";
    case ChainKind::Torso: return "torso";
    case ChainKind::DegenerateLimb: return "degenerate-limb";
    case ChainKind::DegenerateTorso: return "degenerate-torso";
  }
  return "?";
}

struct ChainComplex {
  ChainKind kind = ChainKind::Limb;
  std::vector<std::uint32_t> triangles;  // pairwise adjacent, end triangles included
  int first_exit = -1;                   // edge slot of triangles.front() leading into the chain
  int last_entry = -1;                   // edge slot of triangles.back() the chain arrives through
  friend bool operator==(const ChainComplex&, const ChainComplex&) = default;
};

/// Maximal sleeve chains delimited by junction or terminated triangles.
/// Limbs are oriented junction -> terminal.
inline std::vector<ChainComplex> decompose_chains(const Triangulation& tri, std::span<const TriClass> classes) {
  const std::size_t n = tri.triangles.size();
  std::vector<ChainComplex> out;
  std::vector<bool> sleeve_used(n, false);
  std::vector<std::tuple<std::uint32_t, int, std::uint32_t, int>> seen_direct;
  const auto is_end = [&](std::uint32_t t) {
    return classes[t] == TriClass::Junction || classes[t] == TriClass::Terminated;
  };

  for (std::uint32_t s = 0; s < n; ++s) {
    if (!is_end(s)) continue;
    for (int i = 0; i < 3; ++i) {
      if (is_external(tri, s, i)) continue;
      ChainComplex c;
      c.triangles.push_back(s);
      c.first_exit = i;
      std::uint32_t prev = s, cur = tri.triangles[s].adj[i];
      while (classes[cur] == TriClass::Sleeve) {
        c.triangles.push_back(cur);
        int out_edge = -1;
        for (int k = 0; k < 3; ++k)
          if (!is_external(tri, cur, k) && tri.triangles[cur].adj[k] != prev) out_edge = k;
        prev = cur;
        cur = tri.triangles[cur].adj[out_edge];
      }
      c.triangles.push_back(cur);
      for (int k = 0; k < 3; ++k)
        if (tri.triangles[cur].adj[k] == prev) c.last_entry = k;
      // Each chain is found once from each end; keep one copy.
      if (c.triangles.size() > 2) {
        if (sleeve_used[c.triangles[1]]) continue;
        for (std::size_t k = 1; k + 1 < c.triangles.size(); ++k) sleeve_used[c.triangles[k]] = true;
      } else {
        const auto key = std::tuple{std::min(s, cur), s < cur ? i : c.last_entry, std::max(s, cur),
                                    s < cur ? c.last_entry : i};
        if (std::find(seen_direct.begin(), seen_direct.end(), key) != seen_direct.end()) continue;
        seen_direct.push_back(key);
      }
      const bool js = classes[s] == TriClass::Junction, je = classes[cur] == TriClass::Junction;
      if (js && je) {
        c.kind = ChainKind::Torso;
      } else if (js || je) {
        c.kind = ChainKind::Limb;
        if (!js) {
          std::reverse(c.triangles.begin(), c.triangles.end());
          std::swap(c.first_exit, c.last_entry);
        }
      } else {
        c.kind = ChainKind::DegenerateLimb;
      }
      out.push_back(std::move(c));
    }
  }

  // Whatever sleeves remain form cycles.
  for (std::uint32_t s = 0; s < n; ++s) {
    if (classes[s] != TriClass::Sleeve || sleeve_used[s]) continue;
    ChainComplex c;
    c.kind = ChainKind::DegenerateTorso;
    std::uint32_t prev = kNoTriangle, cur = s;
    while (!sleeve_used[cur]) {
      sleeve_used[cur] = true;
      c.triangles.push_back(cur);
      std::uint32_t next = kNoTriangle;
      for (int k = 0; k < 3; ++k)
        if (!is_external(tri, cur, k) && tri.triangles[cur].adj[k] != prev) {
          next = tri.triangles[cur].adj[k];
          break;
        }
      prev = cur;
      cur = next;
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace contourforge
