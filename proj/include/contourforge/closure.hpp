#pragma once
// Frame addition, gap closure, torso splitting and reconnection of vectors
// into region-enclosing contours.
//
// Everything here works on plain directed segments between exact points.
// Undirected skeleton, gap and split segments contribute both directions;
// the image frame and existing shape contours contribute one direction only.
// Reconnection then walks every directed segment keeping its left side as
// the region, which is the left-turn rule of the contour connection step.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "boundary.hpp"
#include "cdt.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "skeleton.hpp"

namespace contourforge {

struct DirectedSegment {
  Point from;
  Point to;
  friend bool operator==(const DirectedSegment&, const DirectedSegment&) = default;
};

enum class PairSource : std::uint8_t { SkeletonSegment, FrameEdge, GapEdge, TorsoSplit };

/// Two opposite vectors sharing the segment a-b.
struct VectorPair {
  Point a;
  Point b;
  PairSource source = PairSource::SkeletonSegment;
  friend bool operator==(const VectorPair&, const VectorPair&) = default;
};

/// Counterclockwise loop of support points around the image rectangle.
struct Frame {
  std::vector<Point> points;
};

enum class GapPolicy : std::uint8_t { Shortest, DirectionPreserving };

struct GapOptions {
  GapPolicy policy = GapPolicy::Shortest;
  /// Also allow a terminal to connect to another skeleton terminal.
  bool general = false;
  /// Skip terminals without any candidate instead of failing.
  bool lenient = false;
};

/// Frame with unit spacing along the image border, corners included.
inline Frame add_frame(std::int32_t width, std::int32_t height) {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "frame needs a non-empty image");
  const double x0 = -0.5, y0 = -0.5, x1 = width - 0.5, y1 = height - 0.5;
  Frame f;
  f.points.reserve(2 * static_cast<std::size_t>(width + height));
  for (std::int32_t i = 0; i < width; ++i) f.points.push_back({x0 + i, y0});
  for (std::int32_t i = 0; i < height; ++i) f.points.push_back({x1, y0 + i});
  for (std::int32_t i = 0; i < width; ++i) f.points.push_back({x1 - i, y1});
  for (std::int32_t i = 0; i < height; ++i) f.points.push_back({x0, y1 - i});
  return f;
}

/// Inserts every point lying on a frame side (and not already a frame point)
/// at its position along that side.
inline Frame attach_to_frame(const Frame& frame, std::span<const Point> pts) {
  const std::size_t n = frame.points.size();
  const std::set<Point> existing(frame.points.begin(), frame.points.end());
  std::vector<std::vector<Point>> extra(n);
  for (const Point& p : pts) {
    if (existing.count(p)) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = frame.points[i], b = frame.points[(i + 1) % n];
      if (on_segment(a, b, p)) {
        extra[i].push_back(p);
        break;
      }
    }
  }
  Frame out;
  for (std::size_t i = 0; i < n; ++i) {
    out.points.push_back(frame.points[i]);
    auto& e = extra[i];
    const Point a = frame.points[i];
    std::sort(e.begin(), e.end(), [&](Point p, Point q) { return distance(a, p) < distance(a, q); });
    e.erase(std::unique(e.begin(), e.end()), e.end());
    out.points.insert(out.points.end(), e.begin(), e.end());
  }
  return out;
}

inline std::vector<DirectedSegment> frame_vectors(const Frame& frame) {
  std::vector<DirectedSegment> v;
  const std::size_t n = frame.points.size();
  for (std::size_t i = 0; i < n; ++i) v.push_back({frame.points[i], frame.points[(i + 1) % n]});
  return v;
}

/// Unique non-degenerate skeleton segments as vector pairs, in sorted order.
inline std::vector<VectorPair> skeleton_pairs(const Skeleton& s) {
  std::set<std::pair<Point, Point>> seen;
  for (const SkeletonSegment& seg : s.segments)
    if (seg.a != seg.b) seen.insert(std::minmax(seg.a, seg.b));
  std::vector<VectorPair> out;
  for (const auto& [a, b] : seen) out.push_back({a, b, PairSource::SkeletonSegment});
  return out;
}

/// Degree-one skeleton nodes together with the neighbour they hang from.
inline std::vector<std::pair<Point, Point>> skeleton_terminals(const Skeleton& s) {
  std::map<Point, std::vector<Point>> adj;
  for (const VectorPair& p : skeleton_pairs(s)) {
    adj[p.a].push_back(p.b);
    adj[p.b].push_back(p.a);
  }
  std::vector<std::pair<Point, Point>> out;
  for (const auto& [p, nb] : adj)
    if (nb.size() == 1) out.push_back({p, nb.front()});
  return out;
}

/// Gap-closing vector pairs between skeleton terminals and the frame, chosen
/// among the edges of a constrained triangulation of skeleton and frame.
///
/// Terminals already on the frame need no gap. Shortest picks the shortest
/// candidate; DirectionPreserving picks the candidate best aligned with the
/// terminal's last skeleton segment, shorter first on ties.
inline std::vector<VectorPair> close_gaps(const Skeleton& skeleton, const Frame& frame_in, GapOptions opt = {}) {
  const std::vector<VectorPair> segs = skeleton_pairs(skeleton);
  std::vector<Point> nodes;
  for (const VectorPair& p : segs) {
    nodes.push_back(p.a);
    nodes.push_back(p.b);
  }
  const Frame frame = attach_to_frame(frame_in, nodes);

  std::map<Point, std::uint32_t> index;
  std::vector<Point> pts;
  std::vector<bool> on_frame;
  const auto id = [&](Point p) {
    auto [it, fresh] = index.emplace(p, static_cast<std::uint32_t>(pts.size()));
    if (fresh) {
      pts.push_back(p);
      on_frame.push_back(false);
    }
    return it->second;
  };
  std::vector<IndexEdge> constraints;
  for (const Point& p : frame.points) on_frame[id(p)] = true;
  for (std::size_t i = 0; i < frame.points.size(); ++i)
    constraints.push_back({id(frame.points[i]), id(frame.points[(i + 1) % frame.points.size()])});
  for (const VectorPair& p : segs) constraints.push_back({id(p.a), id(p.b)});

  const auto terminals = skeleton_terminals(skeleton);
  std::vector<bool> is_terminal(pts.size(), false);
  for (const auto& t : terminals) is_terminal[index.at(t.first)] = true;

  const Triangulation tri = triangulate(pts, constraints);
  std::vector<std::set<std::uint32_t>> neighbours(pts.size());
  for (const Triangle& t : tri.triangles)
    for (int i = 0; i < 3; ++i) {
      neighbours[t.v[i]].insert(t.v[(i + 1) % 3]);
      neighbours[t.v[(i + 1) % 3]].insert(t.v[i]);
    }

  std::set<std::pair<Point, Point>> chosen;
  for (const auto& [term, prev] : terminals) {
    const std::uint32_t ti = index.at(term);
    if (on_frame[ti]) continue;
    const Point dir = term - prev;
    std::optional<std::uint32_t> best;
    double best_len = 0.0, best_cos = 0.0;
    for (std::uint32_t nb : neighbours[ti]) {
      if (!on_frame[nb] && !(opt.general && is_terminal[nb])) continue;
      const double len = distance(term, pts[nb]);
      const double cs = dot(pts[nb] - term, dir) / (len * norm(dir));
      bool better;
      if (!best) {
        better = true;
      } else if (opt.policy == GapPolicy::Shortest) {
        better = len < best_len || (len == best_len && pts[nb] < pts[*best]);
      } else {
        better = cs > best_cos || (cs == best_cos && (len < best_len || (len == best_len && pts[nb] < pts[*best])));
      }
      if (better) {
        best = nb;
        best_len = len;
        best_cos = cs;
      }
    }
    if (!best) {
      if (opt.lenient) continue;
      throw Error(ErrorCode::NoCandidateEdge,
                  "terminal (" + std::to_string(term.x) + ", " + std::to_string(term.y) + ") sees no frame point");
    }
    chosen.insert(std::minmax(term, pts[*best]));
  }
  std::vector<VectorPair> out;
  for (const auto& [a, b] : chosen) out.push_back({a, b, PairSource::GapEdge});
  return out;
}

namespace detail {

// Angular order of directions from a common origin, counterclockwise from +x.
// Exact: only coordinate comparisons and the orientation predicate are used.
struct AngleLess {
  Point o;
  static int half(Point o, Point p) { return (p.y > o.y || (p.y == o.y && p.x > o.x)) ? 0 : 1; }
  bool operator()(Point a, Point b) const {
    const int ha = half(o, a), hb = half(o, b);
    if (ha != hb) return ha < hb;
    return orient(o, a, b) > 0;
  }
};

inline bool same_direction(Point o, Point a, Point b) {
  return orient(o, a, b) == 0 && AngleLess::half(o, a) == AngleLess::half(o, b);
}

}  // namespace detail

/// Connects directed segments into closed loops, keeping the region on the
/// left: arriving at a point, the walk leaves along the outgoing segment with
/// the smallest clockwise angle from the way back. A reversal is taken only
/// when nothing else is available. Every segment is used exactly once.
inline std::vector<Contour> reconnect(std::span<const DirectedSegment> segments) {
  std::map<Point, std::uint32_t> index;
  std::vector<Point> pts;
  const auto id = [&](Point p) {
    auto [it, fresh] = index.emplace(p, static_cast<std::uint32_t>(pts.size()));
    if (fresh) pts.push_back(p);
    return it->second;
  };
  std::vector<std::pair<std::uint32_t, std::uint32_t>> seg(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].from == segments[i].to) throw Error(ErrorCode::InvalidArgument, "zero-length vector");
    seg[i] = {id(segments[i].from), id(segments[i].to)};
  }
  std::vector<std::vector<std::uint32_t>> out_of(pts.size());
  std::vector<int> balance(pts.size(), 0);
  for (std::uint32_t i = 0; i < seg.size(); ++i) {
    out_of[seg[i].first].push_back(i);
    ++balance[seg[i].first];
    --balance[seg[i].second];
  }
  for (std::uint32_t v = 0; v < pts.size(); ++v) {
    if (balance[v] != 0)
      throw Error(ErrorCode::OpenChain, "in/out degree mismatch at (" + std::to_string(pts[v].x) + ", " +
                                            std::to_string(pts[v].y) + ")");
    const detail::AngleLess less{pts[v]};
    std::sort(out_of[v].begin(), out_of[v].end(),
              [&](std::uint32_t a, std::uint32_t b) { return less(pts[seg[a].second], pts[seg[b].second]); });
  }

  const auto successor = [&](std::uint32_t in) -> std::uint32_t {
    const std::uint32_t v = seg[in].second;
    const Point back = pts[seg[in].first];
    const auto& outs = out_of[v];
    const detail::AngleLess less{pts[v]};
    // First outgoing strictly clockwise of the way back.
    std::size_t pos = static_cast<std::size_t>(
        std::lower_bound(outs.begin(), outs.end(), back,
                         [&](std::uint32_t s, Point p) { return less(pts[seg[s].second], p); }) -
        outs.begin());
    for (std::size_t k = 0; k < outs.size(); ++k) {
      pos = (pos + outs.size() - 1) % outs.size();
      if (!detail::same_direction(pts[v], pts[seg[outs[pos]].second], back)) return outs[pos];
    }
    return outs.front();
  };

  std::vector<bool> used(seg.size(), false);
  std::vector<Contour> loops;
  for (std::uint32_t s = 0; s < seg.size(); ++s) {
    if (used[s]) continue;
    Contour c;
    c.kind = ContourKind::Region;
    std::uint32_t cur = s;
    do {
      if (used[cur]) throw Error(ErrorCode::OpenChain, "vector reached twice; input is not a planar map");
      used[cur] = true;
      c.points.push_back(pts[seg[cur].first]);
      cur = successor(cur);
    } while (cur != s);
    c.orientation = signed_area(c.points) >= 0 ? Orientation::CounterClockwise : Orientation::Clockwise;
    loops.push_back(std::move(c));
  }
  return loops;
}

/// All vectors of a frame partition: refined frame, skeleton pairs and gaps.
inline std::vector<DirectedSegment> partition_vectors(const Skeleton& skeleton, const Frame& frame,
                                                      std::span<const VectorPair> gaps) {
  const std::vector<VectorPair> segs = skeleton_pairs(skeleton);
  std::vector<Point> nodes;
  for (const VectorPair& p : segs) {
    nodes.push_back(p.a);
    nodes.push_back(p.b);
  }
  std::vector<DirectedSegment> v = frame_vectors(attach_to_frame(frame, nodes));
  for (const VectorPair& p : segs) {
    v.push_back({p.a, p.b});
    v.push_back({p.b, p.a});
  }
  for (const VectorPair& p : gaps) {
    v.push_back({p.a, p.b});
    v.push_back({p.b, p.a});
  }
  return v;
}

/// Directed edges of the given contours, in stored orientation.
inline std::vector<DirectedSegment> contour_vectors(std::span<const Contour> contours) {
  std::vector<DirectedSegment> v;
  for (const Contour& c : contours) {
    const std::size_t n = c.points.size();
    for (std::size_t i = 0; i < n; ++i)
      if (c.points[i] != c.points[(i + 1) % n]) v.push_back({c.points[i], c.points[(i + 1) % n]});
  }
  return v;
}

/// Whether a torso may be split: neither end junction has its longest edge
/// on the side leading to the partner junction.
inline bool torso_eligible(const Triangulation& tri, const ChainComplex& chain) {
  if (chain.kind != ChainKind::Torso) return false;
  const auto longest = [&](std::uint32_t t) {
    int best = 0;
    double len = -1.0;
    for (int i = 0; i < 3; ++i) {
      const double l = distance(tri.corner(t, i), tri.corner(t, (i + 1) % 3));
      if (l > len) {
        len = l;
        best = i;
      }
    }
    return best;
  };
  return longest(chain.triangles.front()) != chain.first_exit && longest(chain.triangles.back()) != chain.last_entry;
}

/// One split pair per eligible torso, placed on the shortest edge shared by
/// consecutive triangles of the torso (its narrowest width).
inline std::vector<VectorPair> split_torsos(const Triangulation& tri, std::span<const ChainComplex> chains) {
  std::vector<VectorPair> out;
  for (const ChainComplex& c : chains) {
    if (!torso_eligible(tri, c)) continue;
    std::optional<std::pair<Point, Point>> best;
    double best_len = 0.0;
    for (std::size_t k = 0; k + 1 < c.triangles.size(); ++k) {
      const Triangle& t = tri.triangles[c.triangles[k]];
      for (int i = 0; i < 3; ++i) {
        if (t.adj[i] != c.triangles[k + 1]) continue;
        const Point p = tri.points[t.v[i]], q = tri.points[t.v[(i + 1) % 3]];
        const double len = distance(p, q);
        if (!best || len < best_len) {
          best = std::minmax(p, q);
          best_len = len;
        }
      }
    }
    if (best) out.push_back({best->first, best->second, PairSource::TorsoSplit});
  }
  return out;
}

struct RefineResult {
  std::vector<Contour> contours;
  std::vector<VectorPair> splits;
  std::size_t before = 0;
};

/// Splits shape contours at the narrowest width of every eligible torso of
/// their (unpruned) triangulation and reconnects the pieces.
inline RefineResult refine_contours(std::span<const Contour> contours) {
  RefineResult r;
  r.before = contours.size();
  std::vector<Contour> shapes;
  for (const Contour& c : contours)
    if (!c.degenerate && c.points.size() >= 3 && signed_area(c.points) != 0.0) shapes.push_back(c);
  const Triangulation tri = triangulate_contours(shapes);
  const std::vector<TriClass> classes = classify(tri);
  const std::vector<ChainComplex> chains = decompose_chains(tri, classes);
  r.splits = split_torsos(tri, chains);
  std::vector<DirectedSegment> v = contour_vectors(shapes);
  for (const VectorPair& p : r.splits) {
    v.push_back({p.a, p.b});
    v.push_back({p.b, p.a});
  }
  r.contours = reconnect(v);
  for (Contour& c : r.contours) c.kind = contours.empty() ? ContourKind::Region : contours.front().kind;
  return r;
}

}  // namespace contourforge
