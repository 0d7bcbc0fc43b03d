#include <gtest/gtest.h>

#include <random>
#include <set>

#include <contourforge/closure.hpp>
#include <contourforge/shapeops.hpp>

#include "oracles.hpp"
#include "synth.hpp"

using namespace contourforge;

namespace {

Contour make(std::vector<Point> pts) {
  Contour c;
  c.points = std::move(pts);
  return c;
}

double polyline_distance(Point p, const std::vector<Point>& loop) {
  double best = 1e300;
  for (std::size_t i = 0; i < loop.size(); ++i)
    best = std::min(best, point_segment_distance(p, loop[i], loop[(i + 1) % loop.size()]));
  return best;
}

// Symmetric Hausdorff distance, sampling each edge of both loops densely.
double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
  double h = 0.0;
  for (const auto* pair : {&a, &b}) {
    const auto& from = *pair;
    const auto& to = pair == &a ? b : a;
    for (std::size_t i = 0; i < from.size(); ++i) {
      const Point p = from[i], q = from[(i + 1) % from.size()];
      for (int k = 0; k <= 16; ++k) h = std::max(h, polyline_distance(p + (k / 16.0) * (q - p), to));
    }
  }
  return h;
}

bool inside_selected(Point p, const SelectionMask& m) {
  const double eps = 1e-12;
  for (int dc = -1; dc <= 1; ++dc)
    for (int dr = -1; dr <= 1; ++dr) {
      const int c = static_cast<int>(std::lround(p.x)) + dc, r = static_cast<int>(std::lround(p.y)) + dr;
      if (m(c, r) && std::abs(p.x - c) <= 0.5 + eps && std::abs(p.y - r) <= 0.5 + eps) return true;
    }
  return false;
}

std::vector<Contour> random_shapes(std::mt19937_64& rng, std::size_t count) {
  std::vector<Contour> out;
  while (out.size() < count) {
    const SelectionMask m = oracle::random_mask(rng, 12, 0.55);
    for (const Contour& c : extract_contours(m, TurnPolicy::left()))
      if (out.size() < count) out.push_back(c);
  }
  return out;
}

}  // namespace

TEST(Simplify, CollinearRunKeepsEndpoints) {
  // Rectangle whose bottom side carries three extra collinear points.
  const Contour c = make({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {4, 1}, {0, 1}});
  const Contour s = simplify(c, {0.7});
  EXPECT_EQ(s.points, (std::vector<Point>{{0, 0}, {4, 0}, {4, 1}, {0, 1}}));
}

TEST(Simplify, SquareWithMidpointsKeepsCorners) {
  const Contour c = make({{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}});
  EXPECT_EQ(simplify(c, {0.7}).points, (std::vector<Point>{{0, 0}, {2, 0}, {2, 2}, {0, 2}}));
}

TEST(Simplify, ZeroToleranceIsIdentityWithoutCollinearTriples) {
  std::mt19937_64 rng(41);
  for (const Contour& c : random_shapes(rng, 30)) {
    bool collinear = false;
    const std::size_t n = c.points.size();
    for (std::size_t i = 0; i < n; ++i)
      collinear |= orient(c.points[(i + n - 1) % n], c.points[i], c.points[(i + 1) % n]) == 0;
    if (!collinear) {
      EXPECT_EQ(simplify(c, {0.0}).points, c.points);
    }
  }
  const Contour tri = make({{0, 0}, {1, 0}, {0, 1}});
  EXPECT_EQ(simplify(tri, {5.0}).points, tri.points);
}

TEST(Simplify, HausdorffSimplicityAndOrientation) {
  std::mt19937_64 rng(42);
  for (const Contour& c : random_shapes(rng, 200)) {
    const Contour s = simplify(c, {0.7});
    ASSERT_GE(s.points.size(), 3u);
    EXPECT_TRUE(is_simple_polygon(s.points));
    EXPECT_EQ(signed_area(s.points) > 0, signed_area(c.points) > 0);
    EXPECT_LE(hausdorff(c.points, s.points), 0.7 + 1e-9);
    for (const Point& p : c.points) EXPECT_LE(polyline_distance(p, s.points), 0.7 + 1e-12);
  }
}

TEST(Simplify, MaskKeepsChordsOnSelectedPixels) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 60; ++trial) {
    const SelectionMask m = oracle::random_mask(rng, 12, 0.6);
    for (const Contour& c : extract_contours(m, TurnPolicy::left())) {
      const Contour s = simplify(c, {0.7}, &m);
      EXPECT_TRUE(is_simple_polygon(s.points));
      std::set<std::pair<Point, Point>> original;
      for (std::size_t i = 0; i < c.points.size(); ++i) original.insert({c.points[i], c.points[(i + 1) % c.points.size()]});
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        const Point p = s.points[i], q = s.points[(i + 1) % s.points.size()];
        // Dilated contours cut across concave corners; only new chords are constrained.
        if (original.count({p, q})) continue;
        for (int k = 0; k <= 64; ++k) EXPECT_TRUE(inside_selected(p + (k / 64.0) * (q - p), m)) << trial;
      }
    }
  }
}

TEST(Simplify, SegmentWithinMask) {
  SelectionMask m(3, 1);
  m.set(0, 0);
  m.set(2, 0);
  EXPECT_TRUE(segment_within_mask({-0.5, 0}, {0.5, 0}, m));
  EXPECT_FALSE(segment_within_mask({0, 0}, {2, 0}, m));
  m.set(1, 0);
  EXPECT_TRUE(segment_within_mask({0, 0}, {2, 0}, m));
  EXPECT_TRUE(segment_within_mask({-0.5, 0.5}, {2.5, 0.5}, m));  // along the top boundary
  EXPECT_FALSE(segment_within_mask({0, 0}, {0, 1}, m));
  EXPECT_TRUE(segment_within_mask({0, 0}, {0, 1}, m, true));
}

TEST(SimplifyNetwork, LatticePartitionStaysConsistent) {
  const SelectionMask m = synth::grain_lattice(3, 8);
  const auto cs = extract_contours(m, TurnPolicy::right());
  const PruneResult pr = prune(triangulate_contours(cs), {0.6});
  const Frame f = add_frame(m.width(), m.height());
  const auto vectors = partition_vectors(pr.skeleton, f, close_gaps(pr.skeleton, f));
  const auto regions = reconnect(vectors);
  std::vector<std::pair<Point, Point>> segs;
  for (const auto& v : vectors) segs.push_back({v.from, v.to});
  const std::vector<Point> corners{{-0.5, -0.5}, {25.5, -0.5}, {25.5, 25.5}, {-0.5, 25.5}};
  SimplifyParams params{0.7, true};
  const std::set<Point> removed = simplify_network(segs, params, &m, corners);
  EXPECT_FALSE(removed.empty());
  double total = 0.0;
  std::size_t before = 0, after = 0;
  for (const Contour& r : regions) {
    const Contour s = drop_points(r, removed);
    before += r.points.size();
    after += s.points.size();
    EXPECT_TRUE(is_simple_polygon(s.points));
    EXPECT_GT(signed_area(s.points), 0.0);
    total += signed_area(s.points);
  }
  EXPECT_LT(after, before);
  EXPECT_NEAR(total, 26.0 * 26.0, 1e-9);
  // The shared boundaries must still form a valid planar subdivision.
  std::vector<Contour> simplified;
  for (const Contour& r : regions) simplified.push_back(drop_points(r, removed));
  EXPECT_NO_THROW(triangulate_contours(simplified));
}

TEST(FilterByLength, Examples) {
  const Contour diamond = make({{0, -0.5}, {0.5, 0}, {0, 0.5}, {-0.5, 0}});
  const Contour blob = make({{0, 0}, {5, 0}, {5, 5}, {0, 5}});
  const std::vector<Contour> cs{diamond, blob};
  const auto kept = filter_by_length(cs, 8.0);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].points, blob.points);
  EXPECT_EQ(filter_by_length(cs, 0.0).size(), 2u);
  EXPECT_EQ(filter_by_length(kept, 8.0).size(), kept.size());
}

TEST(AreaCentroid, Examples) {
  const auto sq = area_and_centroid(make({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  EXPECT_DOUBLE_EQ(sq.area, 1.0);
  EXPECT_DOUBLE_EQ(sq.centroid.x, 0.5);
  EXPECT_DOUBLE_EQ(sq.centroid.y, 0.5);

  const auto d = area_and_centroid(make({{0, -0.5}, {0.5, 0}, {0, 0.5}, {-0.5, 0}}));
  EXPECT_DOUBLE_EQ(d.area, 0.5);
  EXPECT_NEAR(d.centroid.x, 0.0, 1e-15);
  EXPECT_NEAR(d.centroid.y, 0.0, 1e-15);

  // L of three unit squares: composite-body centroid (5/6, 5/6).
  const auto l = area_and_centroid(make({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}));
  EXPECT_NEAR(l.area, 3.0, 1e-12);
  EXPECT_NEAR(l.centroid.x, 5.0 / 6.0, 1e-12);
  EXPECT_NEAR(l.centroid.y, 5.0 / 6.0, 1e-12);
}

TEST(AreaCentroid, ZeroAreaRaises) {
  try {
    area_and_centroid(make({{0, 0}, {1, 0}, {2, 0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroArea);
  }
}

TEST(AreaCentroid, MatchesShoelaceOnRandomShapes) {
  std::mt19937_64 rng(44);
  for (const Contour& c : random_shapes(rng, 150)) {
    if (c.orientation != Orientation::CounterClockwise) continue;
    const auto r = area_and_centroid(c);
    const double a = signed_area(c.points);
    const Point g = polygon_centroid(c.points);
    EXPECT_NEAR(r.area, a, 1e-9 * a);
    const double scale = std::max(1.0, norm(g));
    EXPECT_NEAR(r.centroid.x, g.x, 1e-9 * scale);
    EXPECT_NEAR(r.centroid.y, g.y, 1e-9 * scale);
  }
}
