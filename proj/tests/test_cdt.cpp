#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <contourforge/cdt.hpp>

#include "exact_oracle.hpp"
#include "oracles.hpp"
#include "random_geometry.hpp"

using namespace contourforge;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

// Every constraint is present, split at collinear vertices, and flagged.
void expect_constraints_present(const Triangulation& tri, const std::vector<IndexEdge>& cons) {
  for (const auto& e : cons) {
    std::vector<std::uint32_t> chain = oracle::points_inside_segment(tri.points, e.a, e.b);
    const Point a = tri.points[e.a];
    std::sort(chain.begin(), chain.end(), [&](auto p, auto q) {
      return distance(a, tri.points[p]) < distance(a, tri.points[q]);
    });
    chain.insert(chain.begin(), e.a);
    chain.push_back(e.b);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      bool found = false;
      for (const auto& t : tri.triangles) {
        const int s = t.edge_index(chain[i], chain[i + 1]);
        if (s >= 0) {
          found = true;
          EXPECT_TRUE(t.constrained[s]);
        }
      }
      EXPECT_TRUE(found) << chain[i] << "-" << chain[i + 1];
    }
  }
}

void expect_valid_mesh(const Triangulation& tri) {
  long double total = 0;
  for (std::uint32_t t = 0; t < tri.triangles.size(); ++t) {
    const auto& tr = tri.triangles[t];
    EXPECT_EQ(oracle::exact_orient(tri.points[tr.v[0]], tri.points[tr.v[1]], tri.points[tr.v[2]]), 1);
    total += tri.area(t);
    for (int i = 0; i < 3; ++i) {
      const std::uint32_t nb = tr.adj[i];
      if (nb == kNoTriangle) continue;
      // Adjacency is symmetric and the neighbour holds the reversed edge.
      const auto& o = tri.triangles[nb];
      const int j = o.edge_index(tr.v[i], tr.v[(i + 1) % 3]);
      ASSERT_GE(j, 0);
      EXPECT_EQ(o.v[j], tr.v[(i + 1) % 3]);
      EXPECT_EQ(o.adj[j], t);
      EXPECT_EQ(o.constrained[j], tr.constrained[i]);
    }
  }
  // Triangles tile the convex hull: areas sum to the hull area.
  std::vector<Point> p = tri.points;
  std::sort(p.begin(), p.end());
  std::vector<Point> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && oracle::exact_orient(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && oracle::exact_orient(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  EXPECT_NEAR(static_cast<double>(total), static_cast<double>(oracle::shoelace(h)), 1e-9 * (1 + std::abs(total)));
}

}  // namespace

TEST(Triangulate, ThreePoints) {
  const std::vector<Point> pts{{0, 0}, {1, 0}, {0, 1}};
  const Triangulation t = triangulate(pts);
  ASSERT_EQ(t.triangles.size(), 1u);
  EXPECT_EQ(t.hull_edge_count(), 3u);
}

TEST(Triangulate, CollinearAndTinyInputsHaveNoTriangles) {
  const std::vector<Point> line{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  EXPECT_TRUE(triangulate(line).triangles.empty());
  EXPECT_TRUE(triangulate(std::vector<Point>{{0, 0}, {1, 0}}).triangles.empty());
  EXPECT_TRUE(triangulate(std::vector<Point>{}).triangles.empty());
}

TEST(Triangulate, UnitSquareSharedDiagonalIsLegal) {
  const std::vector<Point> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Triangulation t = triangulate(pts);
  ASSERT_EQ(t.triangles.size(), 2u);
  int shared = 0;
  for (int i = 0; i < 3; ++i)
    if (t.triangles[0].adj[i] != kNoTriangle) {
      ++shared;
      EXPECT_FALSE(t.triangles[0].constrained[i]);
    }
  EXPECT_EQ(shared, 1);
  EXPECT_EQ(oracle::illegal_edges(t), 0u);
  EXPECT_EQ(t, triangulate(pts));
}

TEST(Triangulate, ConstrainedDiagonalIsAnEdge) {
  const std::vector<Point> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (IndexEdge d : {IndexEdge{0, 2}, IndexEdge{1, 3}}) {
    const std::vector<IndexEdge> cons{d};
    const Triangulation t = triangulate(pts, cons);
    EXPECT_TRUE(oracle::has_edge(t, d.a, d.b));
    expect_constraints_present(t, cons);
  }
}

TEST(Triangulate, ConstraintOverridesDelaunay) {
  // A flat quad whose Delaunay diagonal is the short one; force the long one.
  const std::vector<Point> pts{{-3, 0}, {0, -0.5}, {3, 0}, {0, 0.5}};
  const std::vector<IndexEdge> cons{{0, 2}};
  EXPECT_TRUE(oracle::has_edge(triangulate(pts), 1, 3));
  const Triangulation t = triangulate(pts, cons);
  EXPECT_TRUE(oracle::has_edge(t, 0, 2));
  EXPECT_FALSE(oracle::has_edge(t, 1, 3));
}

TEST(Triangulate, ConstraintThroughCollinearVertexIsSplit) {
  const std::vector<Point> pts{{0, 0}, {1, 0}, {2, 0}, {1, 1}, {1, -1}};
  const std::vector<IndexEdge> cons{{0, 2}};
  const Triangulation t = triangulate(pts, cons);
  expect_constraints_present(t, cons);
  EXPECT_FALSE(oracle::has_edge(t, 0, 2));
}

TEST(Triangulate, Errors) {
  EXPECT_EQ(code_of([] { triangulate(std::vector<Point>{{0, 0}, {1, 0}, {0, 0}}); }),
            ErrorCode::DuplicatePoint);
  const std::vector<Point> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_EQ(code_of([&] { triangulate(pts, std::vector<IndexEdge>{{0, 2}, {1, 3}}); }),
            ErrorCode::CrossingConstraints);
  EXPECT_EQ(code_of([&] { triangulate(pts, std::vector<IndexEdge>{{0, 7}}); }), ErrorCode::InvalidArgument);
}

TEST(TriangulateProperties, EulerRelation) {
  std::mt19937_64 rng(100);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 198;
    const auto pts = oracle::random_points(rng, n, trial % 2 == 0);
    const Triangulation t = triangulate(pts);
    const std::size_t h = oracle::hull_boundary_points(pts);
    if (t.triangles.empty()) continue;  // all collinear
    EXPECT_EQ(t.triangles.size(), 2 * (n - 1) - h) << trial;
    EXPECT_EQ(t.hull_edge_count(), h);
  }
}

TEST(TriangulateProperties, DelaunayAndConstraints) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 4 + rng() % 47;
    const bool lattice = trial % 2 == 0;
    const auto pts = oracle::random_points(rng, n, lattice);
    const Triangulation plain = triangulate(pts);
    if (plain.triangles.empty()) continue;
    EXPECT_EQ(oracle::illegal_edges(plain), 0u);
    // Unconstrained output is globally Delaunay: no point inside any circumcircle.
    for (const auto& tr : plain.triangles)
      for (const Point& p : pts)
        EXPECT_LE(oracle::exact_incircle(pts[tr.v[0]], pts[tr.v[1]], pts[tr.v[2]], p), 0);

    const auto cons = oracle::random_constraints(rng, pts, n);
    const Triangulation t = triangulate(pts, cons);
    expect_valid_mesh(t);
    expect_constraints_present(t, cons);
    EXPECT_EQ(oracle::illegal_edges(t), 0u);
    EXPECT_EQ(t.triangles.size(), plain.triangles.size());
    EXPECT_EQ(t, triangulate(pts, cons));
  }
}

TEST(TriangulateProperties, LargeLatticeStress) {
  std::mt19937_64 rng(102);
  std::vector<Point> pts;
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x)
      if (rng() % 3) pts.push_back({x * 0.5, y * 0.5});
  const auto cons = oracle::random_constraints(rng, pts, 200);
  const Triangulation t = triangulate(pts, cons);
  expect_valid_mesh(t);
  expect_constraints_present(t, cons);
  EXPECT_EQ(oracle::illegal_edges(t), 0u);
  EXPECT_EQ(t.triangles.size(), 2 * (pts.size() - 1) - oracle::hull_boundary_points(pts));
}

TEST(ClassifyInterior, DiamondAnnulusAndEmpty) {
  Contour diamond;
  diamond.points = {{0, -0.5}, {0.5, 0}, {0, 0.5}, {-0.5, 0}};
  const std::vector<Contour> one{diamond};
  const Triangulation d = triangulate_contours(one);
  ASSERT_EQ(d.triangles.size(), 2u);
  for (const auto& t : d.triangles) EXPECT_TRUE(t.interior);

  Contour outer, inner;
  outer.points = {{0, 0}, {4, 0}, {4, 4}, {0, 4}};
  inner.points = {{1, 1}, {1, 3}, {3, 3}, {3, 1}};  // clockwise
  const std::vector<Contour> ring{outer, inner};
  const Triangulation a = triangulate_contours(ring);
  double area = 0;
  for (std::uint32_t t = 0; t < a.triangles.size(); ++t) {
    const Point c = a.centroid(t);
    const bool hole = c.x > 1 && c.x < 3 && c.y > 1 && c.y < 3;
    EXPECT_EQ(a.triangles[t].interior, !hole);
    if (a.triangles[t].interior) area += a.area(t);
  }
  EXPECT_DOUBLE_EQ(area, 12.0);

  Triangulation bare = triangulate(outer.points);
  classify_interior(bare, {});
  for (const auto& t : bare.triangles) EXPECT_FALSE(t.interior);
}

TEST(ClassifyInterior, MatchesWindingOracleOnMasks) {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 100; ++trial) {
    const SelectionMask m = oracle::random_mask(rng, 10, 0.5);
    const auto cs = extract_contours(m, trial % 2 ? TurnPolicy::right() : TurnPolicy::left());
    if (cs.empty()) continue;
    const Triangulation t = triangulate_contours(cs);
    expect_valid_mesh(t);
    double interior_area = 0;
    for (std::uint32_t k = 0; k < t.triangles.size(); ++k) {
      const Point c = t.centroid(k);
      int w = 0;
      for (const auto& ct : cs) w += oracle::inside_even_odd(c, ct.points) ? (ct.is_shape() ? 1 : -1) : 0;
      EXPECT_EQ(t.triangles[k].interior, w != 0);
      if (t.triangles[k].interior) interior_area += t.area(k);
    }
    long double expected = 0;
    for (const auto& ct : cs) expected += oracle::shoelace(ct.points);
    EXPECT_NEAR(interior_area, static_cast<double>(expected), 1e-9);
    EXPECT_EQ(oracle::illegal_edges(t), 0u);
  }
}

TEST(ClassifyInterior, FallbackForEdgesNotInMesh) {
  // Contour whose points are absent from the triangulation still classifies by winding.
  const std::vector<Point> grid{{0, 0}, {4, 0}, {4, 4}, {0, 4}, {2, 2}};
  Triangulation t = triangulate(grid);
  Contour c;
  c.points = {{1, 1}, {3, 1}, {3, 3}, {1, 3}};
  const std::vector<Contour> cs{c};
  classify_interior(t, cs);
  for (std::uint32_t k = 0; k < t.triangles.size(); ++k)
    EXPECT_EQ(t.triangles[k].interior, winding_number(t.centroid(k), c.points) != 0);
}
