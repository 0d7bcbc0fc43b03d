#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include <contourforge/boundary.hpp>

#include "oracles.hpp"

using namespace contourforge;

namespace {

SelectionMask diagonal_pair() {
  SelectionMask m(2, 2);
  m.set(0, 0);
  m.set(1, 1);
  return m;
}

}  // namespace

TEST(EmitVectors, SinglePixelIsCounterclockwiseSquare) {
  SelectionMask m(1, 1);
  m.set(0, 0);
  const auto list = emit_vectors(m).to_list();
  ASSERT_EQ(list.size(), 4u);
  const std::vector<ContourVector> expected{
      {{-0.5, -0.5}, {0.5, -0.5}, {0, 0}},
      {{0.5, -0.5}, {0.5, 0.5}, {0, 0}},
      {{0.5, 0.5}, {-0.5, 0.5}, {0, 0}},
      {{-0.5, 0.5}, {-0.5, -0.5}, {0, 0}},
  };
  EXPECT_EQ(list, expected);
  for (const auto& v : list) {
    // Owner center strictly left of every vector.
    EXPECT_GT(cross(v.endpoint - v.origin, pixel_center(v.owner) - v.origin), 0);
    EXPECT_EQ(distance(v.origin, v.endpoint), 1.0);
  }
}

TEST(EmitVectors, EmptyMask) {
  EXPECT_TRUE(emit_vectors(SelectionMask(3, 3)).empty());
}

TEST(EmitVectors, DiagonalPairSharesCorner) {
  const auto list = emit_vectors(diagonal_pair()).to_list();
  ASSERT_EQ(list.size(), 8u);
  const Point corner{0.5, 0.5};
  int in = 0, out = 0;
  for (const auto& v : list) {
    in += v.endpoint == corner;
    out += v.origin == corner;
  }
  EXPECT_EQ(in, 2);
  EXPECT_EQ(out, 2);
}

TEST(EmitVectors, ConservationAndWorkerIndependence) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const SelectionMask m = oracle::random_mask(rng, 20, 0.5);
    const BoundaryVectors one = emit_vectors(m, 1);
    EXPECT_EQ(one.count(), oracle::exposed_edges(m));
    EXPECT_EQ(one.to_list(), emit_vectors(m, 3).to_list());
  }
}

TEST(ConnectLoops, SinglePixel) {
  SelectionMask m(1, 1);
  m.set(0, 0);
  const auto v = emit_vectors(m);
  const auto loops = connect_loops(v, TurnPolicy::left());
  ASSERT_EQ(loops.size(), 1u);
  EXPECT_EQ(loops[0].size(), 4u);
}

TEST(ConnectLoops, DiagonalPairPolicies) {
  const auto v = emit_vectors(diagonal_pair());
  const auto left = connect_loops(v, TurnPolicy::left());
  ASSERT_EQ(left.size(), 2u);
  EXPECT_EQ(left[0].size(), 4u);
  EXPECT_EQ(left[1].size(), 4u);
  const auto right = connect_loops(v, TurnPolicy::right());
  ASSERT_EQ(right.size(), 1u);
  EXPECT_EQ(right[0].size(), 8u);
}

TEST(ConnectLoops, LocalGrayPolicyDecidesPerCorner) {
  // Diagonal pair of bright pixels; the off-diagonal values set the corner mean.
  const Grid bright_saddle(2, 2, {200, 150, 150, 200});
  const Grid dark_saddle(2, 2, {200, 0, 0, 200});
  const SelectionMask m = threshold_select(bright_saddle, 180, 255);
  const auto v = emit_vectors(m);
  EXPECT_EQ(connect_loops(v, TurnPolicy::local_gray(bright_saddle, 160)).size(), 2u);  // mean 175
  EXPECT_EQ(connect_loops(v, TurnPolicy::local_gray(dark_saddle, 160)).size(), 1u);    // mean 100
}

TEST(ConnectLoops, DanglingVector) {
  SelectionMask m(1, 1);
  m.set(0, 0);
  auto list = emit_vectors(m).to_list();
  list.pop_back();
  const auto partial = BoundaryVectors::from_vectors(list, 1, 1);
  try {
    connect_loops(partial, TurnPolicy::left());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DanglingVector);
  }
  EXPECT_THROW(BoundaryVectors::from_vectors(std::vector<ContourVector>{{{0, 0}, {1, 0}, {0, 0}}}, 1, 1),
               Error);
}

TEST(ConnectLoops, EveryVectorExactlyOnce) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const SelectionMask m = oracle::random_mask(rng, 12, 0.5);
    const auto v = emit_vectors(m);
    for (auto policy : {TurnPolicy::left(), TurnPolicy::right()}) {
      std::vector<VectorId> all;
      for (const auto& loop : connect_loops(v, policy)) all.insert(all.end(), loop.begin(), loop.end());
      std::sort(all.begin(), all.end());
      EXPECT_EQ(std::adjacent_find(all.begin(), all.end()), all.end());
      EXPECT_EQ(all.size(), v.count());
    }
  }
}

TEST(Dilate, SinglePixelDiamond) {
  SelectionMask m(1, 1);
  m.set(0, 0);
  const auto cs = extract_contours(m, TurnPolicy::left());
  ASSERT_EQ(cs.size(), 1u);
  const std::vector<Point> expected{{0, -0.5}, {0.5, 0}, {0, 0.5}, {-0.5, 0}};
  EXPECT_EQ(cs[0].points, expected);
  EXPECT_DOUBLE_EQ(cs[0].area(), 0.5);
  EXPECT_TRUE(cs[0].is_shape());
}

TEST(Dilate, DiagonalPairConnectMode) {
  const auto cs = extract_contours(diagonal_pair(), TurnPolicy::right());
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].points.size(), 8u);
  EXPECT_TRUE(is_simple_polygon(cs[0].points));
  EXPECT_GT(cs[0].area(), 0);
  EXPECT_EQ(winding_number({0, 0}, cs[0].points), 1);
  EXPECT_EQ(winding_number({1, 1}, cs[0].points), 1);
}

TEST(Dilate, TwoByOneHexagon) {
  SelectionMask m(2, 1);
  m.set(0, 0);
  m.set(1, 0);
  const auto cs = extract_contours(m, TurnPolicy::left());
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].points.size(), 6u);
  EXPECT_DOUBLE_EQ(cs[0].area(), 1.5);
}

TEST(Dilate, HoleIsClockwise) {
  const SelectionMask m = oracle::mask_from_rows({"###", "#.#", "###"});
  const auto cs = extract_contours(m, TurnPolicy::left());
  ASSERT_EQ(cs.size(), 2u);
  int shapes = 0, holes = 0;
  for (const auto& c : cs) {
    if (c.is_shape()) {
      ++shapes;
      EXPECT_GT(c.area(), 0);
    } else {
      ++holes;
      EXPECT_LT(c.area(), 0);
    }
  }
  EXPECT_EQ(shapes, 1);
  EXPECT_EQ(holes, 1);
}

TEST(Dilate, SourcesRecordPixelPairs) {
  SelectionMask m(2, 1);
  m.set(0, 0);
  const auto cs = extract_contours(m, TurnPolicy::left());
  ASSERT_EQ(cs[0].sources.size(), 4u);
  int interior = 0;
  for (const auto& s : cs[0].sources) {
    EXPECT_EQ(s.inner, (PixelCoord{0, 0}));
    if (s.outer_in_grid) {
      ++interior;
      EXPECT_EQ(s.outer, (PixelCoord{1, 0}));
    }
  }
  EXPECT_EQ(interior, 1);
}

TEST(TracePixels, SinglePixelIsFullyDegenerate) {
  SelectionMask m(1, 1);
  m.set(0, 0);
  const auto cs = extract_contours(m, TurnPolicy::left(), ContourMode::PixelTrace);
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].points.size(), 4u);
  EXPECT_TRUE(cs[0].degenerate);
  EXPECT_TRUE(fully_degenerate(cs[0]));
  EXPECT_EQ(cs[0].points[0], (Point{0, 0}));
}

TEST(TracePixels, DiagonalDisconnectGivesTwoPoints) {
  const auto cs = extract_contours(diagonal_pair(), TurnPolicy::left(), ContourMode::PixelTrace);
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_TRUE(fully_degenerate(cs[0]));
  EXPECT_TRUE(fully_degenerate(cs[1]));
  EXPECT_NE(cs[0].points[0], cs[1].points[0]);
}

TEST(TracePixels, ThreeByOneSegment) {
  SelectionMask m(3, 1);
  for (int c = 0; c < 3; ++c) m.set(c, 0);
  const auto cs = extract_contours(m, TurnPolicy::left(), ContourMode::PixelTrace);
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_TRUE(cs[0].degenerate);
  EXPECT_FALSE(fully_degenerate(cs[0]));
  // Hand trace: bottom edges, right edge, top edges, left edge.
  const std::vector<Point> expected{{0, 0}, {1, 0}, {2, 0}, {2, 0}, {2, 0}, {1, 0}, {0, 0}, {0, 0}};
  EXPECT_EQ(cs[0].points, expected);
}

TEST(DilateProperties, ComponentCountsSimplicityAndCoverage) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const SelectionMask m = oracle::random_mask(rng, 12, 0.45);
    for (bool right : {false, true}) {
      const auto cs = extract_contours(m, right ? TurnPolicy::right() : TurnPolicy::left());
      int shapes = 0;
      for (const auto& c : cs) {
        shapes += c.is_shape();
        EXPECT_EQ(oracle::count_self_crossings(c.points), 0);
        EXPECT_GT(std::abs(c.area()), 0);
        EXPECT_EQ(c.is_shape(), c.area() > 0);
      }
      EXPECT_EQ(shapes, oracle::count_components(m, right));
      // Summed winding over all contours is exactly the selection indicator.
      for (int r = 0; r < m.height(); ++r)
        for (int c = 0; c < m.width(); ++c) {
          int w = 0;
          for (const auto& ct : cs) w += oracle::inside_even_odd({double(c), double(r)}, ct.points)
                                             ? (ct.is_shape() ? 1 : -1)
                                             : 0;
          EXPECT_EQ(w, m(c, r) ? 1 : 0);
        }
    }
  }
}
