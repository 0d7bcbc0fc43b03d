#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <contourforge/isofield.hpp>

#include "oracles.hpp"

using namespace contourforge;

namespace {

// Hot pixel (133) at the origin next to a cold one (0), on a 3x1 strip padded
// so the shared edge is interior.
Grid hot_cold_row() { return Grid(3, 1, {133, 0, 0}); }

const RangeVector* range_between(const std::vector<RangeVector>& rs, PixelCoord hot, PixelCoord cold) {
  for (const auto& r : rs)
    if (!r.pinned && r.hot == hot && r.cold == cold) return &r;
  return nullptr;
}

}  // namespace

TEST(RangeVectors, InteriorEdgeAndPinnedBorder) {
  const Grid g = hot_cold_row();
  const auto cs = extract_contours(threshold_select(g, 100, 255), TurnPolicy::left());
  ASSERT_EQ(cs.size(), 1u);
  const auto rs = build_range_vectors(cs[0], g);
  ASSERT_EQ(rs.size(), 4u);
  const RangeVector* r = range_between(rs, {0, 0}, {1, 0});
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->hi, 133);
  EXPECT_EQ(r->lo, 0);
  EXPECT_EQ(r->origin, (Point{0, 0}));
  EXPECT_EQ(r->endpoint, (Point{1, 0}));
  int pinned = 0;
  for (const auto& x : rs) pinned += x.pinned;
  EXPECT_EQ(pinned, 3);
}

TEST(RangeVectors, UniformGridIsAllPinnedPlateau) {
  const Grid g(3, 2, std::vector<double>(6, 42.0));
  const auto cs = extract_contours(threshold_select(g, 42, 42), TurnPolicy::left());
  ASSERT_EQ(cs.size(), 1u);
  for (const auto& r : build_range_vectors(cs[0], g)) {
    EXPECT_TRUE(r.pinned);
    EXPECT_EQ(r.hi, r.lo);
  }
}

TEST(RangeVectors, MismatchedContour) {
  Contour c;
  c.points = {{0, 0}};
  EXPECT_THROW(build_range_vectors(c, hot_cold_row()), Error);
  c.sources = {{{5, 5}, {6, 5}, true}};
  EXPECT_THROW(build_range_vectors(c, hot_cold_row()), Error);
}

TEST(Displace, HotColdPairParameter) {
  const Grid g = hot_cold_row();
  const auto cs = extract_contours(threshold_select(g, 100, 255), TurnPolicy::left());
  const auto rs = build_range_vectors(cs[0], g);
  const Contour iso = displace_to_iso(cs[0], rs, 100);
  bool found = false;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (rs[i].pinned) {
      EXPECT_EQ(iso.points[i], cs[0].points[i]);
      continue;
    }
    found = true;
    EXPECT_NEAR(iso.points[i].x, 33.0 / 133.0, 1e-12);
    EXPECT_EQ(iso.points[i].y, 0.0);
    EXPECT_LT(iso.points[i].x, 0.5);  // closer to the 133 pixel
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(iso.kind, ContourKind::Iso);
}

TEST(Displace, PlateauAndEndpointCases) {
  RangeVector r{{0, 0}, {1, 0}, 50, 50, {0, 0}, {1, 0}, false};
  EXPECT_EQ(iso_parameter(r, 50), 0.5);
  r.lo = 10;
  EXPECT_EQ(iso_parameter(r, 50), 0.0);
  EXPECT_EQ(iso_parameter(r, 10), 1.0);
}

TEST(Displace, OutOfRangeReportsIndex) {
  const Grid g = hot_cold_row();
  const auto cs = extract_contours(threshold_select(g, 100, 255), TurnPolicy::left());
  const auto rs = build_range_vectors(cs[0], g);
  try {
    displace_to_iso(cs[0], rs, 140);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IsovalueOutOfRange);
    EXPECT_NE(std::string(e.what()).find("at point"), std::string::npos);
  }
}

TEST(ToBptc, MovesToHotCenters) {
  const Grid g(4, 4, {0, 0,   0,   0,  //
                      0, 200, 180, 0,  //
                      0, 190, 0,   0,  //
                      0, 0,   0,   0});
  const auto cs = extract_contours(threshold_select(g, 100, 255), TurnPolicy::left());
  ASSERT_EQ(cs.size(), 1u);
  const Contour b = to_bptc_via_ranges(cs[0], build_range_vectors(cs[0], g));
  for (const Point& p : b.points) EXPECT_GE(g.value(int(p.x), int(p.y)), 100);

  SelectionMask one(3, 3);
  one.set(1, 1);
  const Grid flat(3, 3, {0, 0, 0, 0, 9, 0, 0, 0, 0});
  const auto single = extract_contours(one, TurnPolicy::left());
  EXPECT_TRUE(fully_degenerate(to_bptc_via_ranges(single[0], build_range_vectors(single[0], flat))));

  const Grid border_only(1, 1, {5});
  const auto pinned = extract_contours(threshold_select(border_only, 0, 9), TurnPolicy::left());
  const Contour same = to_bptc_via_ranges(pinned[0], build_range_vectors(pinned[0], border_only));
  EXPECT_EQ(same.points, pinned[0].points);
}

TEST(SampleFields, LinearInterpolation) {
  Grid g(2, 1, {10, 0});
  g.add_aux_field("u", {0, 8});
  const RangeVector r{{0, 0}, {1, 0}, 10, 0, {0, 0}, {1, 0}, false};
  EXPECT_EQ(sample_fields({0, 0}, r, g)[0], 0.0);
  EXPECT_EQ(sample_fields({1, 0}, r, g)[0], 8.0);
  EXPECT_EQ(sample_fields({0.25, 0}, r, g)[0], 2.0);
  EXPECT_EQ(sample_fields_at(r, 0.25, g)[0], 2.0);
}

TEST(IsoProperties, ExactnessContainmentMonotonicity) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> gray(0, 255);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 2 + trial % 9, h = 2 + (trial * 7) % 9;
    std::vector<double> v(static_cast<std::size_t>(w) * h);
    for (auto& x : v) x = gray(rng);
    const Grid g(w, h, v);
    const double iso = 1 + gray(rng) % 254 + 0.37;
    const auto cs = extract_contours(threshold_select(g, iso, 1e300), TurnPolicy::left());
    for (const auto& c : cs) {
      const auto rs = build_range_vectors(c, g);
      const Contour out = displace_to_iso(c, rs, iso);
      for (std::size_t i = 0; i < rs.size(); ++i) {
        if (rs[i].pinned) continue;
        const Point p = out.points[i];
        // Independent re-interpolation from the raw pixel values.
        const PixelCoord hot = rs[i].hot, cold = rs[i].cold;
        const double s = std::hypot(p.x - hot.col, p.y - hot.row);
        const double vh = g.value(hot), vc = g.value(cold);
        EXPECT_NEAR(vh + s * (vc - vh), iso, 1e-9 * std::abs(iso));
        EXPECT_LE(oracle::seg_dist(p, pixel_center(hot), pixel_center(cold)), 1e-12);
        // Raising the isovalue never moves the point away from the hot center.
        const double iso2 = std::min(rs[i].hi, iso + 5.0);
        EXPECT_LE(iso_parameter(rs[i], iso2), iso_parameter(rs[i], iso));
      }
    }
  }
}

TEST(IsoContours, ConvenienceMatchesManualPipeline) {
  const Grid g(3, 3, {0, 50, 0, 60, 255, 90, 0, 120, 0});
  const auto cs = extract_isocontours(g, 100, TurnPolicy::left());
  const auto manual = extract_contours(threshold_select(g, 100, 1e300), TurnPolicy::left());
  ASSERT_EQ(cs.size(), 1u);
  ASSERT_EQ(manual.size(), 1u);
  EXPECT_EQ(cs[0].points, displace_to_iso(manual[0], build_range_vectors(manual[0], g), 100).points);
  // Between 255 and 90 the isovalue 100 sits close to the darker center.
  bool toward_east = false;
  for (const Point& p : cs[0].points)
    if (p.y == 1 && p.x > 1) {
      toward_east = true;
      EXPECT_NEAR(p.x, 1 + 155.0 / 165.0, 1e-12);
    }
  EXPECT_TRUE(toward_east);
}
