#include <gtest/gtest.h>

#include <cmath>

#include "routepack/offset.hpp"

namespace routepack {
namespace {

Polyline arc(Vec2 c, double r, double a0, double a1, int n) {
  Polyline out;
  for (int i = 0; i <= n; ++i) {
    const double a = a0 + (a1 - a0) * i / n;
    out.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return out;
}

Polyline wave() {
  Polyline out;
  for (int i = 0; i <= 200; ++i) {
    const double x = 10.0 + 2.0 * i;
    out.push_back({x, 200.0 + 30.0 * std::sin(x / 40.0)});
  }
  return out;
}

TEST(OffsetPolyline, StraightSegment) {
  const Polyline line = {{0.0, 0.0}, {100.0, 0.0}};
  const OffsetResult r = offset_polyline(line, 5.0);
  ASSERT_EQ(r.points.size(), 2u);
  // Left of eastward travel is up on screen.
  EXPECT_NEAR(r.points[0].y, -5.0, 1e-12);
  EXPECT_NEAR(r.points[1].y, -5.0, 1e-12);
  EXPECT_NEAR(r.points[1].x, 100.0, 1e-12);
  EXPECT_FALSE(r.degenerate_turn);
}

TEST(OffsetPolyline, ZeroIsIdentity) {
  const Polyline line = wave();
  EXPECT_EQ(offset_polyline(line, 0.0).points, line);
}

TEST(OffsetPolyline, RightAngleGetsQuarterArc) {
  const Polyline line = {{0.0, 0.0}, {100.0, 0.0}, {100.0, 100.0}};
  const OffsetResult r = offset_polyline(line, 5.0);
  int on_arc = 0;
  for (const Vec2& p : r.points) {
    if (p.x > 100.0 && p.y < 0.0) {
      EXPECT_NEAR(distance(p, {100.0, 0.0}), 5.0, 1e-9);
      ++on_arc;
    }
  }
  EXPECT_GE(on_arc, 2);
  const double h = hausdorff_distance(r.points, line);
  EXPECT_GE(h, 5.0 - 1e-9);
  EXPECT_LE(h, 5.5);
}

TEST(OffsetPolyline, InnerCornerIsTrimmed) {
  const Polyline line = {{0.0, 0.0}, {100.0, 0.0}, {100.0, 100.0}};
  const OffsetResult r = offset_polyline(line, -5.0);
  ASSERT_EQ(r.points.size(), 3u);
  EXPECT_NEAR(r.points[1].x, 95.0, 1e-9);
  EXPECT_NEAR(r.points[1].y, 5.0, 1e-9);
  EXPECT_FALSE(r.degenerate_turn);
}

TEST(OffsetPolyline, SmoothCurvesStayWithinHalfPixel) {
  const std::vector<Polyline> fixtures = {arc({300.0, 300.0}, 120.0, 0.2, 2.9, 90), wave(),
                                          arc({300.0, 300.0}, 60.0, -1.0, 1.5, 60)};
  for (const Polyline& line : fixtures) {
    for (double d : {-8.0, -3.0, 3.0, 8.0}) {
      const OffsetResult r = offset_polyline(line, d);
      const double h = hausdorff_distance(r.points, line);
      EXPECT_GE(h, std::abs(d) - 1e-6) << d;
      EXPECT_LE(h, std::abs(d) + 0.5) << d;
      EXPECT_FALSE(r.degenerate_turn);
    }
  }
}

TEST(OffsetPolyline, MirrorSymmetryOnStraightLines) {
  const Polyline line = {{10.0, 20.0}, {70.0, 65.0}};
  const Vec2 u = normalized(line[1] - line[0]);
  for (double d : {1.0, 4.5, 12.0}) {
    const OffsetResult plus = offset_polyline(line, d);
    const OffsetResult minus = offset_polyline(line, -d);
    ASSERT_EQ(plus.points.size(), minus.points.size());
    for (std::size_t i = 0; i < plus.points.size(); ++i) {
      // Reflect across the source line.
      const Vec2 v = plus.points[i] - line[0];
      const Vec2 along = u * dot(v, u);
      const Vec2 mirrored = line[0] + along * 2.0 - v;
      EXPECT_NEAR(mirrored.x, minus.points[i].x, 1e-9);
      EXPECT_NEAR(mirrored.y, minus.points[i].y, 1e-9);
    }
  }
}

TEST(OffsetPolyline, TightUTurnIsFlagged) {
  const Polyline line = {{0.0, 0.0}, {100.0, 0.0}, {100.0, 4.0}, {0.0, 4.0}};
  const OffsetResult r = offset_polyline(line, -6.0);
  EXPECT_TRUE(r.degenerate_turn);
}

TEST(OffsetPolyline, SourceArcLengthIsMonotone) {
  const Polyline line = wave();
  const OffsetResult r = offset_polyline(line, 6.0);
  ASSERT_EQ(r.points.size(), r.source_s.size());
  for (std::size_t i = 1; i < r.source_s.size(); ++i) EXPECT_GE(r.source_s[i], r.source_s[i - 1]);
  EXPECT_NEAR(r.source_s.back(), polyline_length(line), 1e-9);
}

TEST(OffsetPolyline, ConstantPerVertexOffsetsMatch) {
  const Polyline line = arc({0.0, 0.0}, 80.0, 0.0, 2.0, 40);
  const std::vector<double> ds(line.size(), 4.0);
  const OffsetResult a = offset_polyline(line, 4.0);
  const OffsetResult b = offset_polyline(line, ds);
  EXPECT_LT(hausdorff_distance(a.points, b.points), 0.05);
}

TEST(OffsetPolyline, RampedOffsetEndsAtBothValues) {
  const Polyline line = {{0.0, 0.0}, {50.0, 0.0}, {100.0, 0.0}};
  const OffsetResult r = offset_polyline(line, std::vector<double>{0.0, 0.0, 10.0});
  EXPECT_NEAR(r.points.front().y, 0.0, 1e-12);
  EXPECT_NEAR(r.points.back().y, -10.0, 1e-12);
}

}  // namespace
}  // namespace routepack
