#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "routepack/raster.hpp"

namespace routepack {
namespace {

// Horizontal segment through cell centers of row 50.
const Polyline kMidLine = {{20.5, 50.5}, {120.5, 50.5}};

TEST(LineKernel, GaussianTruncatedAtThreeBandwidths) {
  EXPECT_DOUBLE_EQ(line_kernel(0.0, 4.0), 1.0);
  EXPECT_NEAR(line_kernel(4.0, 4.0), std::exp(-0.5), 1e-15);
  EXPECT_GT(line_kernel(12.0, 4.0), 0.0);
  EXPECT_EQ(line_kernel(12.01, 4.0), 0.0);
}

TEST(RasterizeKde, PeakOnLineAndSymmetricFalloff) {
  const DensityGrid g = rasterize_kde(std::vector<Polyline>{kMidLine}, 4.0, 141, 101);
  EXPECT_DOUBLE_EQ(g.max(), g.at(70, 50));
  for (int d = 1; d <= 14; ++d) {
    EXPECT_DOUBLE_EQ(g.at(70, 50 - d), g.at(70, 50 + d)) << d;
    if (d <= 12) EXPECT_LT(g.at(70, 50 + d), g.at(70, 50 + d - 1));
  }
  EXPECT_EQ(g.at(70, 63), 0.0);
}

TEST(RasterizeKde, CoincidentSegmentsDouble) {
  const DensityGrid one = rasterize_kde(std::vector<Polyline>{kMidLine}, 4.0, 141, 101);
  const DensityGrid two = rasterize_kde(std::vector<Polyline>{kMidLine, kMidLine}, 4.0, 141, 101);
  for (std::size_t i = 0; i < one.cells().size(); ++i) ASSERT_DOUBLE_EQ(two.cells()[i], 2.0 * one.cells()[i]);
}

TEST(RasterizeKde, ProfileAtOneBandwidth) {
  const DensityGrid g = rasterize_kde(std::vector<Polyline>{kMidLine}, 4.0, 141, 101);
  EXPECT_NEAR(g.at(70, 54) / g.at(70, 50), std::exp(-0.5), 0.01 * std::exp(-0.5));
}

TEST(RasterizeKde, EmptyInputIsZero) {
  const DensityGrid g = rasterize_kde(std::vector<Polyline>{}, 4.0, 30, 20);
  EXPECT_EQ(g.max(), 0.0);
}

TEST(RasterizeKde, Linearity) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 90.0);
  std::vector<Polyline> a, b;
  for (int i = 0; i < 4; ++i) {
    a.push_back({{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}});
    b.push_back({{u(rng), u(rng)}, {u(rng), u(rng)}});
  }
  std::vector<Polyline> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const DensityGrid ga = rasterize_kde(a, 3.0, 90, 90);
  const DensityGrid gb = rasterize_kde(b, 3.0, 90, 90);
  const DensityGrid gab = rasterize_kde(ab, 3.0, 90, 90);
  for (std::size_t i = 0; i < gab.cells().size(); ++i) {
    ASSERT_NEAR(gab.cells()[i], ga.cells()[i] + gb.cells()[i], 1e-9);
  }
}

TEST(Binarize, ZeroGridIsClear) {
  EXPECT_EQ(binarize(DensityGrid(20, 10), 0.1).count(), 0u);
}

TEST(Binarize, BandWidthAtOneTenth) {
  const DensityGrid g = rasterize_kde(std::vector<Polyline>{kMidLine}, 4.0, 141, 101);
  const BinaryImage img = binarize(g, 0.1);
  int rows = 0;
  for (int y = 0; y < 101; ++y) rows += img.get(70, y) ? 1 : 0;
  const double expected = 2.0 * 4.0 * std::sqrt(2.0 * std::log(10.0));
  EXPECT_NEAR(rows, expected, 1.0);
  EXPECT_NEAR(2.0 * band_half_width(4.0, 0.1), expected, 1e-12);
  EXPECT_EQ(count_components(img), 1);
}

TEST(Binarize, FullFractionKeepsOnlyPeakCells) {
  const DensityGrid g = rasterize_kde(std::vector<Polyline>{kMidLine}, 4.0, 141, 101);
  const BinaryImage img = binarize(g, 1.0);
  for (const Pixel& p : img.pixels()) EXPECT_EQ(p.y, 50);
  EXPECT_EQ(img.count(), 101u);
}

TEST(Images, DebugDumpsHaveHeaders) {
  DensityGrid g(3, 2);
  g.at(1, 1) = 2.0;
  EXPECT_EQ(to_pgm(g).rfind("P2\n3 2\n", 0), 0u);
  BinaryImage b(3, 2);
  b.set(0, 0);
  EXPECT_EQ(to_pbm(b).rfind("P1\n3 2\n", 0), 0u);
}

TEST(Images, ComponentsAreEightConnected) {
  BinaryImage b(5, 5);
  b.set(0, 0);
  b.set(1, 1);
  b.set(4, 4);
  EXPECT_EQ(count_components(b), 2);
}

}  // namespace
}  // namespace routepack
