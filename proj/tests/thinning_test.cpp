#include <gtest/gtest.h>

#include "routepack/skeleton.hpp"
#include "test_support.hpp"

namespace routepack {
namespace {

bool has_full_2x2(const BinaryImage& img) {
  for (int y = 0; y + 1 < img.height(); ++y) {
    for (int x = 0; x + 1 < img.width(); ++x) {
      if (img.get(x, y) && img.get(x + 1, y) && img.get(x, y + 1) && img.get(x + 1, y + 1)) return true;
    }
  }
  return false;
}

TEST(Thin, SinglePixelUnchanged) {
  BinaryImage img(5, 5);
  img.set(2, 2);
  EXPECT_EQ(thin(img), img);
}

TEST(Thin, OnePixelLineUnchanged) {
  BinaryImage img(30, 5);
  for (int x = 3; x < 27; ++x) img.set(x, 2);
  EXPECT_EQ(thin(img), img);
}

TEST(Thin, RectangleBecomesCenterline) {
  BinaryImage img(30, 15);
  for (int y = 5; y < 10; ++y) {
    for (int x = 5; x < 25; ++x) img.set(x, y);
  }
  const BinaryImage sk = thin(img);
  int min_x = 100, max_x = -1;
  for (const Pixel& p : sk.pixels()) {
    EXPECT_EQ(p.y, 7);
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
  }
  EXPECT_NEAR(max_x - min_x + 1, 18, 2);
  EXPECT_EQ(count_components(sk), 1);
}

TEST(Thin, DiagonalStairKeepsItsEnds) {
  // Two pixels thick 45 degree band: the skeleton should still span it.
  BinaryImage img(40, 40);
  for (int i = 5; i < 35; ++i) {
    img.set(i, i);
    img.set(i + 1, i);
  }
  const BinaryImage sk = thin(img);
  int lo = 100, hi = -1;
  for (const Pixel& p : sk.pixels()) {
    lo = std::min(lo, p.y);
    hi = std::max(hi, p.y);
  }
  EXPECT_LE(lo, 6);
  EXPECT_GE(hi, 33);
}

TEST(Thin, RandomBlobs) {
  for (unsigned seed = 1; seed <= 50; ++seed) {
    const BinaryImage img = test::random_blob(seed);
    const BinaryImage sk = thin(img);
    EXPECT_EQ(thin(sk), sk) << "seed " << seed;
    EXPECT_EQ(count_components(sk), count_components(img)) << "seed " << seed;
    EXPECT_FALSE(has_full_2x2(sk)) << "seed " << seed;
    for (const Pixel& p : sk.pixels()) ASSERT_TRUE(img.get(p)) << "seed " << seed;
  }
}

TEST(CrossingNumber, TJunctionAndEnds) {
  const BinaryImage t = test::t_junction();
  EXPECT_EQ(crossing_number(t, {10, 10}), 3);
  EXPECT_EQ(crossing_number(t, {2, 10}), 1);
  EXPECT_EQ(crossing_number(t, {18, 10}), 1);
  EXPECT_EQ(crossing_number(t, {10, 18}), 1);
  EXPECT_EQ(crossing_number(t, {5, 10}), 2);
  EXPECT_EQ(crossing_number(t, {10, 14}), 2);
}

TEST(DetectBifurcations, TJunction) {
  // Row-major order.
  const BifurcationSet b = detect_bifurcations(test::t_junction());
  EXPECT_EQ(b.bifurcations, (std::vector<Pixel>{{10, 10}}));
  EXPECT_EQ(b.endpoints, (std::vector<Pixel>{{2, 10}, {18, 10}, {10, 18}}));
}

TEST(DetectBifurcations, CrossHasOneFourWayPixel) {
  BinaryImage img(21, 21);
  for (int i = 2; i <= 18; ++i) {
    img.set(i, 10);
    img.set(10, i);
  }
  EXPECT_EQ(crossing_number(img, {10, 10}), 4);
  const BifurcationSet b = detect_bifurcations(img);
  EXPECT_EQ(b.bifurcations, (std::vector<Pixel>{{10, 10}}));
  EXPECT_EQ(b.endpoints.size(), 4u);
}

}  // namespace
}  // namespace routepack
