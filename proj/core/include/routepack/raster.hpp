#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "routepack/geometry.hpp"
#include "routepack/network.hpp"

namespace routepack {

struct Pixel {
  int x = 0;
  int y = 0;
  auto operator<=>(const Pixel&) const = default;
  Vec2 center() const { return {x + 0.5, y + 0.5}; }
};

/// Line density on a 1 px grid.
class DensityGrid {
 public:
  DensityGrid() = default;
  DensityGrid(int width, int height) : width_(width), height_(height), cells_(std::size_t(width) * height, 0.0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  double at(int x, int y) const { return cells_[index(x, y)]; }
  double& at(int x, int y) { return cells_[index(x, y)]; }
  std::span<const double> cells() const { return cells_; }
  double max() const;

 private:
  std::size_t index(int x, int y) const { return std::size_t(y) * width_ + x; }
  int width_ = 0;
  int height_ = 0;
  std::vector<double> cells_;
};

class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(int width, int height) : width_(width), height_(height), bits_(std::size_t(width) * height, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  // Out-of-bounds reads as clear.
  bool get(int x, int y) const { return in_bounds(x, y) && bits_[index(x, y)] != 0; }
  bool get(Pixel p) const { return get(p.x, p.y); }
  void set(int x, int y, bool v = true) { bits_[index(x, y)] = v ? 1 : 0; }
  void set(Pixel p, bool v = true) { set(p.x, p.y, v); }
  std::size_t count() const;
  std::vector<Pixel> pixels() const;

  bool operator==(const BinaryImage&) const = default;

 private:
  std::size_t index(int x, int y) const { return std::size_t(y) * width_ + x; }
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Density contributed by a single line at distance 0 from it.
inline constexpr double kPeakLineDensity = 1.0;
/// Kernel support in multiples of the bandwidth.
inline constexpr double kKernelTruncation = 3.0;

/// Truncated Gaussian line kernel: exp(-d^2 / 2h^2) for d <= 3h, else 0.
double line_kernel(double distance_px, double bandwidth);

/// Sum over polylines of the line kernel of the distance from each cell
/// center to the polyline. Rows are filled independently, so the result is
/// identical regardless of threading.
DensityGrid rasterize_kde(std::span<const Polyline> polylines, double bandwidth, int width, int height);
DensityGrid rasterize_kde(std::span<const Polyline> polylines, double bandwidth, const Viewport& vp);

/// Sets cells whose density is at least fraction * kPeakLineDensity.
BinaryImage binarize(const DensityGrid& grid, double fraction);

/// Distance from a line at which its kernel falls to `fraction` of the peak,
/// i.e. half the width of a binarized single-line band.
double band_half_width(double bandwidth, double fraction);

/// Number of 8-connected components of set pixels.
int count_components(const BinaryImage& img);

std::string to_pgm(const DensityGrid& grid);
std::string to_pbm(const BinaryImage& img);

}  // namespace routepack
