#include "routepack/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace routepack {

double DensityGrid::max() const {
  double m = 0.0;
  for (double c : cells_) m = std::max(m, c);
  return m;
}

std::size_t BinaryImage::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<Pixel> BinaryImage::pixels() const {
  std::vector<Pixel> out;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (bits_[index(x, y)]) out.push_back({x, y});
    }
  }
  return out;
}

double line_kernel(double distance_px, double bandwidth) {
  if (distance_px > kKernelTruncation * bandwidth) return 0.0;
  return std::exp(-(distance_px * distance_px) / (2.0 * bandwidth * bandwidth));
}

DensityGrid rasterize_kde(std::span<const Polyline> polylines, double bandwidth, int width, int height) {
  if (!(bandwidth > 0.0)) throw Error("KDE bandwidth must be positive");
  DensityGrid grid(width, height);
  const double reach = kKernelTruncation * bandwidth;
  std::vector<double> nearest;

  for (const Polyline& line : polylines) {
    if (line.empty()) continue;
    // Bounding box of the kernel support, clamped to the grid.
    double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
    double max_x = -min_x, max_y = -min_x;
    for (const Vec2& p : line) {
      min_x = std::min(min_x, p.x);
      min_y = std::min(min_y, p.y);
      max_x = std::max(max_x, p.x);
      max_y = std::max(max_y, p.y);
    }
    const int x0 = std::max(0, static_cast<int>(std::floor(min_x - reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(min_y - reach)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(max_x + reach)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(max_y + reach)));
    if (x0 > x1 || y0 > y1) continue;
    const int bw = x1 - x0 + 1;
    nearest.assign(std::size_t(bw) * (y1 - y0 + 1), std::numeric_limits<double>::infinity());

    // Exact point-to-segment distance, visiting only cells near each segment.
    auto visit = [&](Vec2 a, Vec2 b) {
      const int sx0 = std::max(x0, static_cast<int>(std::floor(std::min(a.x, b.x) - reach)));
      const int sy0 = std::max(y0, static_cast<int>(std::floor(std::min(a.y, b.y) - reach)));
      const int sx1 = std::min(x1, static_cast<int>(std::ceil(std::max(a.x, b.x) + reach)));
      const int sy1 = std::min(y1, static_cast<int>(std::ceil(std::max(a.y, b.y) + reach)));
      for (int y = sy0; y <= sy1; ++y) {
        for (int x = sx0; x <= sx1; ++x) {
          double& d = nearest[std::size_t(y - y0) * bw + (x - x0)];
          d = std::min(d, point_segment_distance({x + 0.5, y + 0.5}, a, b));
        }
      }
    };
    if (line.size() == 1) {
      visit(line.front(), line.front());
    } else {
      for (std::size_t i = 0; i + 1 < line.size(); ++i) visit(line[i], line[i + 1]);
    }

    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double d = nearest[std::size_t(y - y0) * bw + (x - x0)];
        if (d <= reach) grid.at(x, y) += line_kernel(d, bandwidth);
      }
    }
  }
  return grid;
}

DensityGrid rasterize_kde(std::span<const Polyline> polylines, double bandwidth, const Viewport& vp) {
  return rasterize_kde(polylines, bandwidth, vp.width, vp.height);
}

BinaryImage binarize(const DensityGrid& grid, double fraction) {
  BinaryImage img(grid.width(), grid.height());
  const double threshold = fraction * kPeakLineDensity;
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      const double v = grid.at(x, y);
      if (v > 0.0 && v >= threshold) img.set(x, y);
    }
  }
  return img;
}

double band_half_width(double bandwidth, double fraction) {
  return bandwidth * std::sqrt(2.0 * std::log(1.0 / fraction));
}

int count_components(const BinaryImage& img) {
  BinaryImage seen(img.width(), img.height());
  int components = 0;
  std::vector<Pixel> stack;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!img.get(x, y) || seen.get(x, y)) continue;
      ++components;
      stack.push_back({x, y});
      seen.set(x, y);
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx, ny = p.y + dy;
            if (img.get(nx, ny) && !seen.get(nx, ny)) {
              seen.set(nx, ny);
              stack.push_back({nx, ny});
            }
          }
        }
      }
    }
  }
  return components;
}

std::string to_pgm(const DensityGrid& grid) {
  std::string out = "P2\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) + "\n255\n";
  const double peak = grid.max();
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      const int v = peak > 0.0 ? static_cast<int>(std::lround(255.0 * grid.at(x, y) / peak)) : 0;
      out += std::to_string(v);
      out += x + 1 == grid.width() ? '\n' : ' ';
    }
  }
  return out;
}

std::string to_pbm(const BinaryImage& img) {
  std::string out = "P1\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n";
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out += img.get(x, y) ? '1' : '0';
      out += x + 1 == img.width() ? '\n' : ' ';
    }
  }
  return out;
}

}  // namespace routepack
