#include "routepack/offset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace routepack {

namespace {

Vec2 rotate(Vec2 v, double radians) {
  const double c = std::cos(radians), s = std::sin(radians);
  return {v.x * c - v.y * s, v.x * s + v.y * c};
}

// Signed angle (math orientation in screen coordinates) from a to b.
double signed_angle(Vec2 a, Vec2 b) { return std::atan2(cross(a, b), dot(a, b)); }

struct Raw {
  Polyline pts;
  std::vector<double> s;
  void push(Vec2 p, double src) {
    if (!pts.empty() && distance(pts.back(), p) < 1e-12) {
      s.back() = std::max(s.back(), src);
      return;
    }
    pts.push_back(p);
    s.push_back(src);
  }
};

// Net turning (radians) of the source line at or beyond which a trimmed loop
// counts as a degenerate turn rather than an ordinary inner corner.
constexpr double kDegenerateTurn = 150.0 * kPi / 180.0;

// Removes loops formed where the raw offset curve crosses itself within a
// short stretch of source arc length. `turns[k]` is the signed turn at source
// vertex k.
bool trim_loops(Raw& raw, std::span<const double> source_vertices, std::span<const double> turns, double window,
                Vec2* where) {
  bool degenerate = false;
  std::size_t i = 0;
  while (i + 3 < raw.pts.size()) {
    bool cut = false;
    // Farthest intersecting segment within the window.
    std::size_t hi = i + 2;
    while (hi + 2 < raw.pts.size() && raw.s[hi + 1] - raw.s[i + 1] <= window) ++hi;
    for (std::size_t j = hi; j >= i + 2; --j) {
      Vec2 x;
      if (!segments_intersect(raw.pts[i], raw.pts[i + 1], raw.pts[j], raw.pts[j + 1], &x)) continue;
      // Touching at the shared endpoint of adjacent pieces is not a loop.
      if (j == i + 2 && distance(x, raw.pts[i + 1]) < 1e-12 && distance(x, raw.pts[j]) < 1e-12) continue;
      const double seg_len = distance(raw.pts[i], raw.pts[i + 1]);
      const double t = seg_len > 0.0 ? distance(raw.pts[i], x) / seg_len : 0.0;
      const double sx = raw.s[i] + (raw.s[i + 1] - raw.s[i]) * t;
      const double removed_lo = sx;
      const double removed_hi = raw.s[j];
      // Net turn of the source vertices inside the removed stretch.
      const auto lo = std::lower_bound(source_vertices.begin(), source_vertices.end(), removed_lo - 1e-9);
      const auto hi_it = std::upper_bound(source_vertices.begin(), source_vertices.end(), removed_hi + 1e-9);
      double net = 0.0;
      for (auto it = lo; it < hi_it; ++it) net += turns[static_cast<std::size_t>(it - source_vertices.begin())];
      if (std::abs(net) >= kDegenerateTurn && !degenerate) {
        degenerate = true;
        *where = x;
      }
      raw.pts.erase(raw.pts.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                    raw.pts.begin() + static_cast<std::ptrdiff_t>(j) + 1);
      raw.s.erase(raw.s.begin() + static_cast<std::ptrdiff_t>(i) + 1, raw.s.begin() + static_cast<std::ptrdiff_t>(j) + 1);
      raw.pts.insert(raw.pts.begin() + static_cast<std::ptrdiff_t>(i) + 1, x);
      raw.s.insert(raw.s.begin() + static_cast<std::ptrdiff_t>(i) + 1, sx);
      cut = true;
      break;
    }
    if (!cut) ++i;
  }
  return degenerate;
}

}  // namespace

OffsetResult offset_polyline(std::span<const Vec2> line, double d, double chord_error) {
  std::vector<double> offsets(line.size(), d);
  return offset_polyline(line, offsets, chord_error);
}

OffsetResult offset_polyline(std::span<const Vec2> input, std::span<const double> input_offsets,
                             double chord_error) {
  if (input.size() != input_offsets.size()) throw std::invalid_argument("offset count must match point count");
  // Drop repeated points, keeping offsets aligned.
  Polyline line;
  std::vector<double> d;
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (!line.empty() && distance(line.back(), input[i]) <= 1e-9) continue;
    line.push_back(input[i]);
    d.push_back(input_offsets[i]);
  }
  OffsetResult result;
  if (line.size() < 2) {
    if (!line.empty()) {
      result.points = line;
      result.source_s = {0.0};
    }
    return result;
  }

  const std::vector<double> s = arc_lengths(line);
  const std::size_t n = line.size();
  std::vector<Vec2> dir(n - 1), nrm(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    dir[i] = normalized(line[i + 1] - line[i]);
    nrm[i] = left_normal(dir[i]);
  }

  Raw raw;
  raw.push(line[0] + nrm[0] * d[0], s[0]);
  double max_abs = 0.0;
  for (double v : d) max_abs = std::max(max_abs, std::abs(v));

  for (std::size_t i = 0; i + 1 < n; ++i) {
    raw.push(line[i + 1] + nrm[i] * d[i + 1], s[i + 1]);
    if (i + 2 >= n) break;
    const double dv = d[i + 1];
    const Vec2 p = line[i + 1];
    const double turn = cross(dir[i], dir[i + 1]);
    const bool reversal = std::abs(turn) < 1e-12 && dot(dir[i], dir[i + 1]) < 0.0;
    const bool outer = dv * turn > 0.0 || (reversal && dv != 0.0);
    if (outer && std::abs(dv) > 0.0) {
      const Vec2 v0 = nrm[i] * dv;
      double sweep = signed_angle(nrm[i], nrm[i + 1]);
      if (reversal) {
        // Half circle around the far side of the turning point.
        sweep = dot(rotate(v0, kPi / 2.0), dir[i]) > 0.0 ? kPi : -kPi;
      }
      const double r = std::abs(dv);
      const double step = chord_error < r ? 2.0 * std::acos(1.0 - chord_error / r) : kPi / 2.0;
      const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(sweep) / step)));
      for (int k = 1; k < pieces; ++k) raw.push(p + rotate(v0, sweep * k / pieces), s[i + 1]);
    }
    raw.push(p + nrm[i + 1] * dv, s[i + 1]);
  }

  std::vector<double> turns(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) turns[i] = signed_angle(dir[i - 1], dir[i]);
  result.degenerate_turn = trim_loops(raw, s, turns, 4.0 * max_abs + 1.0, &result.degenerate_at);
  // Running max keeps source arc length monotone after trimming.
  for (std::size_t k = 1; k < raw.s.size(); ++k) raw.s[k] = std::max(raw.s[k], raw.s[k - 1]);
  result.points = std::move(raw.pts);
  result.source_s = std::move(raw.s);
  return result;
}

}  // namespace routepack
