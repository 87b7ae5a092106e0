#include "routepack/geometry.hpp"

#include <algorithm>
#include <limits>

namespace routepack {

Vec2 normalized(Vec2 a) {
  const double n = norm(a);
  if (n == 0.0) return {0.0, 0.0};
  return a / n;
}

double screen_angle_deg(Vec2 v) { return std::atan2(-v.y, v.x) * 180.0 / kPi; }

double normalize_angle_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r <= -180.0) r += 360.0;
  if (r > 180.0) r -= 360.0;
  return r;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

double point_polyline_distance(Vec2 p, std::span<const Vec2> line) {
  if (line.empty()) return std::numeric_limits<double>::infinity();
  if (line.size() == 1) return distance(p, line.front());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    best = std::min(best, point_segment_distance(p, line[i], line[i + 1]));
  }
  return best;
}

double polyline_length(std::span<const Vec2> line) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) total += distance(line[i], line[i + 1]);
  return total;
}

std::vector<double> arc_lengths(std::span<const Vec2> line) {
  std::vector<double> s(line.size(), 0.0);
  for (std::size_t i = 1; i < line.size(); ++i) s[i] = s[i - 1] + distance(line[i - 1], line[i]);
  return s;
}

namespace {

std::size_t segment_index(std::span<const double> cumulative, double s) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
  std::size_t i = it == cumulative.begin() ? 0 : static_cast<std::size_t>(it - cumulative.begin()) - 1;
  return std::min(i, cumulative.size() - 2);
}

}  // namespace

Vec2 point_at(std::span<const Vec2> line, std::span<const double> cumulative, double s) {
  if (line.size() == 1) return line.front();
  s = std::clamp(s, 0.0, cumulative.back());
  const std::size_t i = segment_index(cumulative, s);
  const double len = cumulative[i + 1] - cumulative[i];
  const double t = len > 0.0 ? (s - cumulative[i]) / len : 0.0;
  return line[i] + (line[i + 1] - line[i]) * t;
}

Vec2 tangent_at(std::span<const Vec2> line, std::span<const double> cumulative, double s) {
  if (line.size() < 2) return {1.0, 0.0};
  s = std::clamp(s, 0.0, cumulative.back());
  std::size_t i = segment_index(cumulative, s);
  // Skip zero-length segments.
  while (i + 2 < line.size() && distance(line[i], line[i + 1]) == 0.0) ++i;
  return normalized(line[i + 1] - line[i]);
}

namespace {

void douglas_peucker(std::span<const Vec2> line, std::size_t first, std::size_t last, double tol,
                     std::vector<bool>& keep) {
  if (last <= first + 1) return;
  double worst = -1.0;
  std::size_t idx = first;
  for (std::size_t i = first + 1; i < last; ++i) {
    const double d = point_segment_distance(line[i], line[first], line[last]);
    if (d > worst) {
      worst = d;
      idx = i;
    }
  }
  if (worst > tol) {
    keep[idx] = true;
    douglas_peucker(line, first, idx, tol, keep);
    douglas_peucker(line, idx, last, tol, keep);
  }
}

}  // namespace

Polyline simplify(std::span<const Vec2> line, double tolerance) {
  if (line.size() <= 2) return Polyline(line.begin(), line.end());
  std::vector<bool> keep(line.size(), false);
  keep.front() = keep.back() = true;
  douglas_peucker(line, 0, line.size() - 1, tolerance, keep);
  Polyline out;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (keep[i]) out.push_back(line[i]);
  }
  return out;
}

Polyline dedupe(std::span<const Vec2> line, double eps) {
  Polyline out;
  for (const Vec2& p : line) {
    if (out.empty() || distance(out.back(), p) > eps) out.push_back(p);
  }
  return out;
}

namespace {

double directed_hausdorff(std::span<const Vec2> from, std::span<const Vec2> to, double step) {
  double worst = 0.0;
  if (from.size() == 1) return point_polyline_distance(from.front(), to);
  for (std::size_t i = 0; i + 1 < from.size(); ++i) {
    const double len = distance(from[i], from[i + 1]);
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int k = 0; k <= n; ++k) {
      const Vec2 p = from[i] + (from[i + 1] - from[i]) * (static_cast<double>(k) / n);
      worst = std::max(worst, point_polyline_distance(p, to));
    }
  }
  return worst;
}

double segment_segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  if (segments_intersect(a0, a1, b0, b1)) return 0.0;
  return std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                   point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
}

}  // namespace

double hausdorff_distance(std::span<const Vec2> a, std::span<const Vec2> b, double step) {
  return std::max(directed_hausdorff(a, b, step), directed_hausdorff(b, a, step));
}

double polyline_distance(std::span<const Vec2> a, std::span<const Vec2> b) {
  double best = std::numeric_limits<double>::infinity();
  if (a.size() == 1 || b.size() == 1) {
    if (a.size() == 1) return point_polyline_distance(a.front(), b);
    return point_polyline_distance(b.front(), a);
  }
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    for (std::size_t j = 0; j + 1 < b.size(); ++j) {
      best = std::min(best, segment_segment_distance(a[i], a[i + 1], b[j], b[j + 1]));
    }
  }
  return best;
}

int orientation(Vec2 a, Vec2 b, Vec2 c, double eps) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({norm(b - a) * norm(c - a), 1e-300});
  if (std::abs(v) <= eps * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool segments_intersect(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1, Vec2* where) {
  const Vec2 r = a1 - a0;
  const Vec2 s = b1 - b0;
  const double denom = cross(r, s);
  const Vec2 qp = b0 - a0;
  if (denom == 0.0) {
    if (cross(qp, r) != 0.0) return false;
    // Collinear: check overlap along r.
    const double rr = dot(r, r);
    if (rr == 0.0) {
      if (distance(a0, b0) == 0.0 || point_segment_distance(a0, b0, b1) == 0.0) {
        if (where) *where = a0;
        return true;
      }
      return false;
    }
    double t0 = dot(qp, r) / rr;
    double t1 = t0 + dot(s, r) / rr;
    if (t0 > t1) std::swap(t0, t1);
    if (t1 < 0.0 || t0 > 1.0) return false;
    if (where) *where = a0 + r * std::max(0.0, t0);
    return true;
  }
  const double t = cross(qp, s) / denom;
  const double u = cross(qp, r) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return false;
  if (where) *where = a0 + r * t;
  return true;
}

}  // namespace routepack
