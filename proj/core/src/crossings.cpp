#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <limits>
#include <optional>

#include "routepack/packing.hpp"

namespace routepack {

namespace {

constexpr double kTouch = 1e-7;
// Intersection events this close along both paths form one contact region.
constexpr double kCluster = 6.0;
// A probe point must be at least this far from the other path to have a side.
constexpr double kSideClearance = 0.25;

struct Event {
  double sa;
  double sb;
};

double arc_at(const Polyline& line, const std::vector<double>& cum, std::size_t i, Vec2 p) {
  return cum[i] + distance(line[i], p);
}

// Signed distance of `p` from the polyline part [s0, s1] of `line`
// (positive on the left of travel). Nearest vertices use the bisector.
std::optional<double> signed_side(const Polyline& line, const std::vector<double>& cum, double s0, double s1,
                                  Vec2 p) {
  double best = std::numeric_limits<double>::infinity();
  double sign = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    if (cum[i + 1] < s0 || cum[i] > s1) continue;
    const Vec2 a = line[i], b = line[i + 1];
    const Vec2 ab = b - a;
    const double l2 = dot(ab, ab);
    if (l2 <= 0.0) continue;
    const double t = std::clamp(dot(p - a, ab) / l2, 0.0, 1.0);
    const double d = distance(p, a + ab * t);
    if (d >= best) continue;
    best = d;
    Vec2 dir = ab / std::sqrt(l2);
    if (t >= 1.0 && i + 2 < line.size()) dir = dir + normalized(line[i + 2] - b);
    if (t <= 0.0 && i > 0) dir = dir + normalized(a - line[i - 1]);
    // Screen y points down, so a negative cross product is the visual left.
    const double c = -cross(dir, p - (a + ab * t));
    sign = c > 0.0 ? 1.0 : (c < 0.0 ? -1.0 : 0.0);
  }
  if (!std::isfinite(best) || best < kSideClearance || sign == 0.0) return std::nullopt;
  return sign * best;
}

int count_pair(const Polyline& a, const Polyline& b) {
  if (a.size() < 2 || b.size() < 2) return 0;
  const std::vector<double> ca = arc_lengths(a), cb = arc_lengths(b);
  const double la = ca.back(), lb = cb.back();

  constexpr double kCell = 32.0;
  std::map<std::pair<int, int>, std::vector<std::size_t>> grid;
  for (std::size_t j = 0; j + 1 < b.size(); ++j) {
    const int x0 = static_cast<int>(std::floor(std::min(b[j].x, b[j + 1].x) / kCell));
    const int x1 = static_cast<int>(std::floor(std::max(b[j].x, b[j + 1].x) / kCell));
    const int y0 = static_cast<int>(std::floor(std::min(b[j].y, b[j + 1].y) / kCell));
    const int y1 = static_cast<int>(std::floor(std::max(b[j].y, b[j + 1].y) / kCell));
    for (int x = x0; x <= x1; ++x) {
      for (int y = y0; y <= y1; ++y) grid[{x, y}].push_back(j);
    }
  }

  std::vector<Event> events;
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    const Vec2 a0 = a[i], a1 = a[i + 1];
    cand.clear();
    const int x0 = static_cast<int>(std::floor(std::min(a0.x, a1.x) / kCell));
    const int x1 = static_cast<int>(std::floor(std::max(a0.x, a1.x) / kCell));
    const int y0 = static_cast<int>(std::floor(std::min(a0.y, a1.y) / kCell));
    const int y1 = static_cast<int>(std::floor(std::max(a0.y, a1.y) / kCell));
    for (int x = x0; x <= x1; ++x) {
      for (int y = y0; y <= y1; ++y) {
        const auto it = grid.find({x, y});
        if (it != grid.end()) cand.insert(cand.end(), it->second.begin(), it->second.end());
      }
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (std::size_t j : cand) {
      Vec2 x;
      if (!segments_intersect(a0, a1, b[j], b[j + 1], &x)) continue;
      events.push_back({arc_at(a, ca, i, x), arc_at(b, cb, j, x)});
    }
  }
  if (events.empty()) return 0;

  // Contact regions: events chained by closeness along both paths.
  std::vector<std::size_t> parent(events.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::size_t e = 0; e < events.size(); ++e) {
    for (std::size_t f = e + 1; f < events.size(); ++f) {
      if (std::abs(events[e].sa - events[f].sa) <= kCluster && std::abs(events[e].sb - events[f].sb) <= kCluster) {
        parent[find(f)] = find(e);
      }
    }
  }
  struct Region {
    double a0 = std::numeric_limits<double>::infinity(), a1 = -std::numeric_limits<double>::infinity();
    double b0 = std::numeric_limits<double>::infinity(), b1 = -std::numeric_limits<double>::infinity();
  };
  std::map<std::size_t, Region> regions;
  for (std::size_t e = 0; e < events.size(); ++e) {
    Region& r = regions[find(e)];
    r.a0 = std::min(r.a0, events[e].sa);
    r.a1 = std::max(r.a1, events[e].sa);
    r.b0 = std::min(r.b0, events[e].sb);
    r.b1 = std::max(r.b1, events[e].sb);
  }

  // A region is a crossing when B arrives on one side of A and leaves on the
  // other. Regions at either path's ends are contacts, not crossings.
  int count = 0;
  for (const auto& [root, r] : regions) {
    if (r.a0 < kTouch || r.a1 > la - kTouch || r.b0 < kTouch || r.b1 > lb - kTouch) continue;
    for (double probe = 2.0; probe <= 32.0; probe *= 2.0) {
      if (r.b0 - probe < 0.0 || r.b1 + probe > lb) break;
      const Vec2 in = point_at(b, cb, r.b0 - probe), out = point_at(b, cb, r.b1 + probe);
      const double lo = std::max(0.0, r.a0 - 3.0 * probe), hi = std::min(la, r.a1 + 3.0 * probe);
      const auto side_in = signed_side(a, ca, lo, hi, in), side_out = signed_side(a, ca, lo, hi, out);
      if (!side_in || !side_out) continue;
      if ((*side_in > 0.0) != (*side_out > 0.0)) ++count;
      break;
    }
  }
  return count;
}

}  // namespace

int count_crossings(const PackedLayout& layout) {
  int total = 0;
  for (std::size_t i = 0; i < layout.routes.size(); ++i) {
    for (std::size_t j = i + 1; j < layout.routes.size(); ++j) {
      total += count_pair(layout.routes[i].path, layout.routes[j].path);
    }
  }
  return total;
}

}  // namespace routepack
