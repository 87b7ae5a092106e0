#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>

#include "json.hpp"
#include "routepack/skeleton.hpp"

namespace routepack {

namespace {

constexpr std::array<int, 8> kNx = {0, 1, 0, -1, 1, 1, -1, -1};  // 4-neighbors first
constexpr std::array<int, 8> kNy = {-1, 0, 1, 0, -1, 1, 1, -1};

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// Per-pixel label grid: -1 free, -2 unowned skeleton, >= 0 owner id.
class LabelGrid {
 public:
  LabelGrid(int w, int h, int fill) : w_(w), h_(h), v_(std::size_t(w) * h, fill) {}
  bool in(int x, int y) const { return x >= 0 && y >= 0 && x < w_ && y < h_; }
  int get(int x, int y) const { return in(x, y) ? v_[std::size_t(y) * w_ + x] : -1; }
  void set(Pixel p, int v) { v_[std::size_t(p.y) * w_ + p.x] = v; }

 private:
  int w_, h_;
  std::vector<int> v_;
};

struct Params {
  double half_band;
  double tolerance;
  double snap;
  double spur_length;
  double merge_length;
};

Params derive(const SkeletonParams& p) {
  const double half = band_half_width(p.bandwidth, p.fraction);
  return {half, half + 1.5, p.stop_snap * p.bandwidth, 2.0 * half, 2.0 * half};
}

BinaryImage dilate(const BinaryImage& img, double radius) {
  BinaryImage out(img.width(), img.height());
  const int r = static_cast<int>(std::ceil(radius));
  std::vector<std::pair<int, int>> disc;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) disc.emplace_back(dx, dy);
    }
  }
  for (const Pixel& p : img.pixels()) {
    for (auto [dx, dy] : disc) {
      if (out.in_bounds(p.x + dx, p.y + dy)) out.set(p.x + dx, p.y + dy);
    }
  }
  return out;
}

std::vector<Vec2> sample(std::span<const Vec2> line, double step) {
  std::vector<Vec2> out;
  if (line.empty()) return out;
  out.push_back(line.front());
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const double len = distance(line[i], line[i + 1]);
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int k = 1; k <= n; ++k) out.push_back(line[i] + (line[i + 1] - line[i]) * (double(k) / n));
  }
  return out;
}

bool near_any(Vec2 p, const std::vector<Vec2>& anchors, double radius) {
  return std::any_of(anchors.begin(), anchors.end(), [&](Vec2 a) { return distance(a, p) <= radius; });
}

int neighbor_count(const BinaryImage& img, Pixel p) {
  int n = 0;
  for (int i = 0; i < 8; ++i) n += img.get(p.x + kNx[i], p.y + kNy[i]) ? 1 : 0;
  return n;
}

// Removes short branches hanging off junctions and tiny isolated fragments.
// Branch ends close to a stop are kept.
BinaryImage prune_spurs(BinaryImage img, const std::vector<Vec2>& stops, const Params& prm) {
  for (int round = 0; round < 8; ++round) {
    bool changed = false;
    const BifurcationSet cls = detect_bifurcations(img);
    for (const Pixel& end : cls.endpoints) {
      if (!img.get(end) || near_any(end.center(), stops, prm.snap)) continue;
      std::vector<Pixel> path{end};
      std::set<Pixel> visited{end};
      Pixel cur = end;
      bool hit_junction = false;
      for (;;) {
        std::optional<Pixel> next;
        for (int i = 0; i < 8 && !next; ++i) {
          const Pixel n{cur.x + kNx[i], cur.y + kNy[i]};
          if (img.get(n) && !visited.contains(n)) next = n;
        }
        if (!next) break;
        if (crossing_number(img, *next) >= 3) {
          hit_junction = true;
          break;
        }
        cur = *next;
        visited.insert(cur);
        path.push_back(cur);
        if (static_cast<double>(path.size()) > prm.spur_length) break;
      }
      if (static_cast<double>(path.size()) > prm.spur_length) continue;
      if (!hit_junction) {
        // Isolated fragment: drop only when no stop is anywhere near it.
        const bool protected_fragment =
            std::any_of(path.begin(), path.end(), [&](Pixel p) { return near_any(p.center(), stops, prm.snap); });
        if (protected_fragment) continue;
      }
      for (const Pixel& p : path) img.set(p, false);
      changed = true;
    }
    // Lone pixels.
    for (const Pixel& p : img.pixels()) {
      if (neighbor_count(img, p) == 0 && !near_any(p.center(), stops, prm.snap)) {
        img.set(p, false);
        changed = true;
      }
    }
    if (!changed) break;
    img = thin(img);
  }
  return img;
}

// Thinning retracts line ends, most on diagonals. A stop left without any
// skeleton pixel in snapping range is joined to the closest line end by a
// straight pixel run.
BinaryImage extend_to_stops(BinaryImage img, const std::vector<Vec2>& stops, const Params& prm) {
  const BifurcationSet cls = detect_bifurcations(img);
  const std::vector<Pixel> all = img.pixels();
  for (const Vec2& q : stops) {
    const bool reached =
        std::any_of(all.begin(), all.end(), [&](Pixel p) { return distance(p.center(), q) <= prm.snap; });
    if (reached) continue;
    std::optional<Pixel> from;
    double best = 4.0 * prm.half_band;
    for (const Pixel& e : cls.endpoints) {
      const double d = distance(e.center(), q);
      if (d <= best) {
        best = d;
        from = e;
      }
    }
    if (!from) continue;
    const Pixel to{static_cast<int>(std::floor(q.x)), static_cast<int>(std::floor(q.y))};
    // Bresenham, 8-connected.
    int x = from->x, y = from->y;
    const int dx = std::abs(to.x - x), dy = -std::abs(to.y - y);
    const int sx = x < to.x ? 1 : -1, sy = y < to.y ? 1 : -1;
    int err = dx + dy;
    while (x != to.x || y != to.y) {
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
      if (img.in_bounds(x, y)) img.set(x, y);
    }
  }
  return img;
}

struct RawCrux {
  std::vector<Pixel> pixels;
  CruxKind kind;
};

struct RawSegment {
  int a = -1;
  int b = -1;
  std::vector<Pixel> pixels;
};

Vec2 mean_center(const std::vector<Pixel>& pixels) {
  Vec2 c{0.0, 0.0};
  for (const Pixel& p : pixels) c += p.center();
  return c / static_cast<double>(pixels.size());
}

// A short edge between two bends the same way becomes one corner at the
// neighbors' intersection; the offset on the outside of a chamfer would
// otherwise come closer than twice the offset to the one on the inside.
Polyline merge_short_bends(Polyline line, double max_edge) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 1; i + 2 < line.size(); ++i) {
      const Vec2 p0 = line[i - 1], p1 = line[i], p2 = line[i + 1], p3 = line[i + 2];
      if (distance(p1, p2) >= max_edge) continue;
      const Vec2 u = p1 - p0, v = p3 - p2;
      const double t1 = cross(u, p2 - p1), t2 = cross(p2 - p1, v);
      if (t1 * t2 <= 0.0) continue;
      const double den = cross(u, v);
      if (std::abs(den) < 1e-12) continue;
      const Vec2 x = p0 + u * (cross(p2 - p0, v) / den);
      if (distance(x, (p1 + p2) / 2.0) > max_edge) continue;
      line[i] = x;
      line.erase(line.begin() + static_cast<std::ptrdiff_t>(i + 1));
      changed = true;
      break;
    }
  }
  return line;
}

double chain_length(const std::vector<Pixel>& pixels) {
  double len = 0.0;
  for (std::size_t i = 1; i < pixels.size(); ++i) len += distance(pixels[i - 1].center(), pixels[i].center());
  return len;
}

// Traces skeleton chains between crucial-vertex pixel clusters.
std::vector<RawSegment> trace_segments(const BinaryImage& img, std::vector<RawCrux>& cruxes) {
  const int w = img.width(), h = img.height();
  LabelGrid crux_of(w, h, -1);
  LabelGrid seg_of(w, h, -1);
  for (std::size_t c = 0; c < cruxes.size(); ++c) {
    for (const Pixel& p : cruxes[c].pixels) crux_of.set(p, static_cast<int>(c));
  }

  // Components without any crux (closed loops) get one on their first pixel.
  {
    BinaryImage seen(w, h);
    for (const Pixel& start : img.pixels()) {
      if (seen.get(start)) continue;
      std::vector<Pixel> comp{start}, stack{start};
      seen.set(start);
      bool has_crux = false;
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        if (crux_of.get(p.x, p.y) >= 0) has_crux = true;
        for (int i = 0; i < 8; ++i) {
          const Pixel n{p.x + kNx[i], p.y + kNy[i]};
          if (img.get(n) && !seen.get(n)) {
            seen.set(n);
            stack.push_back(n);
            comp.push_back(n);
          }
        }
      }
      if (!has_crux) {
        const Pixel first = *std::min_element(comp.begin(), comp.end());
        crux_of.set(first, static_cast<int>(cruxes.size()));
        cruxes.push_back({{first}, CruxKind::kEndpoint});
      }
    }
  }

  std::vector<RawSegment> segments;
  auto free_chain = [&](Pixel p) { return img.get(p) && crux_of.get(p.x, p.y) < 0 && seg_of.get(p.x, p.y) < 0; };

  for (std::size_t c = 0; c < cruxes.size(); ++c) {
    const std::vector<Pixel> members = cruxes[c].pixels;
    for (const Pixel& m : members) {
      for (int i = 0; i < 8; ++i) {
        const Pixel start{m.x + kNx[i], m.y + kNy[i]};
        if (!free_chain(start)) continue;
        RawSegment seg;
        seg.a = static_cast<int>(c);
        const int sid = static_cast<int>(segments.size());
        Pixel cur = start;
        seg.pixels.push_back(cur);
        seg_of.set(cur, sid);
        auto touches_other_crux = [&](Pixel p) {
          for (int k = 0; k < 8; ++k) {
            const int o = crux_of.get(p.x + kNx[k], p.y + kNy[k]);
            if (o >= 0 && o != seg.a) return true;
          }
          return false;
        };
        for (;;) {
          // A chain ends as soon as it reaches another crux, even if free pixels continue past it.
          if (touches_other_crux(cur)) break;
          std::optional<Pixel> next;
          for (int k = 0; k < 8 && !next; ++k) {
            const Pixel n{cur.x + kNx[k], cur.y + kNy[k]};
            if (free_chain(n)) next = n;
          }
          if (!next) break;
          cur = *next;
          seg.pixels.push_back(cur);
          seg_of.set(cur, sid);
        }
        // Close the chain at a neighboring crux, preferring one other than the start.
        int end = -1;
        for (int k = 0; k < 8; ++k) {
          const int o = crux_of.get(cur.x + kNx[k], cur.y + kNy[k]);
          if (o >= 0 && (end < 0 || (end == seg.a && o != seg.a))) end = o;
        }
        if (end < 0) {
          // Dead end beside an already traced chain: that chain lost a shared
          // pixel to a junction, so split it there and meet at the split.
          int other = -1;
          Pixel at{};
          for (int k = 0; k < 8 && other < 0; ++k) {
            const Pixel n{cur.x + kNx[k], cur.y + kNy[k]};
            const int o = seg_of.get(n.x, n.y);
            if (o >= 0 && o != sid) {
              other = o;
              at = n;
            }
          }
          if (other >= 0) {
            const int nc = static_cast<int>(cruxes.size());
            cruxes.push_back({{at}, CruxKind::kBifurcation});
            crux_of.set(at, nc);
            seg_of.set(at, -1);
            RawSegment& os = segments[other];
            const auto it = std::find(os.pixels.begin(), os.pixels.end(), at);
            RawSegment tail;
            tail.a = nc;
            tail.b = os.b;
            tail.pixels.assign(it + 1, os.pixels.end());
            os.pixels.erase(it, os.pixels.end());
            os.b = nc;
            seg.b = nc;
            segments.push_back(std::move(seg));
            const int tid = static_cast<int>(segments.size());
            for (const Pixel& p : tail.pixels) seg_of.set(p, tid);
            segments.push_back(std::move(tail));
            continue;
          }
          // Dead end without a crux: the last pixel becomes an endpoint.
          const Pixel last = seg.pixels.back();
          seg.pixels.pop_back();
          seg_of.set(last, -1);
          crux_of.set(last, static_cast<int>(cruxes.size()));
          cruxes.push_back({{last}, CruxKind::kEndpoint});
          end = static_cast<int>(cruxes.size()) - 1;
        }
        seg.b = end;
        segments.push_back(std::move(seg));
      }
    }
  }

  // Orphans (corners skipped while tracing) join an adjacent segment or crux.
  for (bool changed = true; changed;) {
    changed = false;
    for (const Pixel& p : img.pixels()) {
      if (crux_of.get(p.x, p.y) >= 0 || seg_of.get(p.x, p.y) >= 0) continue;
      for (int k = 0; k < 8; ++k) {
        const Pixel n{p.x + kNx[k], p.y + kNy[k]};
        const int s = seg_of.get(n.x, n.y);
        const int c = crux_of.get(n.x, n.y);
        if (s >= 0) {
          auto& px = segments[s].pixels;
          const auto at = std::find(px.begin(), px.end(), n);
          px.insert(at + 1, p);
          seg_of.set(p, s);
          changed = true;
          break;
        }
        if (c >= 0) {
          cruxes[c].pixels.push_back(p);
          crux_of.set(p, c);
          changed = true;
          break;
        }
      }
    }
  }
  return segments;
}

struct Dist {
  double cost;
  int node;
  bool operator>(const Dist& o) const { return cost > o.cost || (cost == o.cost && node > o.node); }
};

}  // namespace

const RouteWalk& PrunedGraph::walk(const std::string& route_id) const {
  for (const RouteWalk& w : walks) {
    if (w.route_id == route_id) return w;
  }
  throw ValidationError("no walk for route " + route_id);
}

Polyline PrunedGraph::step_polyline(const RouteStep& step) const {
  Polyline p = segments[step.segment].polyline;
  if (!step.forward) std::reverse(p.begin(), p.end());
  return p;
}

int PrunedGraph::step_end_crux(const RouteStep& step) const {
  const Segment& s = segments[step.segment];
  return step.forward ? s.crux_b : s.crux_a;
}

int PrunedGraph::step_start_crux(const RouteStep& step) const {
  const Segment& s = segments[step.segment];
  return step.forward ? s.crux_a : s.crux_b;
}

std::vector<Polyline> route_edge_polylines(const RouteNetwork& net, const Viewport& vp) {
  std::vector<Polyline> out;
  std::set<std::string> seen;
  for (const Route& r : net.routes()) {
    for (const std::string& e : r.path) {
      if (seen.insert(e).second) out.push_back(project(net.edge(e).geometry, vp));
    }
  }
  return out;
}

PrunedGraph build_pruned_graph(const Skeleton& sk, const RouteNetwork& net, const Viewport& vp,
                               const SkeletonParams& params) {
  const Params prm = derive(params);
  const int w = sk.image.width(), h = sk.image.height();

  // Stops, in first-seen order.
  std::vector<std::string> stop_ids;
  std::vector<Vec2> stop_pos;
  {
    std::set<std::string> seen;
    for (const Route& r : net.routes()) {
      for (const std::string& s : r.stops) {
        if (seen.insert(s).second) {
          stop_ids.push_back(s);
          stop_pos.push_back(project(net.vertex(s).position, vp));
        }
      }
    }
  }

  BinaryImage img = extend_to_stops(prune_spurs(sk.image, stop_pos, prm), stop_pos, prm);

  // Every route edge must run along the skeleton.
  {
    const BinaryImage near = dilate(img, prm.tolerance);
    std::set<std::string> checked;
    for (const Route& r : net.routes()) {
      for (const std::string& eid : r.path) {
        if (!checked.insert(eid).second) continue;
        // Near its end vertices an edge may leave the skeleton, which cuts
        // acute corners; everywhere else it must stay within tolerance.
        const Polyline line = project(net.edge(eid).geometry, vp);
        const double corner = 2.0 * prm.half_band;
        bool any = false, bad = false;
        for (const Vec2& s : sample(line, 1.0)) {
          const int x = std::clamp(static_cast<int>(std::floor(s.x)), 0, w - 1);
          const int y = std::clamp(static_cast<int>(std::floor(s.y)), 0, h - 1);
          const bool ok = near.get(x, y);
          any = any || ok;
          if (!ok && distance(s, line.front()) > corner && distance(s, line.back()) > corner) bad = true;
        }
        if (bad || !any) {
          throw CoverageError("route edge " + eid + " (route " + r.id + ") is not covered by the skeleton");
        }
      }
    }
  }

  // Crux clusters: 8-connected bifurcation pixels, and single endpoints.
  std::vector<RawCrux> raw;
  {
    const BifurcationSet cls = detect_bifurcations(img);
    LabelGrid bif(w, h, -1);
    for (std::size_t i = 0; i < cls.bifurcations.size(); ++i) bif.set(cls.bifurcations[i], static_cast<int>(i));
    DisjointSet ds(cls.bifurcations.size());
    for (std::size_t i = 0; i < cls.bifurcations.size(); ++i) {
      const Pixel p = cls.bifurcations[i];
      for (int k = 0; k < 8; ++k) {
        const int j = bif.get(p.x + kNx[k], p.y + kNy[k]);
        if (j >= 0) ds.unite(i, static_cast<std::size_t>(j));
      }
    }
    std::map<std::size_t, std::size_t> cluster_index;
    for (std::size_t i = 0; i < cls.bifurcations.size(); ++i) {
      const std::size_t root = ds.find(i);
      auto [it, inserted] = cluster_index.emplace(root, raw.size());
      if (inserted) raw.push_back({{}, CruxKind::kBifurcation});
      raw[it->second].pixels.push_back(cls.bifurcations[i]);
    }
    for (const Pixel& e : cls.endpoints) raw.push_back({{e}, CruxKind::kEndpoint});
    // Protected isolated pixels near stops.
    for (const Pixel& p : img.pixels()) {
      if (neighbor_count(img, p) == 0) raw.push_back({{p}, CruxKind::kEndpoint});
    }
  }

  std::vector<RawSegment> segs = trace_segments(img, raw);

  // Position of each raw crux before merging.
  std::vector<Vec2> raw_pos(raw.size());
  std::vector<double> raw_weight(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw_pos[i] = mean_center(raw[i].pixels);
    raw_weight[i] = static_cast<double>(raw[i].pixels.size());
  }

  // Contract short junction-to-junction chains into one crucial vertex.
  DisjointSet merge(raw.size());
  std::vector<bool> absorbed(segs.size(), false);
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const RawSegment& seg = segs[s];
    if (raw[seg.a].kind != CruxKind::kBifurcation || raw[seg.b].kind != CruxKind::kBifurcation) continue;
    const double len = chain_length(seg.pixels) + distance(raw_pos[seg.a], seg.pixels.empty() ? raw_pos[seg.b] : seg.pixels.front().center()) +
                       (seg.pixels.empty() ? 0.0 : distance(seg.pixels.back().center(), raw_pos[seg.b]));
    if (len < prm.merge_length) {
      merge.unite(static_cast<std::size_t>(seg.a), static_cast<std::size_t>(seg.b));
      absorbed[s] = true;
    }
  }

  PrunedGraph pg;
  pg.width = w;
  pg.height = h;
  pg.skeleton = img;
  pg.coverage_tolerance = prm.tolerance;

  std::vector<int> crux_id(raw.size(), -1);
  {
    std::vector<Vec2> sum;
    std::vector<double> weight;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const std::size_t root = merge.find(i);
      if (crux_id[root] < 0) {
        crux_id[root] = static_cast<int>(pg.cruxes.size());
        CrucialVertex cv;
        cv.id = crux_id[root];
        cv.kind = raw[root].kind;
        pg.cruxes.push_back(std::move(cv));
        sum.push_back({0.0, 0.0});
        weight.push_back(0.0);
      }
      const int id = crux_id[root];
      crux_id[i] = id;
      auto& cv = pg.cruxes[id];
      cv.pixels.insert(cv.pixels.end(), raw[i].pixels.begin(), raw[i].pixels.end());
      sum[id] += raw_pos[i] * raw_weight[i];
      weight[id] += raw_weight[i];
    }
    for (std::size_t c = 0; c < pg.cruxes.size(); ++c) pg.cruxes[c].position = sum[c] / weight[c];
  }

  for (std::size_t s = 0; s < segs.size(); ++s) {
    const int a = crux_id[segs[s].a];
    const int b = crux_id[segs[s].b];
    if (absorbed[s] || (a == b && chain_length(segs[s].pixels) < prm.merge_length)) {
      auto& cv = pg.cruxes[a];
      cv.pixels.insert(cv.pixels.end(), segs[s].pixels.begin(), segs[s].pixels.end());
      continue;
    }
    Segment seg;
    seg.id = static_cast<int>(pg.segments.size());
    seg.crux_a = a;
    seg.crux_b = b;
    seg.pixels = std::move(segs[s].pixels);
    pg.segments.push_back(std::move(seg));
  }

  // Snap stops onto the skeleton. The band always covers a stop, so when the
  // skeleton cuts an acute corner a second pass looks one half-band further.
  std::map<std::string, int> stop_crux;
  for (std::size_t i = 0; i < stop_ids.size(); ++i) {
    const Vec2 q = stop_pos[i];
    int best = -1;
    int best_seg = -1;
    std::size_t best_px = 0;
    for (const double extra : {0.0, prm.half_band}) {
      double best_d = prm.snap + extra;
      for (const CrucialVertex& cv : pg.cruxes) {
        double d = distance(cv.position, q);
        for (const Pixel& p : cv.pixels) d = std::min(d, distance(p.center(), q) + 0.5);
        // Thinning pulls line ends back by about the band half-width.
        const double bonus = cv.kind == CruxKind::kEndpoint && extra == 0.0 ? prm.half_band : 0.0;
        const double score = d - bonus;
        if (score <= best_d && (best < 0 || score < best_d)) {
          best = cv.id;
          best_d = score;
        }
      }
      if (best >= 0) {
        if (pg.cruxes[best].kind == CruxKind::kEndpoint && pg.cruxes[best].sources.empty()) pg.cruxes[best].position = q;
        break;
      }
      // No crux nearby: split the closest segment at its nearest pixel.
      double seg_d = prm.snap + extra;
      for (const Segment& s : pg.segments) {
        for (std::size_t k = 0; k < s.pixels.size(); ++k) {
          const double d = distance(s.pixels[k].center(), q);
          if (d <= seg_d) {
            seg_d = d;
            best_seg = s.id;
            best_px = k;
          }
        }
      }
      if (best_seg >= 0) break;
    }
    if (best_seg >= 0) {
      Segment& s = pg.segments[best_seg];
      CrucialVertex cv;
      cv.id = static_cast<int>(pg.cruxes.size());
      cv.kind = CruxKind::kStop;
      cv.pixels = {s.pixels[best_px]};
      cv.position = s.pixels[best_px].center();
      Segment tail;
      tail.id = static_cast<int>(pg.segments.size());
      tail.crux_a = cv.id;
      tail.crux_b = s.crux_b;
      tail.pixels.assign(s.pixels.begin() + static_cast<std::ptrdiff_t>(best_px) + 1, s.pixels.end());
      s.pixels.resize(best_px);
      s.crux_b = cv.id;
      best = cv.id;
      pg.cruxes.push_back(std::move(cv));
      pg.segments.push_back(std::move(tail));
    }
    if (best < 0) {
      throw CoverageError("stop " + stop_ids[i] + " has no skeleton pixel within " +
                          std::to_string(prm.snap + prm.half_band) + " px");
    }
    pg.cruxes[best].sources.push_back(stop_ids[i]);
    stop_crux[stop_ids[i]] = best;
  }

  for (Segment& s : pg.segments) {
    Polyline pts;
    pts.reserve(s.pixels.size());
    // Pixels inside a crux's own footprint only add hooks towards its centroid.
    auto reach = [&](const CrucialVertex& c) {
      double r = 0.0;
      for (const Pixel& q : c.pixels) r = std::max(r, distance(q.center(), c.position));
      return r + 1.5;
    };
    const CrucialVertex& ca = pg.cruxes[s.crux_a];
    const CrucialVertex& cb = pg.cruxes[s.crux_b];
    const double ra = reach(ca), rb = reach(cb);
    for (const Pixel& p : s.pixels) {
      const Vec2 c = p.center();
      if (distance(c, ca.position) > ra && distance(c, cb.position) > rb) pts.push_back(c);
    }
    Polyline line{ca.position};
    for (const Vec2& p : simplify(pts, 1.2)) line.push_back(p);
    line.push_back(pg.cruxes[s.crux_b].position);
    s.polyline = merge_short_bends(dedupe(line, 1e-6), 6.0);
    if (s.polyline.size() == 1) s.polyline.push_back(s.polyline.front());
    s.length = polyline_length(s.polyline);
  }

  // Adjacency for walk reconstruction.
  std::vector<std::vector<int>> incident(pg.cruxes.size());
  for (const Segment& s : pg.segments) {
    if (s.length <= 0.0) continue;
    incident[s.crux_a].push_back(s.id);
    if (s.crux_b != s.crux_a) incident[s.crux_b].push_back(s.id);
  }

  // Interior samples of each segment, away from its crucial vertices.
  std::vector<std::vector<Vec2>> interior(pg.segments.size());
  for (const Segment& s : pg.segments) {
    const auto cum = arc_lengths(s.polyline);
    const double len = cum.back();
    const double margin = std::min(prm.tolerance, len / 2.0);
    for (double t = margin; t <= len - margin + 1e-9; t += 2.0) interior[s.id].push_back(point_at(s.polyline, cum, t));
    if (interior[s.id].empty()) interior[s.id].push_back(point_at(s.polyline, cum, len / 2.0));
  }
  auto covered_fraction = [&](int seg, std::span<const Vec2> line) {
    std::size_t hit = 0;
    for (const Vec2& p : interior[seg]) hit += point_polyline_distance(p, line) <= prm.tolerance ? 1 : 0;
    return static_cast<double>(hit) / static_cast<double>(interior[seg].size());
  };

  for (const Route& r : net.routes()) {
    const RouteChain& chain = net.chain(r.id);
    RouteWalk walk;
    walk.route_id = r.id;
    for (const std::string& s : r.stops) walk.stop_cruxes.push_back(stop_crux.at(s));
    walk.leg_starts.push_back(0);

    for (std::size_t k = 0; k + 1 < r.stops.size(); ++k) {
      Polyline leg_line;
      for (std::size_t i = chain.stop_positions[k]; i < chain.stop_positions[k + 1]; ++i) {
        for (const GeoPoint& g : oriented_geometry(net.edge(r.path[i]), chain.reversed[i])) {
          leg_line.push_back(project(g, vp));
        }
      }
      leg_line = simplify(dedupe(leg_line), 0.25);
      const int from = walk.stop_cruxes[k];
      const int to = walk.stop_cruxes[k + 1];
      if (from != to) {
        std::vector<bool> usable(pg.segments.size(), false);
        for (const Segment& s : pg.segments) usable[s.id] = s.length > 0.0 && covered_fraction(s.id, leg_line) >= 0.8;
        std::vector<double> dist(pg.cruxes.size(), std::numeric_limits<double>::infinity());
        std::vector<RouteStep> via(pg.cruxes.size());
        std::vector<int> prev(pg.cruxes.size(), -1);
        std::priority_queue<Dist, std::vector<Dist>, std::greater<>> queue;
        dist[from] = 0.0;
        queue.push({0.0, from});
        while (!queue.empty()) {
          const Dist top = queue.top();
          queue.pop();
          if (top.cost > dist[top.node]) continue;
          if (top.node == to) break;
          for (int sid : incident[top.node]) {
            if (!usable[sid]) continue;
            const Segment& s = pg.segments[sid];
            const bool forward = s.crux_a == top.node;
            const int other = forward ? s.crux_b : s.crux_a;
            const double nd = top.cost + s.length;
            if (nd < dist[other]) {
              dist[other] = nd;
              via[other] = {sid, forward};
              prev[other] = top.node;
              queue.push({nd, other});
            }
          }
        }
        if (!std::isfinite(dist[to])) {
          throw CoverageError("route " + r.id + " leg " + r.stops[k] + "->" + r.stops[k + 1] +
                              " (edge " + r.path[chain.stop_positions[k]] + ") has no skeleton path");
        }
        std::vector<RouteStep> steps;
        for (int n = to; n != from; n = prev[n]) steps.push_back(via[n]);
        std::reverse(steps.begin(), steps.end());
        walk.steps.insert(walk.steps.end(), steps.begin(), steps.end());
      }
      walk.leg_starts.push_back(walk.steps.size());

      // Edge -> segment chain, restricted to this leg's steps.
      for (std::size_t i = chain.stop_positions[k]; i < chain.stop_positions[k + 1]; ++i) {
        const std::string& eid = r.path[i];
        if (pg.incidence.contains(eid)) continue;
        const Polyline edge_line = project(net.edge(eid).geometry, vp);
        std::optional<std::size_t> first, last;
        for (std::size_t j = walk.leg_starts[k]; j < walk.leg_starts[k + 1]; ++j) {
          const int sid = walk.steps[j].segment;
          const bool seg_on_edge = covered_fraction(sid, edge_line) >= 0.5;
          const Polyline& sl = pg.segments[sid].polyline;
          std::size_t hits = 0;
          const auto samples = sample(edge_line, 2.0);
          for (const Vec2& p : samples) hits += point_polyline_distance(p, sl) <= prm.tolerance ? 1 : 0;
          const bool edge_on_seg = 2 * hits >= samples.size() && !samples.empty();
          if (seg_on_edge || edge_on_seg) {
            if (!first) first = j;
            last = j;
          }
        }
        std::vector<int>& chain_ids = pg.incidence[eid];
        if (first) {
          for (std::size_t j = *first; j <= *last; ++j) chain_ids.push_back(walk.steps[j].segment);
        }
      }
    }
    pg.walks.push_back(std::move(walk));
  }
  return pg;
}

PrunedGraph skeletonize(const RouteNetwork& net, const Viewport& vp, const SkeletonParams& params) {
  const std::vector<Polyline> lines = route_edge_polylines(net, vp);
  const DensityGrid grid = rasterize_kde(lines, params.bandwidth, vp);
  const BinaryImage bin = binarize(grid, params.fraction);
  return build_pruned_graph(make_skeleton(thin(bin)), net, vp, params);
}

std::string pruned_graph_json(const PrunedGraph& pg) {
  using nlohmann::json;
  json doc;
  json cruxes = json::array();
  for (const CrucialVertex& c : pg.cruxes) {
    json jc = {{"x", c.position.x}, {"y", c.position.y}};
    if (!c.sources.empty()) jc["source"] = c.sources.front();
    cruxes.push_back(std::move(jc));
  }
  json segments = json::array();
  for (const Segment& s : pg.segments) {
    json px = json::array();
    for (const Pixel& p : s.pixels) px.push_back({p.x, p.y});
    segments.push_back({{"id", s.id}, {"pixels", std::move(px)}, {"cruxA", s.crux_a}, {"cruxB", s.crux_b}});
  }
  json incidence = json::object();
  for (const auto& [edge, ids] : pg.incidence) incidence[edge] = ids;
  doc["cruxes"] = std::move(cruxes);
  doc["segments"] = std::move(segments);
  doc["incidence"] = std::move(incidence);
  return doc.dump(2) + "\n";
}

}  // namespace routepack
