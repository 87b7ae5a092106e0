#include "routepack/packing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "routepack/offset.hpp"

namespace routepack {

namespace {

struct Traversal {
  std::size_t walk = 0;
  std::size_t step = 0;
  bool operator<(const Traversal& o) const { return std::tie(walk, step) < std::tie(o.walk, o.step); }
  bool operator==(const Traversal&) const = default;
};

std::vector<std::vector<Traversal>> traversals_by_segment(const PrunedGraph& pg) {
  std::vector<std::vector<Traversal>> on(pg.segments.size());
  for (std::size_t w = 0; w < pg.walks.size(); ++w) {
    for (std::size_t k = 0; k < pg.walks[w].steps.size(); ++k) on[pg.walks[w].steps[k].segment].push_back({w, k});
  }
  return on;
}

// Base polyline of a route walk with the source arc length where each step
// starts (plus the total).
struct RouteGeometry {
  Polyline base;
  std::vector<double> cum;
  std::vector<double> step_s;
};

RouteGeometry route_geometry(const PrunedGraph& pg, const RouteWalk& w) {
  RouteGeometry g;
  double len = 0.0;
  g.step_s.push_back(0.0);
  for (const RouteStep& step : w.steps) {
    for (const Vec2& p : pg.step_polyline(step)) {
      if (!g.base.empty()) {
        const double d = distance(g.base.back(), p);
        if (d < 1e-9) continue;
        len += d;
      }
      g.base.push_back(p);
      g.cum.push_back(len);
    }
    g.step_s.push_back(len);
  }
  if (g.base.empty() && !w.stop_cruxes.empty()) {
    g.base.push_back(pg.cruxes[w.stop_cruxes.front()].position);
    g.cum.push_back(0.0);
  }
  return g;
}

std::size_t walk_index(const PrunedGraph& pg, const std::string& route_id) {
  for (std::size_t i = 0; i < pg.walks.size(); ++i) {
    if (pg.walks[i].route_id == route_id) return i;
  }
  throw Error("unknown route " + route_id);
}

std::string pass_key(const std::string& route, std::size_t step) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "\x01%010zu", step);
  return route + buf;
}

bool in_zone(double s, const std::vector<std::pair<double, double>>& zones, double pad) {
  for (const auto& [a, b] : zones) {
    if (s > a - pad && s < b + pad) return true;
  }
  return false;
}

}  // namespace

double DivergenceFrame::angle_of(Vec2 p) const { return normalize_angle_deg(screen_angle_deg(p - origin) - rotation_deg); }

double PackParams::width_of(const std::string& route_id) const {
  const auto it = widths.find(route_id);
  return it == widths.end() ? default_width : it->second;
}

const LayoutRoute& PackedLayout::route(const std::string& id) const {
  for (const LayoutRoute& r : routes) {
    if (r.id == id) return r;
  }
  throw Error("unknown route " + id);
}

std::vector<SharedSubpath> find_shared_subpaths(const PrunedGraph& pg) {
  const auto on = traversals_by_segment(pg);
  const std::size_t n = pg.segments.size();

  // Two segments are linked through a crux when every pass over one
  // continues onto the other there, and vice versa.
  std::map<std::pair<int, int>, int> link_crux;
  auto self_loop = [&](int s) { return pg.segments[s].crux_a == pg.segments[s].crux_b; };
  for (const RouteWalk& w : pg.walks) {
    for (std::size_t k = 0; k + 1 < w.steps.size(); ++k) {
      const int s1 = w.steps[k].segment, s2 = w.steps[k + 1].segment;
      if (s1 == s2 || self_loop(s1) || self_loop(s2)) continue;
      if (on[s1].size() < 2 || on[s1].size() != on[s2].size()) continue;
      const auto key = std::minmax(s1, s2);
      if (link_crux.contains(key)) continue;
      const int c = pg.step_end_crux(w.steps[k]);
      std::set<Traversal> mapped;
      bool ok = true;
      for (const Traversal& t : on[s1]) {
        const auto& steps = pg.walks[t.walk].steps;
        const RouteStep& st = steps[t.step];
        if (pg.step_end_crux(st) == c && t.step + 1 < steps.size() && steps[t.step + 1].segment == s2) {
          mapped.insert({t.walk, t.step + 1});
        } else if (pg.step_start_crux(st) == c && t.step > 0 && steps[t.step - 1].segment == s2) {
          mapped.insert({t.walk, t.step - 1});
        } else {
          ok = false;
          break;
        }
      }
      if (ok && mapped.size() == on[s2].size()) link_crux[{key.first, key.second}] = c;
    }
  }

  std::vector<std::vector<int>> adj(n);
  for (const auto& [key, c] : link_crux) {
    adj[key.first].push_back(key.second);
    adj[key.second].push_back(key.first);
  }

  std::vector<bool> seen(n, false);
  struct Pending {
    SharedSubpath sp;
    std::pair<std::string, std::size_t> ref;
  };
  std::vector<Pending> found;
  for (std::size_t s0 = 0; s0 < n; ++s0) {
    if (seen[s0] || on[s0].size() < 2) continue;
    // Collect the component, then walk it from an end.
    std::vector<int> comp;
    std::vector<int> stack = {static_cast<int>(s0)};
    seen[s0] = true;
    while (!stack.empty()) {
      const int s = stack.back();
      stack.pop_back();
      comp.push_back(s);
      for (int t : adj[s]) {
        if (!seen[t]) {
          seen[t] = true;
          stack.push_back(t);
        }
      }
    }
    int start = *std::min_element(comp.begin(), comp.end());
    for (int s : comp) {
      if (adj[s].size() <= 1 && (adj[start].size() > 1 || s < start)) start = s;
    }
    std::vector<int> chain = {start};
    std::set<int> used = {start};
    for (;;) {
      int next = -1;
      for (int t : adj[chain.back()]) {
        if (!used.contains(t)) {
          next = t;
          break;
        }
      }
      if (next < 0) break;
      used.insert(next);
      chain.push_back(next);
    }

    const std::size_t L = chain.size();
    std::vector<Participant> parts;
    for (const Traversal& t : on[chain[0]]) {
      const RouteWalk& w = pg.walks[t.walk];
      bool along = true;
      std::size_t first = t.step, last = t.step;
      if (L > 1) {
        const int c01 = link_crux.at(std::minmax(chain[0], chain[1]));
        const auto& steps = w.steps;
        if (pg.step_end_crux(steps[t.step]) == c01 && t.step + 1 < steps.size() &&
            steps[t.step + 1].segment == chain[1]) {
          last = t.step + L - 1;
        } else {
          along = false;
          first = t.step + 1 - L;
        }
      } else {
        // Single segment: direction relative to the segment's own a->b.
        along = w.steps[t.step].forward;
      }
      parts.push_back({w.route_id, first, last, along});
    }
    std::sort(parts.begin(), parts.end(), [](const Participant& a, const Participant& b) {
      return std::tie(a.route_id, a.first_step) < std::tie(b.route_id, b.first_step);
    });
    if (!parts.front().forward) {
      std::reverse(chain.begin(), chain.end());
      for (Participant& p : parts) p.forward = !p.forward;
    }
    SharedSubpath sp;
    sp.segments = chain;
    sp.participants = parts;
    const RouteWalk& rw = pg.walk(parts.front().route_id);
    sp.start_crux = pg.step_start_crux(rw.steps[parts.front().first_step]);
    sp.end_crux = pg.step_end_crux(rw.steps[parts.front().last_step]);
    found.push_back({std::move(sp), {parts.front().route_id, parts.front().first_step}});
  }
  std::sort(found.begin(), found.end(), [](const Pending& a, const Pending& b) {
    return std::tie(a.ref, a.sp.segments) < std::tie(b.ref, b.sp.segments);
  });
  std::vector<SharedSubpath> out;
  for (Pending& p : found) {
    p.sp.id = static_cast<int>(out.size());
    out.push_back(std::move(p.sp));
  }
  return out;
}

DivergenceFrame divergence_frame(const PrunedGraph& pg, const SharedSubpath& sp, std::size_t participant,
                                 double probe) {
  const Participant& p = sp.participants.at(participant);
  const RouteGeometry g = route_geometry(pg, pg.walk(p.route_id));
  const double s_first = g.step_s[p.first_step];
  const double s_end = g.step_s[p.last_step + 1];
  double s_pre = std::max(s_end - probe, s_first);
  if (s_end - s_first < 1.0) s_pre = std::max(0.0, s_end - probe);
  DivergenceFrame f;
  f.origin = point_at(g.base, g.cum, s_end);
  f.pre = point_at(g.base, g.cum, s_pre);
  const Vec2 u = f.origin - f.pre;
  f.rotation_deg = screen_angle_deg(f.pre - f.origin);
  f.perpendicular = norm(u) > 0.0 ? normalized(left_normal(u)) : Vec2{0.0, 0.0};
  return f;
}

std::optional<double> departure_delta(const PrunedGraph& pg, const SharedSubpath& sp, std::size_t participant,
                                      double probe) {
  const Participant& p = sp.participants.at(participant);
  const RouteGeometry g = route_geometry(pg, pg.walk(p.route_id));
  const double s_end = g.step_s[p.last_step + 1];
  const double total = g.step_s.back();
  if (s_end >= total - 1e-9) return std::nullopt;
  const DivergenceFrame f = divergence_frame(pg, sp, participant, probe);
  const Vec2 next = point_at(g.base, g.cum, std::min(total, s_end + probe));
  return normalize_angle_deg(f.angle_of(next) - 180.0);
}

std::vector<int> rank_by_delta(const std::vector<double>& deltas, const std::vector<std::string>& keys) {
  const std::size_t n = deltas.size();
  std::vector<int> ranks(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool j_wins = std::abs(deltas[j] - deltas[i]) <= 1e-9 ? keys[j] < keys[i] : deltas[j] > deltas[i];
      if (j_wins) ++ranks[i];
    }
  }
  return ranks;
}

RankAssignment rank_routes(const PrunedGraph& pg, const std::vector<SharedSubpath>& subpaths, double probe) {
  RankAssignment out(subpaths.size());
  std::vector<std::vector<std::string>> keys(subpaths.size());
  // (route, step) -> (subpath index, participant index)
  std::map<std::pair<std::string, std::size_t>, std::pair<std::size_t, std::size_t>> owner;
  for (std::size_t si = 0; si < subpaths.size(); ++si) {
    const SharedSubpath& sp = subpaths[si];
    out[si].subpath = sp.id;
    for (std::size_t i = 0; i < sp.participants.size(); ++i) {
      const Participant& p = sp.participants[i];
      const double d = departure_delta(pg, sp, i, probe).value_or(0.0);
      out[si].deltas.push_back(p.forward ? d : -d);
      keys[si].push_back(pass_key(p.route_id, p.first_step));
      for (std::size_t k = p.first_step; k <= p.last_step; ++k) owner[{p.route_id, k}] = {si, i};
    }
  }

  // Passes that leave together tie on delta; their order is whatever the
  // subpath they continue into decides, so rank those first.
  std::vector<int> state(subpaths.size(), 0);  // 0 todo, 1 in progress, 2 done
  std::function<void(std::size_t)> solve = [&](std::size_t si) {
    if (state[si] != 0) return;
    state[si] = 1;
    const SharedSubpath& sp = subpaths[si];
    const std::size_t n = sp.participants.size();
    auto next_of = [&](std::size_t i) -> std::optional<std::pair<std::size_t, std::size_t>> {
      const Participant& p = sp.participants[i];
      const auto it = owner.find({p.route_id, p.last_step + 1});
      if (it == owner.end()) return std::nullopt;
      return it->second;
    };
    // True when j goes before (gets the smaller rank than) i.
    auto j_wins = [&](std::size_t i, std::size_t j) {
      const std::vector<double>& d = out[si].deltas;
      if (std::abs(d[j] - d[i]) > 1e-9) return d[j] > d[i];
      const Participant& pi = sp.participants[i];
      const Participant& pj = sp.participants[j];
      const auto ni = next_of(i), nj = next_of(j);
      if (pi.forward == pj.forward && ni && nj && ni->first == nj->first && ni->first != si) {
        solve(ni->first);
        if (state[ni->first] == 2) {
          const SharedSubpath& t = subpaths[ni->first];
          const std::vector<int>& rt = out[ni->first].ranks;
          const bool i_left = (rt[ni->second] < rt[nj->second]) == t.participants[ni->second].forward;
          return i_left != pi.forward;
        }
      }
      return keys[si][j] < keys[si][i];
    };
    std::vector<int> ranks(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && j_wins(i, j)) ++ranks[i];
      }
    }
    out[si].ranks = std::move(ranks);
    state[si] = 2;
  };
  for (std::size_t si = 0; si < subpaths.size(); ++si) solve(si);
  return out;
}

BundleOffsets compute_offsets(const std::vector<int>& ranks, const std::vector<double>& widths, double gap) {
  const std::size_t n = ranks.size();
  BundleOffsets out;
  out.offsets.assign(n, 0.0);
  if (n == 0) return out;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });
  // Rank 0 sits furthest along the positive perpendicular.
  std::vector<double> raw(n, 0.0);
  double pos = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    pos -= (widths[order[k - 1]] + widths[order[k]]) / 2.0 + gap;
    raw[order[k]] = pos;
  }
  double wsum = 0.0, wo = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    wsum += widths[i];
    wo += widths[i] * raw[i];
  }
  const double shift = wsum > 0.0 ? -wo / wsum : 0.0;
  for (std::size_t i = 0; i < n; ++i) out.offsets[i] = raw[i] + shift;
  out.bundle_width = -pos + (widths[order.front()] + widths[order.back()]) / 2.0;
  return out;
}

PackPlan plan_packing(const RouteNetwork& net, const Viewport& vp, const SkeletonParams& params) {
  PackPlan plan{skeletonize(net, vp, params), {}};
  plan.subpaths = find_shared_subpaths(plan.graph);
  return plan;
}

PackedLayout layout_from_ranks(const RouteNetwork& net, const Viewport& vp, const PackPlan& plan,
                               const RankAssignment& ranks, const PackParams& params) {
  const PrunedGraph& pg = plan.graph;
  const auto on = traversals_by_segment(pg);
  PackedLayout layout;
  layout.viewport = vp;
  layout.gap = params.gap;
  for (const Edge& e : net.edges()) layout.basemap.push_back(project(e.geometry, vp));

  struct StepInfo {
    double offset = 0.0;
    int subpath = -1;
    int rank = 0;
  };
  std::vector<std::vector<StepInfo>> info(pg.walks.size());
  for (std::size_t w = 0; w < pg.walks.size(); ++w) info[w].resize(pg.walks[w].steps.size());

  for (const SubpathRanking& r : ranks) {
    const SharedSubpath& sp = plan.subpaths.at(r.subpath);
    std::vector<double> widths;
    for (const Participant& p : sp.participants) widths.push_back(params.width_of(p.route_id));
    const BundleOffsets bo = compute_offsets(r.ranks, widths, params.gap);
    for (std::size_t i = 0; i < sp.participants.size(); ++i) {
      const Participant& p = sp.participants[i];
      const std::size_t w = walk_index(pg, p.route_id);
      for (std::size_t k = p.first_step; k <= p.last_step; ++k) {
        info[w][k] = {bo.offsets[i] * (p.forward ? 1.0 : -1.0), sp.id, r.ranks[i]};
      }
    }
    if (bo.bundle_width > params.max_bundle_width) {
      ResidualItem item;
      item.kind = "over-dense";
      for (const Participant& p : sp.participants) item.routes.push_back(p.route_id);
      item.segments = sp.segments;
      item.length = bo.bundle_width;
      item.detail = "bundle wider than the maximum";
      layout.residual.push_back(std::move(item));
    }
  }

  std::vector<double> hub_reach(pg.cruxes.size(), 0.0);
  for (std::size_t wi = 0; wi < pg.walks.size(); ++wi) {
    for (std::size_t k = 0; k < pg.walks[wi].steps.size(); ++k) {
      const RouteStep& st = pg.walks[wi].steps[k];
      for (const int c : {pg.step_start_crux(st), pg.step_end_crux(st)}) {
        double& r = hub_reach[static_cast<std::size_t>(c)];
        r = std::max(r, std::abs(info[wi][k].offset));
      }
    }
  }
  for (double& r : hub_reach) r += params.transition_length;

  for (const Route& route : net.routes()) {
    const std::size_t wi = walk_index(pg, route.id);
    const RouteWalk& w = pg.walks[wi];
    const RouteGeometry g = route_geometry(pg, w);
    const std::size_t n = w.steps.size();
    LayoutRoute lr;
    lr.id = route.id;
    lr.width = params.width_of(route.id);
    lr.volumes = route.volumes;
    lr.step_s = g.step_s;

    const RouteChain& chain = net.chain(route.id);
    for (std::size_t k = 0; k < route.stops.size(); ++k) {
      lr.stops.push_back({chain.vertices[chain.stop_positions[k]], pg.cruxes[w.stop_cruxes[k]].position});
    }

    struct Zone {
      double a, b, o0, o1;
    };
    std::vector<Zone> zones;
    for (std::size_t j = 1; j < n; ++j) {
      const double o0 = info[wi][j - 1].offset, o1 = info[wi][j].offset;
      const std::size_t c0 = on[w.steps[j - 1].segment].size(), c1 = on[w.steps[j].segment].size();
      if (std::abs(o0 - o1) <= 1e-9 && c0 < 2 && c1 < 2) continue;
      // Every pass through a shared junction is cut at the same distance
      // from it, so the joining chords only cross when their ends interleave.
      const double sj = g.step_s[j];
      const double r = hub_reach[static_cast<std::size_t>(pg.step_start_crux(w.steps[j]))];
      const double before = std::min(r, (sj - g.step_s[j - 1]) / 2.0);
      const double after = std::min(r, (g.step_s[j + 1] - sj) / 2.0);
      Zone zn{sj - before, sj + after, o0, o1};
      zones.push_back(zn);
      if (zn.b > zn.a) lr.transitions.emplace_back(zn.a, zn.b);
    }

    // Each run of equal offset is offset on its own; consecutive runs are
    // joined by a straight connector across their transition zone.
    std::vector<std::pair<double, double>> pieces;
    {
      double lo = 0.0;
      for (const Zone& zn : zones) {
        pieces.emplace_back(lo, zn.a);
        lo = zn.b;
      }
      pieces.emplace_back(lo, g.cum.empty() ? 0.0 : g.cum.back());
    }
    auto offset_of_piece = [&](std::size_t p) {
      if (n == 0) return 0.0;
      const double mid = (pieces[p].first + pieces[p].second) / 2.0;
      const auto it = std::upper_bound(g.step_s.begin(), g.step_s.end(), mid);
      std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - g.step_s.begin() - 1));
      return info[wi][std::min(k, n - 1)].offset;
    };
    struct Piece {
      Polyline pts;
      std::vector<double> s;
      double d = 0.0;
    };
    std::vector<Piece> out;
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      const auto [lo, hi] = pieces[p];
      Piece pc;
      pc.d = offset_of_piece(p);
      if (g.base.size() < 2 || hi - lo < 1e-6) {
        if (g.base.empty()) continue;
        const Vec2 at = g.base.size() < 2 ? g.base.front() : point_at(g.base, g.cum, lo);
        const Vec2 t = g.base.size() < 2 ? Vec2{1.0, 0.0} : tangent_at(g.base, g.cum, lo);
        pc.pts.push_back(at + left_normal(t) * pc.d);
        pc.s.push_back(lo);
        out.push_back(std::move(pc));
        continue;
      }
      Polyline part{point_at(g.base, g.cum, lo)};
      for (std::size_t i = 0; i < g.base.size(); ++i) {
        if (g.cum[i] > lo + 1e-9 && g.cum[i] < hi - 1e-9) part.push_back(g.base[i]);
      }
      part.push_back(point_at(g.base, g.cum, hi));
      const std::vector<double> part_s = arc_lengths(part);
      const OffsetResult off = offset_polyline(part, pc.d);
      if (off.degenerate_turn) {
        ResidualItem item;
        item.kind = "degenerate-turn";
        item.routes = {route.id};
        char buf[96];
        std::snprintf(buf, sizeof buf, "turn tighter than the offset near (%.1f, %.1f)", off.degenerate_at.x,
                      off.degenerate_at.y);
        item.detail = buf;
        layout.warnings.push_back(std::move(item));
      }
      // Map arc length on the part back to the route's base.
      const double scale = part_s.back() > 0.0 ? (hi - lo) / part_s.back() : 0.0;
      for (std::size_t i = 0; i < off.points.size(); ++i) {
        pc.pts.push_back(off.points[i]);
        pc.s.push_back(std::min(hi, lo + off.source_s[i] * scale));
      }
      out.push_back(std::move(pc));
    }

    // Where a piece's tail runs into the next piece's head (the inside of a
    // sharp turn), join them there instead of drawing the connector back
    // across the neighboring lanes.
    for (std::size_t p = 0; p + 1 < out.size(); ++p) {
      Piece& u = out[p];
      Piece& v = out[p + 1];
      if (u.pts.size() < 2 || v.pts.size() < 2) continue;
      const double window = 4.0 * std::max(std::abs(u.d), std::abs(v.d)) + 2.0 * params.transition_length;
      const std::vector<double> cu = arc_lengths(u.pts), cv = arc_lengths(v.pts);
      bool cut = false;
      for (std::size_t i = 0; i + 1 < u.pts.size() && !cut; ++i) {
        if (cu.back() - cu[i + 1] > window) continue;
        for (std::size_t j = v.pts.size() - 1; j-- > 0;) {
          if (cv[j] > window) continue;
          Vec2 x;
          if (!segments_intersect(u.pts[i], u.pts[i + 1], v.pts[j], v.pts[j + 1], &x)) continue;
          const double t = distance(u.pts[i], x) / std::max(1e-12, distance(u.pts[i], u.pts[i + 1]));
          const double su = u.s[i] + (u.s[i + 1] - u.s[i]) * std::min(1.0, t);
          u.pts.resize(i + 1);
          u.s.resize(i + 1);
          u.pts.push_back(x);
          u.s.push_back(su);
          v.pts.erase(v.pts.begin(), v.pts.begin() + static_cast<std::ptrdiff_t>(j + 1));
          v.s.erase(v.s.begin(), v.s.begin() + static_cast<std::ptrdiff_t>(j + 1));
          cut = true;
          break;
        }
      }
    }

    for (const Piece& pc : out) {
      for (std::size_t i = 0; i < pc.pts.size(); ++i) {
        const double src = std::max(pc.s[i], lr.path_s.empty() ? 0.0 : lr.path_s.back());
        if (!lr.path.empty() && distance(lr.path.back(), pc.pts[i]) < 1e-9) {
          lr.path_s.back() = std::max(lr.path_s.back(), src);
          continue;
        }
        lr.path.push_back(pc.pts[i]);
        lr.path_s.push_back(src);
      }
    }

    std::size_t idx = 0;
    for (std::size_t k = 0; k < n; ++k) {
      Stroke st;
      st.segment = w.steps[k].segment;
      st.step = k;
      st.leg = static_cast<std::size_t>(std::upper_bound(w.leg_starts.begin(), w.leg_starts.end(), k) -
                                        w.leg_starts.begin() - 1);
      st.subpath = info[wi][k].subpath;
      st.rank = info[wi][k].rank;
      st.offset = info[wi][k].offset;
      const double end = g.step_s[k + 1];
      const bool last = k + 1 == n;
      while (idx < lr.path.size() && (last || lr.path_s[idx] < end)) {
        st.points.push_back(lr.path[idx]);
        st.source_s.push_back(lr.path_s[idx]);
        ++idx;
      }
      if (idx < lr.path.size()) {
        st.points.push_back(lr.path[idx]);
        st.source_s.push_back(lr.path_s[idx]);
      }
      lr.strokes.push_back(std::move(st));
    }
    layout.routes.push_back(std::move(lr));
  }
  return layout;
}

std::vector<ResidualItem> find_residual_overlaps(const PackedLayout& layout, const PackPlan& plan,
                                                 const PackParams& params) {
  const PrunedGraph& pg = plan.graph;
  const double half = pg.coverage_tolerance - 1.5;
  const std::size_t nr = layout.routes.size();

  // Crux neighborhoods scale with the widest bundle meeting there.
  std::vector<double> crux_radius(pg.cruxes.size(), 2.0 * half);
  for (const LayoutRoute& r : layout.routes) {
    for (const Stroke& st : r.strokes) {
      const Segment& seg = pg.segments[st.segment];
      const double extent = 2.0 * half + std::abs(st.offset) + r.width / 2.0;
      crux_radius[seg.crux_a] = std::max(crux_radius[seg.crux_a], extent);
      crux_radius[seg.crux_b] = std::max(crux_radius[seg.crux_b], extent);
    }
  }
  auto excluded = [&](const LayoutRoute& r, Vec2 p, double s) {
    if (in_zone(s, r.transitions, 1.0)) return true;
    for (std::size_t c = 0; c < pg.cruxes.size(); ++c) {
      if (distance(p, pg.cruxes[c].position) < crux_radius[c]) return true;
    }
    return false;
  };
  auto stroke_segment_at = [](const LayoutRoute& r, double s) {
    const auto it = std::upper_bound(r.step_s.begin(), r.step_s.end(), s);
    std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - r.step_s.begin() - 1));
    if (r.strokes.empty()) return -1;
    return r.strokes[std::min(k, r.strokes.size() - 1)].segment;
  };

  // Spatial hash of path pieces.
  constexpr double kCell = 16.0;
  struct Piece {
    std::size_t route, index;
  };
  std::map<std::pair<int, int>, std::vector<Piece>> grid;
  double max_width = 0.0;
  for (std::size_t ri = 0; ri < nr; ++ri) {
    const Polyline& p = layout.routes[ri].path;
    max_width = std::max(max_width, layout.routes[ri].width);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      const int x0 = static_cast<int>(std::floor(std::min(p[i].x, p[i + 1].x) / kCell));
      const int x1 = static_cast<int>(std::floor(std::max(p[i].x, p[i + 1].x) / kCell));
      const int y0 = static_cast<int>(std::floor(std::min(p[i].y, p[i + 1].y) / kCell));
      const int y1 = static_cast<int>(std::floor(std::max(p[i].y, p[i + 1].y) / kCell));
      for (int x = x0; x <= x1; ++x) {
        for (int y = y0; y <= y1; ++y) grid[{x, y}].push_back({ri, i});
      }
    }
  }

  constexpr double kSpacing = 2.0;
  constexpr double kMinRun = 8.0;
  struct Acc {
    double length = 0.0;
    std::set<int> segments;
    Vec2 at{0.0, 0.0};
  };
  std::map<std::pair<std::size_t, std::size_t>, Acc> found;
  for (std::size_t ri = 0; ri < nr; ++ri) {
    const LayoutRoute& r = layout.routes[ri];
    if (r.path.size() < 2) continue;
    const std::vector<double> cum = arc_lengths(r.path);
    const double total = cum.back();
    std::vector<int> run_len(nr, 0);
    std::vector<std::set<int>> run_segs(nr);
    std::vector<Vec2> run_start(nr);
    auto flush = [&](std::size_t rj) {
      const double len = run_len[rj] * kSpacing;
      if (len >= kMinRun) {
        Acc& acc = found[std::minmax(ri, rj)];
        if (len > acc.length) {
          acc.length = len;
          acc.at = run_start[rj];
        }
        acc.segments.insert(run_segs[rj].begin(), run_segs[rj].end());
      }
      run_len[rj] = 0;
      run_segs[rj].clear();
    };
    for (double t = 0.0; t <= total; t += kSpacing) {
      const auto it = std::upper_bound(cum.begin(), cum.end(), t);
      const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()) - 1, r.path.size() - 2);
      const double seg_len = cum[i + 1] - cum[i];
      const double u = seg_len > 0.0 ? (t - cum[i]) / seg_len : 0.0;
      const Vec2 p = r.path[i] + (r.path[i + 1] - r.path[i]) * u;
      const double s = r.path_s[i] + (r.path_s[i + 1] - r.path_s[i]) * u;
      std::vector<bool> hit(nr, false);
      if (!excluded(r, p, s)) {
        const double reach = (r.width + max_width) / 2.0 + layout.gap;
        std::vector<double> best(nr, std::numeric_limits<double>::infinity());
        std::vector<double> best_s(nr, 0.0);
        std::vector<Vec2> best_q(nr);
        const int cx0 = static_cast<int>(std::floor((p.x - reach) / kCell));
        const int cx1 = static_cast<int>(std::floor((p.x + reach) / kCell));
        const int cy0 = static_cast<int>(std::floor((p.y - reach) / kCell));
        const int cy1 = static_cast<int>(std::floor((p.y + reach) / kCell));
        for (int x = cx0; x <= cx1; ++x) {
          for (int y = cy0; y <= cy1; ++y) {
            const auto cell = grid.find({x, y});
            if (cell == grid.end()) continue;
            for (const Piece& pc : cell->second) {
              if (pc.route == ri) continue;
              const LayoutRoute& o = layout.routes[pc.route];
              const Vec2 a = o.path[pc.index], b = o.path[pc.index + 1];
              const Vec2 ab = b - a;
              const double l2 = dot(ab, ab);
              const double v = l2 > 0.0 ? std::clamp(dot(p - a, ab) / l2, 0.0, 1.0) : 0.0;
              const Vec2 q = a + ab * v;
              const double d = distance(p, q);
              if (d < best[pc.route]) {
                best[pc.route] = d;
                best_q[pc.route] = q;
                best_s[pc.route] = o.path_s[pc.index] + (o.path_s[pc.index + 1] - o.path_s[pc.index]) * v;
              }
            }
          }
        }
        for (std::size_t rj = 0; rj < nr; ++rj) {
          if (rj == ri || !std::isfinite(best[rj])) continue;
          const LayoutRoute& o = layout.routes[rj];
          const double required = (r.width + o.width) / 2.0 + layout.gap;
          if (best[rj] < required - 0.5 && !excluded(o, best_q[rj], best_s[rj])) {
            hit[rj] = true;
            if (run_len[rj] == 0) run_start[rj] = p;
            ++run_len[rj];
            run_segs[rj].insert(stroke_segment_at(r, s));
            run_segs[rj].insert(stroke_segment_at(o, best_s[rj]));
          }
        }
      }
      for (std::size_t rj = 0; rj < nr; ++rj) {
        if (!hit[rj] && run_len[rj] > 0) flush(rj);
      }
    }
    for (std::size_t rj = 0; rj < nr; ++rj) {
      if (run_len[rj] > 0) flush(rj);
    }
  }
  (void)params;

  std::vector<ResidualItem> out;
  for (const auto& [key, acc] : found) {
    ResidualItem item;
    item.kind = "overlap";
    item.routes = {layout.routes[key.first].id, layout.routes[key.second].id};
    for (int s : acc.segments) {
      if (s >= 0) item.segments.push_back(s);
    }
    item.length = acc.length;
    char buf[96];
    std::snprintf(buf, sizeof buf, "strokes closer than the required separation from (%.1f, %.1f)", acc.at.x,
                  acc.at.y);
    item.detail = buf;
    out.push_back(std::move(item));
  }
  return out;
}

PackedLayout pack(const RouteNetwork& net, const Viewport& vp, const PackParams& params) {
  PackParams cur = params;
  std::optional<PackedLayout> best;
  double best_overlap = std::numeric_limits<double>::infinity();
  for (int it = 0; it < std::max(1, params.max_iterations); ++it) {
    PackPlan plan;
    try {
      plan = plan_packing(net, vp, cur.skeleton);
    } catch (const CoverageError&) {
      if (!best) throw;
      break;
    }
    const RankAssignment ranks = rank_routes(plan.graph, plan.subpaths, cur.angle_probe);
    PackedLayout layout = layout_from_ranks(net, vp, plan, ranks, cur);
    const std::vector<ResidualItem> overlaps = find_residual_overlaps(layout, plan, cur);
    double total = 0.0;
    for (const ResidualItem& item : overlaps) total += item.length;
    layout.residual.insert(layout.residual.end(), overlaps.begin(), overlaps.end());
    layout.iterations = it + 1;
    if (total <= best_overlap) {
      best_overlap = total;
      best = std::move(layout);
    }
    if (overlaps.empty()) break;
    cur.skeleton.bandwidth *= cur.bandwidth_growth;
  }
  best->crossings = count_crossings(*best);
  return *best;
}

int brute_force_min_crossings(const PackPlan& plan, const RouteNetwork& net, const Viewport& vp,
                              const PackParams& params) {
  double product = 1.0;
  for (const SharedSubpath& sp : plan.subpaths) {
    const std::size_t k = sp.participants.size();
    if (k > 7) throw OracleSizeError("subpath with " + std::to_string(k) + " passes is too large to enumerate");
    for (std::size_t i = 2; i <= k; ++i) product *= static_cast<double>(i);
  }
  if (product > 1e6) throw OracleSizeError("rank permutation space exceeds one million");

  RankAssignment ranks;
  for (const SharedSubpath& sp : plan.subpaths) {
    SubpathRanking r;
    r.subpath = sp.id;
    r.ranks.resize(sp.participants.size());
    std::iota(r.ranks.begin(), r.ranks.end(), 0);
    r.deltas.assign(sp.participants.size(), 0.0);
    ranks.push_back(std::move(r));
  }
  int best = std::numeric_limits<int>::max();
  for (;;) {
    best = std::min(best, count_crossings(layout_from_ranks(net, vp, plan, ranks, params)));
    // Odometer over per-subpath permutations.
    std::size_t i = 0;
    for (; i < ranks.size(); ++i) {
      if (std::next_permutation(ranks[i].ranks.begin(), ranks[i].ranks.end())) break;
    }
    if (i == ranks.size()) break;
  }
  return best;
}

std::vector<SeparationSample> shared_separations(const PackedLayout& layout) {
  // Pieces of a stroke that lie outside the route's transition zones.
  auto pieces = [](const LayoutRoute& r, const Stroke& st) {
    std::vector<Polyline> out;
    Polyline cur;
    for (std::size_t i = 0; i + 1 < st.points.size(); ++i) {
      const double mid = st.source_s.empty() ? 0.0 : (st.source_s[i] + st.source_s[i + 1]) / 2.0;
      const bool keep = st.source_s.empty() || !in_zone(mid, r.transitions, 0.0);
      if (keep) {
        if (cur.empty()) cur.push_back(st.points[i]);
        cur.push_back(st.points[i + 1]);
      } else if (!cur.empty()) {
        out.push_back(std::move(cur));
        cur.clear();
      }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
  };
  std::vector<SeparationSample> out;
  for (std::size_t a = 0; a < layout.routes.size(); ++a) {
    for (std::size_t b = a + 1; b < layout.routes.size(); ++b) {
      const LayoutRoute& ra = layout.routes[a];
      const LayoutRoute& rb = layout.routes[b];
      for (const Stroke& sa : ra.strokes) {
        for (const Stroke& sb : rb.strokes) {
          if (sa.segment != sb.segment) continue;
          double best = std::numeric_limits<double>::infinity();
          for (const Polyline& pa : pieces(ra, sa)) {
            for (const Polyline& pb : pieces(rb, sb)) best = std::min(best, polyline_distance(pa, pb));
          }
          if (!std::isfinite(best)) continue;
          out.push_back({ra.id, rb.id, sa.segment, best, (ra.width + rb.width) / 2.0 + layout.gap});
        }
      }
    }
  }
  return out;
}

}  // namespace routepack
