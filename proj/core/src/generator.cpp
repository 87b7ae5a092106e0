#include "routepack/generator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <set>

namespace routepack {

namespace {

// Library distributions differ between standard libraries; these do not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [lo, hi].
  int integer(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return lo + static_cast<int>(v % span);
  }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(integer(0, static_cast<int>(i) - 1))]);
  }

 private:
  std::mt19937_64 eng_;
};

double round7(double v) { return std::round(v * 1e7) / 1e7; }

struct Road {
  int a, b;
};

struct Graph {
  std::vector<GeoPoint> pts;
  std::vector<Road> roads;
  std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbor, road)

  void rebuild() {
    adj.assign(pts.size(), {});
    for (std::size_t r = 0; r < roads.size(); ++r) {
      adj[roads[r].a].emplace_back(roads[r].b, static_cast<int>(r));
      adj[roads[r].b].emplace_back(roads[r].a, static_cast<int>(r));
    }
  }
  double length(int r) const {
    const GeoPoint& p = pts[roads[r].a];
    const GeoPoint& q = pts[roads[r].b];
    return std::hypot(p.lon - q.lon, p.lat - q.lat);
  }
};

bool connected_without(const Graph& g, int skip, const std::vector<bool>& dead) {
  std::vector<bool> seen(g.pts.size(), false);
  std::vector<int> stack = {0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (auto [w, r] : g.adj[v]) {
      if (r == skip || dead[r] || seen[w]) continue;
      seen[w] = true;
      ++count;
      stack.push_back(w);
    }
  }
  return count == g.pts.size();
}

// Shortest road path as (vertices, roads); `blocked` vertices are avoided.
std::pair<std::vector<int>, std::vector<int>> shortest_path(const Graph& g, int from, int to,
                                                            const std::vector<bool>& blocked) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.pts.size(), inf);
  std::vector<int> prev_road(g.pts.size(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[from] = 0.0;
  pq.push({0.0, from});
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    if (v == to) break;
    for (auto [w, r] : g.adj[v]) {
      if (blocked[w] && w != to) continue;
      const double nd = d + g.length(r);
      if (nd < dist[w] - 1e-15) {
        dist[w] = nd;
        prev_road[w] = r;
        pq.push({nd, w});
      }
    }
  }
  if (!std::isfinite(dist[to])) return {};
  std::vector<int> verts = {to}, roads;
  for (int v = to; v != from;) {
    const int r = prev_road[v];
    roads.push_back(r);
    v = g.roads[r].a == v ? g.roads[r].b : g.roads[r].a;
    verts.push_back(v);
  }
  std::reverse(verts.begin(), verts.end());
  std::reverse(roads.begin(), roads.end());
  return {verts, roads};
}

std::string vid(int i) { return "v" + std::to_string(i); }
std::string eid(int i) { return "e" + std::to_string(i); }

}  // namespace

void GenParams::validate() const {
  if (nodes < 2) throw ValidationError("gen: need at least 2 nodes");
  if (routes_min < 1 || routes_min > routes_max) throw ValidationError("gen: empty route count range");
  if (stops_min < 2 || stops_min > stops_max) throw ValidationError("gen: empty stops range");
  if (stops_min > nodes) {
    throw ValidationError("gen: " + std::to_string(stops_min) + " stops per route need more than " +
                          std::to_string(nodes) + " nodes");
  }
  if (grid != 0 && grid * grid < nodes) throw ValidationError("gen: road grid smaller than the node count");
  if (removal < 0.0 || removal >= 1.0) throw ValidationError("gen: removal share must be in [0, 1)");
}

RouteNetwork generate_network(const GenParams& params) {
  params.validate();
  Rng rng(params.seed);
  const int n = params.grid > 0 ? params.grid : std::max(6, static_cast<int>(std::ceil(std::sqrt(params.nodes * 4.0))));
  const double cell = 1.0 / n;

  Graph g;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      g.pts.push_back({round7((x + 0.5 + rng.uniform(-0.25, 0.25)) * cell),
                       round7((y + 0.5 + rng.uniform(-0.25, 0.25)) * cell)});
    }
  }
  auto at = [n](int x, int y) { return y * n + x; };
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (x + 1 < n) g.roads.push_back({at(x, y), at(x + 1, y)});
      if (y + 1 < n) g.roads.push_back({at(x, y), at(x, y + 1)});
      if (x + 1 < n && y + 1 < n) {
        if (rng.uniform() < 0.5) {
          g.roads.push_back({at(x, y), at(x + 1, y + 1)});
        } else {
          g.roads.push_back({at(x + 1, y), at(x, y + 1)});
        }
      }
    }
  }
  g.rebuild();
  // Thin the grid while it stays connected.
  std::vector<int> order(g.roads.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const auto drop = static_cast<std::size_t>(params.removal * static_cast<double>(g.roads.size()));
  std::vector<bool> dead(g.roads.size(), false);
  std::size_t removed = 0;
  for (int r : order) {
    if (removed >= drop) break;
    if (connected_without(g, r, dead)) {
      dead[r] = true;
      ++removed;
    }
  }
  std::vector<Road> kept;
  for (std::size_t r = 0; r < g.roads.size(); ++r) {
    if (!dead[r]) kept.push_back(g.roads[r]);
  }
  g.roads = std::move(kept);
  g.rebuild();

  // Major nodes and a connected node graph: MST on road distance plus a few
  // shortcuts.
  std::vector<int> cells(g.pts.size());
  std::iota(cells.begin(), cells.end(), 0);
  rng.shuffle(cells);
  std::vector<int> majors(cells.begin(), cells.begin() + params.nodes);
  std::sort(majors.begin(), majors.end());
  const std::size_t m = majors.size();
  const std::vector<bool> none(g.pts.size(), false);
  std::vector<std::vector<double>> dist(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      double d = 0.0;
      for (int r : shortest_path(g, majors[i], majors[j], none).second) d += g.length(r);
      dist[i][j] = dist[j][i] = d;
    }
  }
  std::vector<std::set<std::size_t>> node_adj(m);
  {
    std::vector<bool> in(m, false);
    std::vector<double> best(m, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> parent(m, 0);
    best[0] = 0.0;
    for (std::size_t it = 0; it < m; ++it) {
      std::size_t u = m;
      for (std::size_t v = 0; v < m; ++v) {
        if (!in[v] && (u == m || best[v] < best[u])) u = v;
      }
      in[u] = true;
      if (it > 0) {
        node_adj[u].insert(parent[u]);
        node_adj[parent[u]].insert(u);
      }
      for (std::size_t v = 0; v < m; ++v) {
        if (!in[v] && dist[u][v] < best[v]) {
          best[v] = dist[u][v];
          parent[v] = u;
        }
      }
    }
    const int extra = std::max(1, static_cast<int>(m) / 3);
    for (int k = 0; k < extra; ++k) {
      const auto i = static_cast<std::size_t>(rng.integer(0, static_cast<int>(m) - 1));
      std::size_t best_j = m;
      for (std::size_t j = 0; j < m; ++j) {
        if (j == i || node_adj[i].contains(j)) continue;
        if (best_j == m || dist[i][j] < dist[i][best_j]) best_j = j;
      }
      if (best_j < m) {
        node_adj[i].insert(best_j);
        node_adj[best_j].insert(i);
      }
    }
  }

  // Routes: random simple walks over the node graph whose road paths do not
  // revisit a vertex.
  std::vector<Route> routes;
  const int route_count = rng.integer(params.routes_min, params.routes_max);
  for (int r = 0; r < route_count; ++r) {
    bool done = false;
    for (int attempt = 0; attempt < 500 && !done; ++attempt) {
      const int want = rng.integer(params.stops_min, params.stops_max);
      std::vector<std::size_t> walk = {static_cast<std::size_t>(rng.integer(0, static_cast<int>(m) - 1))};
      std::vector<bool> used(g.pts.size(), false);
      std::vector<int> path_verts = {majors[walk[0]]};
      std::vector<int> path_roads;
      used[majors[walk[0]]] = true;
      bool stuck = false;
      while (static_cast<int>(walk.size()) < want && !stuck) {
        std::vector<std::size_t> options;
        for (std::size_t nb : node_adj[walk.back()]) {
          if (std::find(walk.begin(), walk.end(), nb) == walk.end()) options.push_back(nb);
        }
        rng.shuffle(options);
        stuck = true;
        for (std::size_t nb : options) {
          auto [verts, roads] = shortest_path(g, majors[walk.back()], majors[nb], used);
          if (roads.empty()) continue;
          for (std::size_t k = 1; k < verts.size(); ++k) used[verts[k]] = true;
          path_verts.insert(path_verts.end(), verts.begin() + 1, verts.end());
          path_roads.insert(path_roads.end(), roads.begin(), roads.end());
          walk.push_back(nb);
          stuck = false;
          break;
        }
      }
      if (static_cast<int>(walk.size()) < want) continue;
      Route route;
      route.id = "r" + std::to_string(r + 1);
      for (std::size_t k : walk) route.stops.push_back(vid(majors[k]));
      for (int rd : path_roads) route.path.push_back(eid(rd));
      routes.push_back(std::move(route));
      done = true;
    }
    if (!done) throw ValidationError("gen: could not place route " + std::to_string(r + 1) + " on the node graph");
  }

  std::vector<Vertex> vertices;
  const std::set<int> major_set(majors.begin(), majors.end());
  for (std::size_t i = 0; i < g.pts.size(); ++i) {
    Vertex v;
    v.id = vid(static_cast<int>(i));
    v.position = g.pts[i];
    if (major_set.contains(static_cast<int>(i))) {
      v.kind = VertexKind::kMajor;
      v.label = "N" + std::to_string(std::distance(majors.begin(), std::find(majors.begin(), majors.end(), static_cast<int>(i))) + 1);
    } else {
      v.kind = VertexKind::kWaypoint;
    }
    vertices.push_back(std::move(v));
  }
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < g.roads.size(); ++r) {
    const Road& rd = g.roads[r];
    edges.push_back({eid(static_cast<int>(r)), vid(rd.a), vid(rd.b), {g.pts[rd.a], g.pts[rd.b]}});
  }
  return RouteNetwork(std::move(vertices), std::move(edges), std::move(routes));
}

std::vector<Trial> trials(const RouteNetwork& net) {
  std::vector<std::string> majors;
  for (const Vertex& v : net.vertices()) {
    if (v.kind == VertexKind::kMajor) majors.push_back(v.id);
  }
  std::vector<Trial> out;
  for (std::size_t i = 0; i < majors.size(); ++i) {
    for (std::size_t j = i + 1; j < majors.size(); ++j) {
      bool linked = false;
      for (const Route& r : net.routes()) {
        const bool a = std::find(r.stops.begin(), r.stops.end(), majors[i]) != r.stops.end();
        const bool b = std::find(r.stops.begin(), r.stops.end(), majors[j]) != r.stops.end();
        linked = linked || (a && b);
      }
      out.push_back({majors[i], majors[j], linked});
    }
  }
  return out;
}

RouteNetwork generate_corridor(int routes, std::uint64_t seed) {
  if (routes < 1 || routes > 7) throw ValidationError("corridor: 1 to 7 routes");
  Rng rng(seed);
  // Candidate spoke angles relative to straight ahead, 40 degrees apart.
  std::vector<int> out_angles = {-120, -80, -40, 0, 40, 80, 120};
  std::vector<int> in_angles = out_angles;
  rng.shuffle(out_angles);
  rng.shuffle(in_angles);
  const double jitter_out = rng.uniform(-8.0, 8.0);
  const double jitter_in = rng.uniform(-8.0, 8.0);

  const GeoPoint p{0.35, 0.0}, q{0.65, 0.0};
  constexpr double kSpoke = 0.15;
  std::vector<Vertex> vertices = {{"P", p, std::nullopt, VertexKind::kWaypoint}, {"Q", q, std::nullopt, VertexKind::kWaypoint}};
  std::vector<Edge> edges = {{"corridor", "P", "Q", {p, q}}};
  std::vector<Route> rs;
  for (int r = 0; r < routes; ++r) {
    const std::string id = "r" + std::to_string(r + 1);
    // Entry spokes fan out behind P, exit spokes ahead of Q.
    const double a_in = (180.0 - in_angles[r] - jitter_in) * kPi / 180.0;
    const double a_out = (out_angles[r] + jitter_out) * kPi / 180.0;
    const GeoPoint s{round7(p.lon + kSpoke * std::cos(a_in)), round7(p.lat + kSpoke * std::sin(a_in))};
    const GeoPoint t{round7(q.lon + kSpoke * std::cos(a_out)), round7(q.lat + kSpoke * std::sin(a_out))};
    vertices.push_back({"S" + std::to_string(r + 1), s, std::nullopt, VertexKind::kMajor});
    vertices.push_back({"T" + std::to_string(r + 1), t, std::nullopt, VertexKind::kMajor});
    edges.push_back({"in" + std::to_string(r + 1), "S" + std::to_string(r + 1), "P", {s, p}});
    edges.push_back({"out" + std::to_string(r + 1), "Q", "T" + std::to_string(r + 1), {q, t}});
    rs.push_back({id,
                  {"S" + std::to_string(r + 1), "T" + std::to_string(r + 1)},
                  {"in" + std::to_string(r + 1), "corridor", "out" + std::to_string(r + 1)},
                  std::nullopt});
  }
  return RouteNetwork(std::move(vertices), std::move(edges), std::move(rs));
}

}  // namespace routepack
