#include "routepack/network.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <set>

#include "json.hpp"

namespace routepack {

using nlohmann::json;

namespace {

bool valid_geo(const GeoPoint& p) {
  return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 && p.lon <= 180.0 &&
         p.lat > -kMaxMercatorLat && p.lat < kMaxMercatorLat;
}

bool same_geo(const GeoPoint& a, const GeoPoint& b) {
  return std::abs(a.lon - b.lon) <= kEndpointTolerance && std::abs(a.lat - b.lat) <= kEndpointTolerance;
}

template <class T>
std::unordered_map<std::string, std::size_t> index_by_id(const std::vector<T>& items, const char* what) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].id.empty()) throw ValidationError(std::string("empty ") + what + " id");
    if (!index.emplace(items[i].id, i).second) {
      throw ValidationError(std::string("duplicate ") + what + " id " + items[i].id);
    }
  }
  return index;
}

}  // namespace

RouteNetwork::RouteNetwork(std::vector<Vertex> vertices, std::vector<Edge> edges, std::vector<Route> routes)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), routes_(std::move(routes)) {
  vertex_index_ = index_by_id(vertices_, "vertex");
  edge_index_ = index_by_id(edges_, "edge");
  route_index_ = index_by_id(routes_, "route");

  for (const Vertex& v : vertices_) {
    if (!valid_geo(v.position)) throw ValidationError("vertex " + v.id + " has out-of-range coordinates");
  }

  for (const Edge& e : edges_) {
    if (!vertex_index_.contains(e.from)) throw ValidationError("edge " + e.id + " references unknown vertex " + e.from);
    if (!vertex_index_.contains(e.to)) throw ValidationError("edge " + e.id + " references unknown vertex " + e.to);
    if (e.geometry.size() < 2) throw ValidationError("edge " + e.id + " geometry needs at least 2 points");
    for (std::size_t i = 0; i < e.geometry.size(); ++i) {
      if (!valid_geo(e.geometry[i])) throw ValidationError("edge " + e.id + " has out-of-range coordinates");
      if (i > 0 && e.geometry[i] == e.geometry[i - 1]) {
        throw ValidationError("edge " + e.id + " has repeated consecutive points");
      }
    }
    if (!same_geo(e.geometry.front(), vertex(e.from).position) ||
        !same_geo(e.geometry.back(), vertex(e.to).position)) {
      throw ValidationError("edge " + e.id + " geometry does not start/end at its vertices");
    }
  }

  chains_.reserve(routes_.size());
  for (const Route& r : routes_) {
    if (r.stops.size() < 2) throw ValidationError("route " + r.id + " needs at least 2 stops");
    if (r.path.empty()) throw ValidationError("route " + r.id + " has an empty path");
    for (const std::string& s : r.stops) {
      if (!vertex_index_.contains(s)) throw ValidationError("route " + r.id + " references unknown vertex " + s);
    }
    for (const std::string& e : r.path) {
      if (!edge_index_.contains(e)) throw ValidationError("route " + r.id + " references unknown edge " + e);
    }
    if (r.volumes) {
      if (r.volumes->size() != r.stops.size() - 1) {
        throw ValidationError("route " + r.id + " has " + std::to_string(r.volumes->size()) +
                              " volumes for " + std::to_string(r.stops.size() - 1) + " legs");
      }
      for (double v : *r.volumes) {
        if (!std::isfinite(v) || v <= 0.0) throw ValidationError("route " + r.id + " has a non-positive volume");
      }
    }

    RouteChain chain;
    std::string current = r.stops.front();
    chain.vertices.push_back(current);
    chain.stop_positions.push_back(0);
    std::size_t next_stop = 1;
    std::string last_stop = current;
    for (std::size_t i = 0; i < r.path.size(); ++i) {
      const Edge& e = edge(r.path[i]);
      bool reversed = false;
      if (e.from == current) {
        current = e.to;
      } else if (e.to == current) {
        current = e.from;
        reversed = true;
      } else {
        if (i == 0) {
          throw ValidationError("route " + r.id + " path does not start at its first stop " + r.stops.front());
        }
        throw ValidationError("disconnected route path " + r.id + " at " + last_stop + ": edge " + e.id +
                              " does not continue from vertex " + current);
      }
      chain.vertices.push_back(current);
      chain.reversed.push_back(reversed);
      const bool is_last_edge = i + 1 == r.path.size();
      const bool final_stop = next_stop + 1 == r.stops.size();
      if (next_stop < r.stops.size() && current == r.stops[next_stop] && (!final_stop || is_last_edge)) {
        chain.stop_positions.push_back(i + 1);
        last_stop = current;
        ++next_stop;
      }
    }
    if (next_stop != r.stops.size()) {
      throw ValidationError("route " + r.id + " stop " + r.stops[next_stop] + " does not lie on its path in order");
    }
    chains_.push_back(std::move(chain));
  }
}

const Vertex& RouteNetwork::vertex(std::string_view id) const {
  const auto it = vertex_index_.find(std::string(id));
  if (it == vertex_index_.end()) throw ValidationError("unknown vertex " + std::string(id));
  return vertices_[it->second];
}

const Edge& RouteNetwork::edge(std::string_view id) const {
  const auto it = edge_index_.find(std::string(id));
  if (it == edge_index_.end()) throw ValidationError("unknown edge " + std::string(id));
  return edges_[it->second];
}

const Route& RouteNetwork::route(std::string_view id) const {
  const auto it = route_index_.find(std::string(id));
  if (it == route_index_.end()) throw ValidationError("unknown route " + std::string(id));
  return routes_[it->second];
}

const RouteChain& RouteNetwork::chain(std::string_view route_id) const {
  const auto it = route_index_.find(std::string(route_id));
  if (it == route_index_.end()) throw ValidationError("unknown route " + std::string(route_id));
  return chains_[it->second];
}

// ---------------------------------------------------------------------------
// JSON ingestion

namespace {

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ParseError(path + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) throw ParseError(path + "." + key + ": unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + "." + key + ": missing required field");
  return *it;
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ParseError(path + ": expected a string");
  return v.get<std::string>();
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(path + ": expected a finite number");
  return d;
}

const json& get_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(path + ": expected an array");
  return v;
}

std::vector<std::string> get_string_list(const json& v, const std::string& path) {
  std::vector<std::string> out;
  const json& arr = get_array(v, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(get_string(arr[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace

RouteNetwork parse_network(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("$: malformed JSON: ") + e.what());
  }
  reject_unknown(doc, "$", {"crs", "vertices", "edges", "routes"});
  if (get_string(require(doc, "$", "crs"), "$.crs") != "EPSG:4326") {
    throw ParseError("$.crs: must be \"EPSG:4326\"");
  }

  std::vector<Vertex> vertices;
  const json& jv = get_array(require(doc, "$", "vertices"), "$.vertices");
  for (std::size_t i = 0; i < jv.size(); ++i) {
    const std::string p = "$.vertices[" + std::to_string(i) + "]";
    reject_unknown(jv[i], p, {"id", "lon", "lat", "label", "kind"});
    Vertex v;
    v.id = get_string(require(jv[i], p, "id"), p + ".id");
    v.position.lon = get_number(require(jv[i], p, "lon"), p + ".lon");
    v.position.lat = get_number(require(jv[i], p, "lat"), p + ".lat");
    if (jv[i].contains("label")) v.label = get_string(jv[i]["label"], p + ".label");
    if (jv[i].contains("kind")) {
      const std::string kind = get_string(jv[i]["kind"], p + ".kind");
      if (kind == "major") {
        v.kind = VertexKind::kMajor;
      } else if (kind == "waypoint") {
        v.kind = VertexKind::kWaypoint;
      } else {
        throw ParseError(p + ".kind: expected \"major\" or \"waypoint\"");
      }
    }
    vertices.push_back(std::move(v));
  }

  std::vector<Edge> edges;
  const json& je = get_array(require(doc, "$", "edges"), "$.edges");
  for (std::size_t i = 0; i < je.size(); ++i) {
    const std::string p = "$.edges[" + std::to_string(i) + "]";
    reject_unknown(je[i], p, {"id", "from", "to", "geometry"});
    Edge e;
    e.id = get_string(require(je[i], p, "id"), p + ".id");
    e.from = get_string(require(je[i], p, "from"), p + ".from");
    e.to = get_string(require(je[i], p, "to"), p + ".to");
    const json& geom = get_array(require(je[i], p, "geometry"), p + ".geometry");
    for (std::size_t k = 0; k < geom.size(); ++k) {
      const std::string gp = p + ".geometry[" + std::to_string(k) + "]";
      if (!geom[k].is_array() || geom[k].size() != 2) throw ParseError(gp + ": expected [lon, lat]");
      e.geometry.push_back({get_number(geom[k][0], gp + "[0]"), get_number(geom[k][1], gp + "[1]")});
    }
    edges.push_back(std::move(e));
  }

  std::vector<Route> routes;
  const json& jr = get_array(require(doc, "$", "routes"), "$.routes");
  for (std::size_t i = 0; i < jr.size(); ++i) {
    const std::string p = "$.routes[" + std::to_string(i) + "]";
    reject_unknown(jr[i], p, {"id", "stops", "path", "volumes"});
    Route r;
    r.id = get_string(require(jr[i], p, "id"), p + ".id");
    r.stops = get_string_list(require(jr[i], p, "stops"), p + ".stops");
    r.path = get_string_list(require(jr[i], p, "path"), p + ".path");
    if (jr[i].contains("volumes")) {
      const json& vols = get_array(jr[i]["volumes"], p + ".volumes");
      std::vector<double> v;
      for (std::size_t k = 0; k < vols.size(); ++k) {
        v.push_back(get_number(vols[k], p + ".volumes[" + std::to_string(k) + "]"));
      }
      r.volumes = std::move(v);
    }
    routes.push_back(std::move(r));
  }

  return RouteNetwork(std::move(vertices), std::move(edges), std::move(routes));
}

std::string serialize_network(const RouteNetwork& net) {
  json doc;
  doc["crs"] = "EPSG:4326";
  json vertices = json::array();
  for (const Vertex& v : net.vertices()) {
    json jv = {{"id", v.id}, {"lon", v.position.lon}, {"lat", v.position.lat}};
    if (v.label) jv["label"] = *v.label;
    jv["kind"] = v.kind == VertexKind::kMajor ? "major" : "waypoint";
    vertices.push_back(std::move(jv));
  }
  json edges = json::array();
  for (const Edge& e : net.edges()) {
    json geom = json::array();
    for (const GeoPoint& g : e.geometry) geom.push_back({g.lon, g.lat});
    edges.push_back({{"id", e.id}, {"from", e.from}, {"to", e.to}, {"geometry", std::move(geom)}});
  }
  json routes = json::array();
  for (const Route& r : net.routes()) {
    json jr = {{"id", r.id}, {"stops", r.stops}, {"path", r.path}};
    if (r.volumes) jr["volumes"] = *r.volumes;
    routes.push_back(std::move(jr));
  }
  doc["vertices"] = std::move(vertices);
  doc["edges"] = std::move(edges);
  doc["routes"] = std::move(routes);
  return doc.dump(2) + "\n";
}

std::vector<Leg> legs_of(const RouteNetwork& net, const Route& route) {
  const RouteChain& chain = net.chain(route.id);
  std::vector<Leg> legs;
  for (std::size_t k = 0; k + 1 < route.stops.size(); ++k) {
    Leg leg{route.id, route.stops[k], route.stops[k + 1], {}};
    for (std::size_t i = chain.stop_positions[k]; i < chain.stop_positions[k + 1]; ++i) {
      leg.edges.push_back(route.path[i]);
    }
    legs.push_back(std::move(leg));
  }
  return legs;
}

std::vector<GeoPoint> oriented_geometry(const Edge& edge, bool reversed) {
  std::vector<GeoPoint> g = edge.geometry;
  if (reversed) std::reverse(g.begin(), g.end());
  return g;
}

// ---------------------------------------------------------------------------
// Projection

namespace {

struct Mercator {
  double x;
  double y;
};

// Normalized Web Mercator in [0,1]^2 with y growing southwards.
Mercator mercator(const GeoPoint& p) {
  const double lat = p.lat * kPi / 180.0;
  return {(p.lon + 180.0) / 360.0, (1.0 - std::log(std::tan(lat) + 1.0 / std::cos(lat)) / kPi) / 2.0};
}

}  // namespace

Viewport fit_viewport(const RouteNetwork& net, int width, int height, double padding) {
  GeoBounds b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
              -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  auto grow = [&](const GeoPoint& p) {
    b.min_lon = std::min(b.min_lon, p.lon);
    b.min_lat = std::min(b.min_lat, p.lat);
    b.max_lon = std::max(b.max_lon, p.lon);
    b.max_lat = std::max(b.max_lat, p.lat);
  };
  for (const Vertex& v : net.vertices()) grow(v.position);
  for (const Edge& e : net.edges()) {
    for (const GeoPoint& g : e.geometry) grow(g);
  }
  if (net.vertices().empty()) b = {-1.0, -1.0, 1.0, 1.0};
  return Viewport{width, height, b, padding};
}

Vec2 project(const GeoPoint& p, const Viewport& vp) {
  if (vp.width <= 0 || vp.height <= 0) throw ProjectionError("viewport must have positive size");
  if (!valid_geo(p)) throw ProjectionError("point outside the Web Mercator range");
  const Mercator lo = mercator({vp.bounds.min_lon, vp.bounds.max_lat});  // north-west
  const Mercator hi = mercator({vp.bounds.max_lon, vp.bounds.min_lat});  // south-east
  const Mercator m = mercator(p);
  const double span_x = hi.x - lo.x;
  const double span_y = hi.y - lo.y;
  const double box_w = vp.width - 2.0 * vp.padding;
  const double box_h = vp.height - 2.0 * vp.padding;
  double scale = std::numeric_limits<double>::infinity();
  if (span_x > 0.0) scale = std::min(scale, box_w / span_x);
  if (span_y > 0.0) scale = std::min(scale, box_h / span_y);
  if (!std::isfinite(scale)) scale = 1.0;
  // Center the fitted content in the pixel box.
  const double cx = (lo.x + hi.x) / 2.0;
  const double cy = (lo.y + hi.y) / 2.0;
  const Vec2 out{vp.width / 2.0 + (m.x - cx) * scale, vp.height / 2.0 + (m.y - cy) * scale};
  constexpr double eps = 1e-6;
  if (out.x < -eps || out.y < -eps || out.x > vp.width + eps || out.y > vp.height + eps) {
    throw ProjectionError("point (" + std::to_string(p.lon) + ", " + std::to_string(p.lat) +
                          ") lies outside the viewport");
  }
  return out;
}

Polyline project(const std::vector<GeoPoint>& line, const Viewport& vp) {
  Polyline out;
  out.reserve(line.size());
  for (const GeoPoint& g : line) out.push_back(project(g, vp));
  return out;
}

}  // namespace routepack
