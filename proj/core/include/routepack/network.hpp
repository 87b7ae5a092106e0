#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "routepack/error.hpp"
#include "routepack/geometry.hpp"

namespace routepack {

inline constexpr double kMaxMercatorLat = 85.0511;
inline constexpr double kEndpointTolerance = 1e-9;

struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;
  bool operator==(const GeoPoint&) const = default;
};

enum class VertexKind { kMajor, kWaypoint };

struct Vertex {
  std::string id;
  GeoPoint position;
  std::optional<std::string> label;
  VertexKind kind = VertexKind::kMajor;
  bool operator==(const Vertex&) const = default;
};

struct Edge {
  std::string id;
  std::string from;
  std::string to;
  std::vector<GeoPoint> geometry;
  bool operator==(const Edge&) const = default;
};

struct Route {
  std::string id;
  std::vector<std::string> stops;
  std::vector<std::string> path;
  std::optional<std::vector<double>> volumes;
  bool operator==(const Route&) const = default;
};

/// The part of a route between two consecutive stops.
struct Leg {
  std::string route_id;
  std::string start_stop;
  std::string end_stop;
  std::vector<std::string> edges;
  bool operator==(const Leg&) const = default;
};

/// How a validated route walks its edge chain. Derived during validation.
struct RouteChain {
  // vertices.size() == path.size() + 1
  std::vector<std::string> vertices;
  // reversed[i]: path[i] is traversed from its `to` vertex to its `from` vertex.
  std::vector<bool> reversed;
  // stop_positions[k]: index into `vertices` where stop k is reached.
  std::vector<std::size_t> stop_positions;
};

/// Validated, immutable georeferenced graph with routes.
class RouteNetwork {
 public:
  RouteNetwork() = default;

  /// Validates every invariant; throws ValidationError on the first violation.
  RouteNetwork(std::vector<Vertex> vertices, std::vector<Edge> edges, std::vector<Route> routes);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Route>& routes() const { return routes_; }

  const Vertex& vertex(std::string_view id) const;
  const Edge& edge(std::string_view id) const;
  const Route& route(std::string_view id) const;
  const RouteChain& chain(std::string_view route_id) const;
  bool has_vertex(std::string_view id) const { return vertex_index_.contains(std::string(id)); }

  bool operator==(const RouteNetwork& other) const {
    return vertices_ == other.vertices_ && edges_ == other.edges_ && routes_ == other.routes_;
  }

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<Route> routes_;
  std::vector<RouteChain> chains_;
  std::unordered_map<std::string, std::size_t> vertex_index_;
  std::unordered_map<std::string, std::size_t> edge_index_;
  std::unordered_map<std::string, std::size_t> route_index_;
};

/// Parses the network JSON document. Throws ParseError for schema violations
/// and ValidationError for broken references or chains.
RouteNetwork parse_network(std::string_view document);

/// Pretty-printed JSON accepted by parse_network.
std::string serialize_network(const RouteNetwork& net);

std::vector<Leg> legs_of(const RouteNetwork& net, const Route& route);

/// Edge geometry in traversal order for one route step.
std::vector<GeoPoint> oriented_geometry(const Edge& edge, bool reversed);

struct GeoBounds {
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;
  bool operator==(const GeoBounds&) const = default;
};

struct Viewport {
  int width = 0;
  int height = 0;
  GeoBounds bounds;
  double padding = 0.0;
  bool operator==(const Viewport&) const = default;
};

/// Viewport of the given size whose bounds cover every vertex and edge point.
Viewport fit_viewport(const RouteNetwork& net, int width, int height, double padding);

/// Web Mercator projection fitted into the padded pixel box, y down.
/// Throws ProjectionError for points outside the viewport.
Vec2 project(const GeoPoint& p, const Viewport& vp);

Polyline project(const std::vector<GeoPoint>& line, const Viewport& vp);

}  // namespace routepack
