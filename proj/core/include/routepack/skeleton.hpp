#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "routepack/network.hpp"
#include "routepack/raster.hpp"

namespace routepack {

/// Zhang-Suen thinning iterated to a fixpoint, with the Lu-Wang neighbor
/// bound (3..6) and two additions: a sub-iteration never deletes all four
/// pixels of a 2x2 block at once, and simple points are peeled off any 2x2
/// block that survives. The output is 1 px wide and has the same 8-connected
/// components as the input.
BinaryImage thin(const BinaryImage& img);

/// Half the number of set/clear transitions around the cyclic 8-neighborhood.
int crossing_number(const BinaryImage& img, Pixel p);

struct BifurcationSet {
  std::vector<Pixel> bifurcations;  // CN >= 3
  std::vector<Pixel> endpoints;     // CN == 1
};

BifurcationSet detect_bifurcations(const BinaryImage& skeleton);

struct Skeleton {
  BinaryImage image;
  std::vector<Pixel> bifurcations;
  std::vector<Pixel> endpoints;
};

Skeleton make_skeleton(BinaryImage thinned);

struct SkeletonParams {
  double bandwidth = 4.0;
  double fraction = 0.1;
  // Stops snap to the skeleton within this many bandwidths.
  double stop_snap = 2.0;
};

enum class CruxKind { kBifurcation, kEndpoint, kStop };

struct CrucialVertex {
  int id = 0;
  Vec2 position;
  CruxKind kind = CruxKind::kBifurcation;
  std::vector<Pixel> pixels;
  // Network vertices (route stops) snapped onto this crux.
  std::vector<std::string> sources;
};

struct Segment {
  int id = 0;
  int crux_a = 0;
  int crux_b = 0;
  // Owned skeleton pixels, ordered from crux_a towards crux_b.
  std::vector<Pixel> pixels;
  // Screen polyline from crux_a's position to crux_b's position.
  Polyline polyline;
  double length = 0.0;
};

struct RouteStep {
  int segment = 0;
  // True when traversed from crux_a to crux_b.
  bool forward = true;
  bool operator==(const RouteStep&) const = default;
};

/// A route expressed as a walk over pruned-graph segments.
struct RouteWalk {
  std::string route_id;
  std::vector<RouteStep> steps;
  // Crux of each stop; size == stops.size().
  std::vector<int> stop_cruxes;
  // Index of the first step of each leg; size == legs + 1, back() == steps.size().
  std::vector<std::size_t> leg_starts;
};

struct PrunedGraph {
  int width = 0;
  int height = 0;
  BinaryImage skeleton;
  std::vector<CrucialVertex> cruxes;
  std::vector<Segment> segments;
  // Route edge id -> contiguous chain of segment ids.
  std::map<std::string, std::vector<int>> incidence;
  std::vector<RouteWalk> walks;
  double coverage_tolerance = 0.0;

  const RouteWalk& walk(const std::string& route_id) const;
  /// Segment polyline oriented along a route step.
  Polyline step_polyline(const RouteStep& step) const;
  int step_end_crux(const RouteStep& step) const;
  int step_start_crux(const RouteStep& step) const;
};

/// Projected route geometry: one polyline per distinct edge used by a route.
std::vector<Polyline> route_edge_polylines(const RouteNetwork& net, const Viewport& vp);

/// Builds crucial vertices, corridor segments and route walks. Throws
/// CoverageError naming the first route edge or stop the skeleton misses.
PrunedGraph build_pruned_graph(const Skeleton& sk, const RouteNetwork& net, const Viewport& vp,
                               const SkeletonParams& params = {});

/// KDE -> binarize -> thin -> bifurcations -> pruned graph.
PrunedGraph skeletonize(const RouteNetwork& net, const Viewport& vp, const SkeletonParams& params = {});

/// {cruxes:[{x,y,source?}], segments:[{id,pixels,cruxA,cruxB}], incidence:{edge:[seg]}}
std::string pruned_graph_json(const PrunedGraph& pg);

}  // namespace routepack
