#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "routepack/network.hpp"
#include "routepack/skeleton.hpp"

namespace routepack {

/// One route's pass along a shared subpath: steps [first_step, last_step] of
/// its walk.
struct Participant {
  std::string route_id;
  std::size_t first_step = 0;
  std::size_t last_step = 0;
  // Travels in the same direction as the subpath's reference participant.
  bool forward = true;

  bool operator==(const Participant&) const = default;
};

/// Maximal chain of segments co-traversed by the same set of >= 2 passes.
struct SharedSubpath {
  int id = 0;
  // Ordered in the reference participant's direction of travel.
  std::vector<int> segments;
  // participants.front() is the reference (smallest route id, then step).
  std::vector<Participant> participants;
  int start_crux = 0;
  int end_crux = 0;
};

/// Coordinate frame at the divergence vertex of one participant.
struct DivergenceFrame {
  Vec2 origin;  // V_cur
  Vec2 pre;     // V_pre, a point back along the shared stretch
  // Angle (degrees, visual counter-clockwise) subtracted so that V_pre
  // lands on the positive x axis.
  double rotation_deg = 0.0;
  // Unit vector a quarter turn counter-clockwise from V_cur - V_pre.
  Vec2 perpendicular;

  /// Angle of `p - origin` in the frame, in (-180, 180].
  double angle_of(Vec2 p) const;
};

struct SubpathRanking {
  int subpath = 0;
  // Indexed like SharedSubpath::participants.
  std::vector<int> ranks;
  // Departure delta mapped into the reference frame (terminal passes use 0).
  std::vector<double> deltas;
};

using RankAssignment = std::vector<SubpathRanking>;

struct PackParams {
  SkeletonParams skeleton;
  double gap = 2.0;
  // Envelope width used for routes without an explicit entry in `widths`.
  double default_width = 6.0;
  std::map<std::string, double> widths;
  double max_bundle_width = 60.0;
  double transition_length = 12.0;
  // Look-back/look-ahead distance for departure angles.
  double angle_probe = 25.0;
  int max_iterations = 5;
  // Bandwidth multiplier applied when a pass leaves residual overlap.
  double bandwidth_growth = 1.5;

  double width_of(const std::string& route_id) const;
};

struct ResidualItem {
  std::string kind;  // "overlap", "separation", "over-dense", "degenerate-turn"
  std::vector<std::string> routes;
  std::vector<int> segments;
  double length = 0.0;
  std::string detail;
};

struct Stroke {
  int segment = 0;
  std::size_t step = 0;
  std::size_t leg = 0;
  int subpath = -1;
  int rank = 0;
  // Signed offset along the route's own left normal.
  double offset = 0.0;
  Polyline points;
  // Source arc length per point; empty for layouts read back from JSON.
  std::vector<double> source_s;
};

struct StopMark {
  std::string vertex_id;
  Vec2 position;
};

struct LayoutRoute {
  std::string id;
  std::optional<std::string> color;
  double width = 0.0;
  std::optional<std::vector<double>> volumes;
  std::vector<Stroke> strokes;
  std::vector<StopMark> stops;
  // Full displaced polyline and the source arc length of each point.
  Polyline path;
  std::vector<double> path_s;
  // Source arc length at the start of each step, plus the total length.
  std::vector<double> step_s;
  // Source arc-length ranges where the offset ramps between two values.
  std::vector<std::pair<double, double>> transitions;
};

struct PackedLayout {
  Viewport viewport;
  std::vector<LayoutRoute> routes;
  std::vector<ResidualItem> residual;
  // Geometry notes that are not overlaps, such as degenerate turns.
  std::vector<ResidualItem> warnings;
  int crossings = 0;
  int iterations = 0;
  double gap = 2.0;
  // Projected road edges, drawn as an optional underlay.
  std::vector<Polyline> basemap;

  const LayoutRoute& route(const std::string& id) const;
};

/// Shared subpaths of a pruned graph, ordered by reference participant.
std::vector<SharedSubpath> find_shared_subpaths(const PrunedGraph& pg);

DivergenceFrame divergence_frame(const PrunedGraph& pg, const SharedSubpath& sp, std::size_t participant,
                                 double probe);

/// Departure delta in the participant's own frame; nullopt when the route
/// ends at the divergence vertex.
std::optional<double> departure_delta(const PrunedGraph& pg, const SharedSubpath& sp, std::size_t participant,
                                      double probe);

/// Pairwise comparison per subpath: larger mapped delta wins; rank is the
/// number of lost comparisons.
RankAssignment rank_routes(const PrunedGraph& pg, const std::vector<SharedSubpath>& subpaths, double probe);

/// Rank from explicit mapped deltas; ties go to the smaller key.
std::vector<int> rank_by_delta(const std::vector<double>& deltas, const std::vector<std::string>& keys);

struct BundleOffsets {
  std::vector<double> offsets;
  double bundle_width = 0.0;
};

/// Stacks passes by rank (0 on the perpendicular side) with spacing
/// (w_i + w_j)/2 + gap, centered so that sum(w_i * offset_i) == 0.
BundleOffsets compute_offsets(const std::vector<int>& ranks, const std::vector<double>& widths, double gap);

/// Skeleton plus shared subpaths: everything ranking needs.
struct PackPlan {
  PrunedGraph graph;
  std::vector<SharedSubpath> subpaths;
};

PackPlan plan_packing(const RouteNetwork& net, const Viewport& vp, const SkeletonParams& params);

/// Offsets and displaced polylines for a given ranking. Does not count
/// crossings or look for residual overlap.
PackedLayout layout_from_ranks(const RouteNetwork& net, const Viewport& vp, const PackPlan& plan,
                               const RankAssignment& ranks, const PackParams& params);

/// Overlaps between displaced strokes outside transition zones and
/// crucial-vertex neighborhoods.
std::vector<ResidualItem> find_residual_overlaps(const PackedLayout& layout, const PackPlan& plan,
                                                 const PackParams& params);

/// Detect -> rank -> shift, repeated until no residual overlap remains or
/// the iteration cap is reached.
PackedLayout pack(const RouteNetwork& net, const Viewport& vp, const PackParams& params = {});

/// Transversal intersections between displaced polylines of distinct
/// routes. Contacts at the routes' own end points do not count.
int count_crossings(const PackedLayout& layout);

/// Minimum crossings over every per-subpath rank permutation.
/// Throws OracleSizeError if a subpath has more than 7 passes or the
/// permutation product exceeds one million.
int brute_force_min_crossings(const PackPlan& plan, const RouteNetwork& net, const Viewport& vp,
                              const PackParams& params);

/// Smallest centerline distance between two passes sharing a segment,
/// ignoring transition zones. One entry per pass pair per shared segment.
struct SeparationSample {
  std::string route_a;
  std::string route_b;
  int segment = 0;
  double distance = 0.0;
  double required = 0.0;
};

std::vector<SeparationSample> shared_separations(const PackedLayout& layout);

}  // namespace routepack
