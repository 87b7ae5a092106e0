#pragma once

#include <span>
#include <vector>

#include "routepack/geometry.hpp"

namespace routepack {

struct OffsetResult {
  Polyline points;
  // Arc length on the source polyline that each output point came from.
  // Non-decreasing.
  std::vector<double> source_s;
  // Set when a near U-turn tighter than the offset distance had to be trimmed.
  bool degenerate_turn = false;
  // Where the first such trim happened (valid when degenerate_turn).
  Vec2 degenerate_at{0.0, 0.0};
};

inline constexpr double kDefaultChordError = 0.1;

/// Parallel curve at signed distance `d` along the left normal (visual
/// left of travel). Outer corners get circular-arc joins flattened to
/// `chord_error`; loops from inner corners are trimmed.
OffsetResult offset_polyline(std::span<const Vec2> line, double d, double chord_error = kDefaultChordError);

/// Same, with a per-vertex offset that varies linearly along each segment.
OffsetResult offset_polyline(std::span<const Vec2> line, std::span<const double> offsets,
                             double chord_error = kDefaultChordError);

}  // namespace routepack
