#pragma once

#include <string>
#include <string_view>

#include "routepack/packing.hpp"

namespace routepack {

/// Layout JSON: {viewport, routes:[{id, color?, width, volumes?, strokes:[{segId, step, leg, subpath, rank,
/// offsetPx, points}], stops:[{vertexId, x, y}]}], residual, crossings, iterations, gap, basemap}.
/// Coordinates are rounded to 1e-3 px.
std::string layout_to_json(const PackedLayout& layout);

/// Inverse of layout_to_json. Paths are rebuilt from the strokes; source arc
/// lengths become displaced arc lengths and transition zones are dropped.
/// Throws ParseError.
PackedLayout parse_layout(std::string_view document);

}  // namespace routepack
