#pragma once

#include <string>
#include <vector>

#include "routepack/styling.hpp"

namespace routepack {

struct RenderOptions {
  bool legend = true;
  // Road polylines drawn in light grey underneath everything else.
  std::vector<Polyline> basemap;
};

/// Formats with two decimals; negative zero prints as 0.00.
std::string format_number(double v);

/// SVG 1.1 document. Layers: basemap, halos, strokes, arrows, node glyphs,
/// legend. Strokes are filled outline polygons.
std::string render(const StyledLayout& styled, const Viewport& vp, const RenderOptions& options = {});

/// Legend group: one row per route, then rows explaining the mode's glyphs.
std::string render_legend(const StyledLayout& styled);

}  // namespace routepack
