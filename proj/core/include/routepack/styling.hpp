#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "routepack/packing.hpp"

namespace routepack {

/// Representation codes: arrows (AG), transparency (TR), local/global taper
/// (LT/GT), the dual encodings TRA/LTA/GTA, and arrows plus rings (AGR).
enum class DirectionMode { kAG, kTR, kLT, kGT, kTRA, kLTA, kGTA, kAGR };

enum class NodeMode { kRings, kCookieBites, kIntegratedArrows, kNone };

enum class Scope { kLocal, kGlobal };

/// Case-insensitive; nullopt for unknown codes.
std::optional<DirectionMode> parse_direction_mode(std::string_view code);
std::optional<NodeMode> parse_node_mode(std::string_view name);
std::string to_string(DirectionMode mode);
std::string to_string(NodeMode mode);
const std::vector<DirectionMode>& all_direction_modes();

/// Rings for AGR, nothing otherwise.
NodeMode default_node_mode(DirectionMode mode);

struct ModeTraits {
  bool arrows = false;
  std::optional<Scope> taper;
  std::optional<Scope> opacity;
};

ModeTraits traits(DirectionMode mode);

const std::vector<std::string>& default_palette();
/// Okabe-Ito colors, distinguishable under common color-vision deficiencies.
const std::vector<std::string>& cvd_palette();
/// One color per line (#rgb, #rrggbb or a lowercase name); blank lines skipped.
std::vector<std::string> load_palette(const std::string& path);

struct StyleSpec {
  DirectionMode mode = DirectionMode::kAG;
  NodeMode node_mode = NodeMode::kNone;
  std::vector<std::string> palette = default_palette();
  double width_min = 2.0;
  double width_max = 6.0;
  double opacity_min = 0.35;
  double opacity_max = 1.0;
  double arrow_interval = 60.0;
  double arrow_length_factor = 2.5;
  double halo_extra = 1.5;
  double gap = 2.0;

  /// Throws ValidationError on broken invariants.
  void validate() const;
};

/// Spec with the mode's default node mode.
StyleSpec spec_for(DirectionMode mode);

struct ColorAssignment {
  std::map<std::string, std::string> colors;
  std::vector<std::string> warnings;
};

/// Greedy coloring of the conflict graph (routes sharing a segment) in
/// route-id order.
ColorAssignment assign_colors(const PackedLayout& layout, const std::vector<std::string>& palette);

/// Width of one leg: the range midpoint without volumes, otherwise the
/// leg's volume mapped linearly onto [width_min, width_max].
double base_width(const std::optional<std::vector<double>>& volumes, std::size_t leg, const StyleSpec& spec);

/// width_max at s = 0 down to width_min at s = L.
double taper_profile(double s, double length, const StyleSpec& spec);
/// opacity_max at s = 0 down to opacity_min at s = L.
double opacity_profile(double s, double length, const StyleSpec& spec);

struct ArrowPlacement {
  double s = 0.0;
  Vec2 position;
  Vec2 tangent;  // unit
  double length = 0.0;
};

/// One route leg with per-point attributes. Points are at most 8 px apart.
struct StyledStroke {
  std::string route_id;
  std::size_t leg = 0;
  std::string color;
  Polyline points;
  std::vector<double> s;  // arc length along this stroke
  std::vector<double> widths;
  std::vector<double> opacities;
  std::vector<ArrowPlacement> arrows;
  bool halo = true;

  double length() const { return s.empty() ? 0.0 : s.back(); }
  double width_at(double at) const;
};

/// Arrows at interval/2 + k*interval, k < floor(L/interval), skipping any
/// within one arrow length of either end; a single centered arrow when the
/// stroke is shorter than one interval.
std::vector<ArrowPlacement> place_arrows(const StyledStroke& stroke, const StyleSpec& spec);

struct GlyphEntry {
  std::string route_id;
  std::string color;
  bool stops = false;
  // Rings: ring center-line radius. Bites and arrows: unused.
  double radius = 0.0;
  // Bites and integrated arrows: where the arrowhead sits and where it points.
  Vec2 anchor;
  Vec2 direction;
  bool inward = false;
};

struct NodeGlyph {
  std::string vertex_id;
  Vec2 center;
  NodeMode mode = NodeMode::kNone;
  std::vector<GlyphEntry> entries;
  double inner_radius = 0.0;
};

inline constexpr double kRingInnerRadius = 6.0;
inline constexpr double kRingStep = 2.0;
inline constexpr double kRingThickness = 2.0;

/// Per-leg displaced polylines of a layout route, indexed by leg.
std::vector<Polyline> leg_polylines(const LayoutRoute& route);

std::vector<NodeGlyph> node_glyphs(const PackedLayout& layout, const std::map<std::string, std::string>& colors,
                                   NodeMode mode);

struct StyledLayout {
  StyleSpec spec;
  std::vector<StyledStroke> strokes;
  std::vector<NodeGlyph> glyphs;
  std::map<std::string, std::string> colors;
  std::vector<std::string> warnings;
};

StyledLayout style(const PackedLayout& layout, const StyleSpec& spec);

}  // namespace routepack
