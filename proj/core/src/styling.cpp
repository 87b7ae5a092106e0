#include "routepack/styling.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <tuple>

namespace routepack {

namespace {

constexpr double kMaxPiece = 8.0;

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

const std::vector<std::pair<DirectionMode, const char*>> kModeNames = {
    {DirectionMode::kAG, "AG"},   {DirectionMode::kTR, "TR"},   {DirectionMode::kLT, "LT"},
    {DirectionMode::kGT, "GT"},   {DirectionMode::kTRA, "TRA"}, {DirectionMode::kLTA, "LTA"},
    {DirectionMode::kGTA, "GTA"}, {DirectionMode::kAGR, "AGR"}};

const std::vector<std::pair<NodeMode, const char*>> kNodeNames = {{NodeMode::kRings, "rings"},
                                                                  {NodeMode::kCookieBites, "cookie-bites"},
                                                                  {NodeMode::kIntegratedArrows, "integrated-arrows"},
                                                                  {NodeMode::kNone, "none"}};

// Polyline resampled so no piece is longer than kMaxPiece.
void densify(const Polyline& in, Polyline& pts, std::vector<double>& s) {
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (pts.empty()) {
      pts.push_back(in[i]);
      s.push_back(0.0);
      continue;
    }
    const Vec2 a = pts.back();
    const double d = distance(a, in[i]);
    if (d < 1e-9) continue;
    const int pieces = static_cast<int>(std::ceil(d / kMaxPiece));
    const double s0 = s.back();
    for (int k = 1; k <= pieces; ++k) {
      const double t = static_cast<double>(k) / pieces;
      pts.push_back(k == pieces ? in[i] : a + (in[i] - a) * t);
      s.push_back(s0 + d * t);
    }
  }
}

Vec2 tangent_near(const Polyline& line, bool at_end) {
  if (line.size() < 2) return {1.0, 0.0};
  return at_end ? normalized(line[line.size() - 1] - line[line.size() - 2]) : normalized(line[1] - line[0]);
}

}  // namespace

std::optional<DirectionMode> parse_direction_mode(std::string_view code) {
  const std::string c = lower(code);
  for (const auto& [m, name] : kModeNames) {
    if (lower(name) == c) return m;
  }
  return std::nullopt;
}

std::optional<NodeMode> parse_node_mode(std::string_view name) {
  const std::string c = lower(name);
  for (const auto& [m, n] : kNodeNames) {
    if (n == c) return m;
  }
  return std::nullopt;
}

std::string to_string(DirectionMode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "?";
}

std::string to_string(NodeMode mode) {
  for (const auto& [m, name] : kNodeNames) {
    if (m == mode) return name;
  }
  return "?";
}

const std::vector<DirectionMode>& all_direction_modes() {
  static const std::vector<DirectionMode> modes = [] {
    std::vector<DirectionMode> v;
    for (const auto& [m, name] : kModeNames) v.push_back(m);
    return v;
  }();
  return modes;
}

NodeMode default_node_mode(DirectionMode mode) {
  return mode == DirectionMode::kAGR ? NodeMode::kRings : NodeMode::kNone;
}

ModeTraits traits(DirectionMode mode) {
  switch (mode) {
    case DirectionMode::kAG:
    case DirectionMode::kAGR:
      return {true, std::nullopt, std::nullopt};
    case DirectionMode::kTR:
      return {false, std::nullopt, Scope::kGlobal};
    case DirectionMode::kLT:
      return {false, Scope::kLocal, std::nullopt};
    case DirectionMode::kGT:
      return {false, Scope::kGlobal, std::nullopt};
    case DirectionMode::kTRA:
      return {true, std::nullopt, Scope::kGlobal};
    case DirectionMode::kLTA:
      return {true, Scope::kLocal, std::nullopt};
    case DirectionMode::kGTA:
      return {true, Scope::kGlobal, std::nullopt};
  }
  return {};
}

const std::vector<std::string>& default_palette() {
  static const std::vector<std::string> p = {"#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4",
                                             "#f032e6", "#9a6324", "#469990", "#800000", "#000075", "#808000"};
  return p;
}

const std::vector<std::string>& cvd_palette() {
  static const std::vector<std::string> p = {"#e69f00", "#56b4e9", "#009e73", "#f0e442",
                                             "#0072b2", "#d55e00", "#cc79a7", "#000000"};
  return p;
}

std::vector<std::string> load_palette(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read palette file " + path);
  static const std::regex color(R"(#[0-9a-fA-F]{3}|#[0-9a-fA-F]{6}|[a-z]+)");
  std::vector<std::string> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    const std::string c = line.substr(b, e - b + 1);
    if (!std::regex_match(c, color)) throw ValidationError(path + ":" + std::to_string(n) + ": not a color: " + c);
    out.push_back(c);
  }
  if (out.empty()) throw ValidationError("palette file " + path + " has no colors");
  return out;
}

void StyleSpec::validate() const {
  if (!(width_min > 0.0 && width_min < width_max)) throw ValidationError("style: need 0 < width min < width max");
  if (!(opacity_min >= 0.0 && opacity_min < opacity_max && opacity_max <= 1.0)) {
    throw ValidationError("style: need 0 <= opacity min < opacity max <= 1");
  }
  if (!(arrow_interval > 0.0)) throw ValidationError("style: arrow interval must be positive");
  if (palette.empty()) throw ValidationError("style: palette is empty");
}

StyleSpec spec_for(DirectionMode mode) {
  StyleSpec spec;
  spec.mode = mode;
  spec.node_mode = default_node_mode(mode);
  return spec;
}

ColorAssignment assign_colors(const PackedLayout& layout, const std::vector<std::string>& palette) {
  if (palette.empty()) throw ValidationError("palette is empty");
  std::vector<const LayoutRoute*> order;
  for (const LayoutRoute& r : layout.routes) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const LayoutRoute* a, const LayoutRoute* b) { return a->id < b->id; });
  std::vector<std::set<int>> segs;
  for (const LayoutRoute* r : order) {
    std::set<int> s;
    for (const Stroke& st : r->strokes) s.insert(st.segment);
    segs.push_back(std::move(s));
  }
  auto adjacent = [&](std::size_t i, std::size_t j) {
    for (int s : segs[i]) {
      if (segs[j].contains(s)) return true;
    }
    return false;
  };
  ColorAssignment out;
  std::vector<std::size_t> idx(order.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::vector<int> used(palette.size(), 0);
    for (std::size_t j = 0; j < i; ++j) {
      if (adjacent(i, j)) ++used[idx[j]];
    }
    const auto free = std::find(used.begin(), used.end(), 0);
    if (free != used.end()) {
      idx[i] = static_cast<std::size_t>(free - used.begin());
    } else {
      idx[i] = static_cast<std::size_t>(std::min_element(used.begin(), used.end()) - used.begin());
      out.warnings.push_back("route " + order[i]->id + " reuses color " + palette[idx[i]] +
                             " of a neighbor: palette has " + std::to_string(palette.size()) + " colors");
    }
    out.colors[order[i]->id] = palette[idx[i]];
  }
  return out;
}

double base_width(const std::optional<std::vector<double>>& volumes, std::size_t leg, const StyleSpec& spec) {
  const double mid = (spec.width_min + spec.width_max) / 2.0;
  if (!volumes || volumes->empty() || leg >= volumes->size()) return mid;
  const auto [lo, hi] = std::minmax_element(volumes->begin(), volumes->end());
  if (*hi - *lo <= 0.0) return mid;
  return std::lerp(spec.width_min, spec.width_max, ((*volumes)[leg] - *lo) / (*hi - *lo));
}

double taper_profile(double s, double length, const StyleSpec& spec) {
  if (!(length > 0.0)) return spec.width_max;
  return std::lerp(spec.width_max, spec.width_min, std::clamp(s / length, 0.0, 1.0));
}

double opacity_profile(double s, double length, const StyleSpec& spec) {
  if (!(length > 0.0)) return spec.opacity_max;
  return std::lerp(spec.opacity_max, spec.opacity_min, std::clamp(s / length, 0.0, 1.0));
}

double StyledStroke::width_at(double at) const {
  if (widths.empty()) return 0.0;
  const auto it = std::upper_bound(s.begin(), s.end(), at);
  if (it == s.begin()) return widths.front();
  if (it == s.end()) return widths.back();
  const std::size_t i = static_cast<std::size_t>(it - s.begin()) - 1;
  const double span = s[i + 1] - s[i];
  return span > 0.0 ? std::lerp(widths[i], widths[i + 1], (at - s[i]) / span) : widths[i];
}

std::vector<ArrowPlacement> place_arrows(const StyledStroke& stroke, const StyleSpec& spec) {
  std::vector<ArrowPlacement> out;
  const double L = stroke.length();
  if (!(L > 0.0)) return out;
  auto make = [&](double at) {
    ArrowPlacement a;
    a.s = at;
    a.position = point_at(stroke.points, stroke.s, at);
    a.tangent = tangent_at(stroke.points, stroke.s, at);
    a.length = spec.arrow_length_factor * stroke.width_at(at);
    return a;
  };
  if (L < spec.arrow_interval) {
    out.push_back(make(L / 2.0));
    return out;
  }
  const auto count = static_cast<std::size_t>(std::floor(L / spec.arrow_interval));
  for (std::size_t k = 0; k < count; ++k) {
    const ArrowPlacement a = make(spec.arrow_interval / 2.0 + static_cast<double>(k) * spec.arrow_interval);
    if (a.s < a.length || L - a.s < a.length) continue;
    out.push_back(a);
  }
  return out;
}

std::vector<Polyline> leg_polylines(const LayoutRoute& route) {
  std::size_t legs = route.stops.size() > 1 ? route.stops.size() - 1 : 0;
  for (const Stroke& st : route.strokes) legs = std::max(legs, st.leg + 1);
  std::vector<Polyline> out(legs);
  for (const Stroke& st : route.strokes) {
    Polyline& line = out[st.leg];
    for (std::size_t i = 0; i < st.points.size(); ++i) {
      if (i == 0 && !line.empty()) continue;
      line.push_back(st.points[i]);
    }
  }
  return out;
}

std::vector<NodeGlyph> node_glyphs(const PackedLayout& layout, const std::map<std::string, std::string>& colors,
                                   NodeMode mode) {
  std::vector<NodeGlyph> out;
  if (mode == NodeMode::kNone) return out;
  auto color_of = [&](const std::string& id) {
    const auto it = colors.find(id);
    return it == colors.end() ? std::string("#000000") : it->second;
  };
  std::map<std::string, Vec2> centers;
  std::map<std::string, std::vector<std::pair<const LayoutRoute*, std::size_t>>> stops_at;
  for (const LayoutRoute& r : layout.routes) {
    for (std::size_t k = 0; k < r.stops.size(); ++k) {
      centers.emplace(r.stops[k].vertex_id, r.stops[k].position);
      stops_at[r.stops[k].vertex_id].emplace_back(&r, k);
    }
  }
  std::vector<const LayoutRoute*> sorted;
  for (const LayoutRoute& r : layout.routes) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const LayoutRoute* a, const LayoutRoute* b) { return a->id < b->id; });

  for (const auto& [vid, center] : centers) {
    NodeGlyph g;
    g.vertex_id = vid;
    g.center = center;
    g.mode = mode;
    std::set<std::string> stopping;
    for (const auto& [r, k] : stops_at[vid]) stopping.insert(r->id);

    if (mode == NodeMode::kRings) {
      std::size_t ring = 0;
      for (const LayoutRoute* r : sorted) {
        if (!stopping.contains(r->id)) continue;
        GlyphEntry e;
        e.route_id = r->id;
        e.color = color_of(r->id);
        e.stops = true;
        e.radius = kRingInnerRadius + kRingStep * static_cast<double>(ring++);
        g.entries.push_back(e);
      }
      g.inner_radius = kRingInnerRadius - kRingThickness / 2.0;
      // Routes that only pass close by are listed without a ring.
      for (const LayoutRoute* r : sorted) {
        if (stopping.contains(r->id) || r->path.size() < 2) continue;
        if (point_polyline_distance(center, r->path) <= kRingInnerRadius) {
          g.entries.push_back({r->id, color_of(r->id), false, 0.0, {}, {}, false});
        }
      }
    } else {
      std::vector<std::pair<const LayoutRoute*, std::size_t>> visits = stops_at[vid];
      std::sort(visits.begin(), visits.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first->id, a.second) < std::tie(b.first->id, b.second);
      });
      for (const auto& [r, k] : visits) {
        const std::vector<Polyline> legs = leg_polylines(*r);
        // Arrival over leg k-1, departure over leg k.
        if (k > 0 && k - 1 < legs.size() && legs[k - 1].size() >= 2) {
          const Polyline& line = legs[k - 1];
          const Vec2 dir = tangent_near(line, true);
          g.entries.push_back({r->id, color_of(r->id), true, 0.0, line.back(), dir, true});
        }
        if (mode == NodeMode::kCookieBites && k < legs.size() && legs[k].size() >= 2) {
          const Polyline& line = legs[k];
          const Vec2 dir = tangent_near(line, false);
          g.entries.push_back({r->id, color_of(r->id), true, 0.0, line.front(), dir, false});
        }
      }
      g.inner_radius = kRingInnerRadius;
    }
    if (!g.entries.empty()) out.push_back(std::move(g));
  }
  return out;
}

StyledLayout style(const PackedLayout& layout, const StyleSpec& spec) {
  spec.validate();
  StyledLayout out;
  out.spec = spec;
  ColorAssignment ca = assign_colors(layout, spec.palette);
  for (const LayoutRoute& r : layout.routes) {
    if (r.color) ca.colors[r.id] = *r.color;
  }
  out.colors = ca.colors;
  out.warnings = ca.warnings;
  const ModeTraits t = traits(spec.mode);

  std::vector<const LayoutRoute*> sorted;
  for (const LayoutRoute& r : layout.routes) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const LayoutRoute* a, const LayoutRoute* b) { return a->id < b->id; });

  for (const LayoutRoute* r : sorted) {
    const std::vector<Polyline> legs = leg_polylines(*r);
    std::vector<Polyline> dense(legs.size());
    std::vector<std::vector<double>> ds(legs.size());
    double route_len = 0.0;
    for (std::size_t l = 0; l < legs.size(); ++l) {
      densify(legs[l], dense[l], ds[l]);
      if (!ds[l].empty()) route_len += ds[l].back();
    }
    double before = 0.0;
    for (std::size_t l = 0; l < legs.size(); ++l) {
      if (dense[l].size() < 2) continue;
      StyledStroke st;
      st.route_id = r->id;
      st.leg = l;
      st.color = out.colors[r->id];
      st.points = dense[l];
      st.s = ds[l];
      const double L = st.s.back();
      const double base = base_width(r->volumes, l, spec);
      for (double s : st.s) {
        double w = base;
        if (t.taper) {
          const double tw = *t.taper == Scope::kLocal ? taper_profile(s, L, spec)
                                                      : taper_profile(before + s, route_len, spec);
          w = r->volumes ? std::clamp(tw / spec.width_max * base, spec.width_min, spec.width_max) : tw;
        }
        double o = spec.opacity_max;
        if (t.opacity) {
          o = *t.opacity == Scope::kLocal ? opacity_profile(s, L, spec) : opacity_profile(before + s, route_len, spec);
        }
        st.widths.push_back(w);
        st.opacities.push_back(o);
      }
      if (t.arrows) st.arrows = place_arrows(st, spec);
      before += L;
      out.strokes.push_back(std::move(st));
    }
  }
  out.glyphs = node_glyphs(layout, out.colors, spec.node_mode);
  return out;
}

}  // namespace routepack
