#include "routepack/svg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace routepack {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string pt(Vec2 p) { return format_number(p.x) + "," + format_number(p.y); }

// Per-vertex unit normals, averaged over the adjacent pieces.
std::vector<Vec2> vertex_normals(const Polyline& line) {
  const std::size_t n = line.size();
  std::vector<Vec2> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 acc{0.0, 0.0};
    if (i > 0) acc += left_normal(normalized(line[i] - line[i - 1]));
    if (i + 1 < n) acc += left_normal(normalized(line[i + 1] - line[i]));
    if (norm(acc) < 1e-9 && i > 0) acc = left_normal(normalized(line[i] - line[i - 1]));
    out[i] = norm(acc) > 0.0 ? normalized(acc) : Vec2{0.0, 0.0};
  }
  return out;
}

// Closed outline of points [lo, hi] with half-width w/2 + extra.
std::string outline(const StyledStroke& st, const std::vector<Vec2>& nrm, std::size_t lo, std::size_t hi,
                    double extra) {
  std::string d = "M";
  for (std::size_t i = lo; i <= hi; ++i) {
    d += (i == lo ? "" : " L") + pt(st.points[i] + nrm[i] * (st.widths[i] / 2.0 + extra));
  }
  for (std::size_t i = hi + 1; i-- > lo;) d += " L" + pt(st.points[i] - nrm[i] * (st.widths[i] / 2.0 + extra));
  return d + " Z";
}

bool uniform_opacity(const StyledStroke& st) {
  for (double o : st.opacities) {
    if (std::abs(o - st.opacities.front()) > 1e-12) return false;
  }
  return true;
}

std::string arrow_path(const ArrowPlacement& a) {
  const Vec2 n = left_normal(a.tangent);
  const Vec2 tip = a.position + a.tangent * (a.length / 2.0);
  const Vec2 back = a.position - a.tangent * (a.length / 2.0);
  const double half = a.length * 0.35;
  return "M" + pt(tip) + " L" + pt(back + n * half) + " L" + pt(a.position) + " L" + pt(back - n * half) + " Z";
}

std::string head_path(Vec2 tip, Vec2 dir, double len) {
  const Vec2 n = left_normal(dir);
  const Vec2 back = tip - dir * len;
  return "M" + pt(tip) + " L" + pt(back + n * (len * 0.5)) + " L" + pt(back - n * (len * 0.5)) + " Z";
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string render_legend(const StyledLayout& styled) {
  constexpr double kRow = 18.0;
  const ModeTraits t = traits(styled.spec.mode);
  std::vector<std::string> notes;
  if (t.arrows) notes.push_back("arrow: direction of travel");
  if (t.taper) notes.push_back(*t.taper == Scope::kLocal ? "line narrows from each stop to the next"
                                                         : "line narrows from first stop to last");
  if (t.opacity) notes.push_back("line fades toward the end of the route");
  switch (styled.spec.node_mode) {
    case NodeMode::kRings: notes.push_back("ring: route stops here"); break;
    case NodeMode::kCookieBites: notes.push_back("notch: arrival (in) or departure (out) at a stop"); break;
    case NodeMode::kIntegratedArrows: notes.push_back("arrowhead at node: route arrives and stops"); break;
    case NodeMode::kNone: break;
  }
  const std::size_t rows = styled.colors.size() + notes.size();
  std::ostringstream out;
  out << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect x=\"8.00\" y=\"8.00\" width=\"260.00\" height=\"" << format_number(8.0 + kRow * rows)
      << "\" fill=\"#ffffff\" fill-opacity=\"0.85\" stroke=\"#888888\" stroke-width=\"0.50\"/>\n";
  double y = 8.0 + kRow / 2.0 + 4.0;
  for (const auto& [id, color] : styled.colors) {
    out << "<g class=\"legend-route\"><rect x=\"14.00\" y=\"" << format_number(y - 3.0)
        << "\" width=\"18.00\" height=\"6.00\" fill=\"" << escape(color) << "\"/><text x=\"38.00\" y=\""
        << format_number(y + 4.0) << "\">" << escape(id) << "</text></g>\n";
    y += kRow;
  }
  for (const std::string& note : notes) {
    out << "<g class=\"legend-mode\"><text x=\"14.00\" y=\"" << format_number(y + 4.0) << "\">" << escape(note)
        << "</text></g>\n";
    y += kRow;
  }
  out << "</g>\n";
  return out.str();
}

std::string render(const StyledLayout& styled, const Viewport& vp, const RenderOptions& options) {
  std::ostringstream out;
  const std::string w = std::to_string(vp.width), h = std::to_string(vp.height);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  out << "<rect id=\"background\" x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"#ffffff\"/>\n";
  const bool empty = styled.strokes.empty() && styled.glyphs.empty() && options.basemap.empty();
  if (empty) {
    out << "</svg>\n";
    return out.str();
  }
  out << "<defs><clipPath id=\"frame\"><rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
      << "\"/></clipPath></defs>\n";
  out << "<g clip-path=\"url(#frame)\">\n";

  if (!options.basemap.empty()) {
    out << "<g id=\"basemap\" fill=\"none\" stroke=\"#d9d9d9\" stroke-width=\"1.00\">\n";
    for (const Polyline& line : options.basemap) {
      if (line.size() < 2) continue;
      out << "<path d=\"M";
      for (std::size_t i = 0; i < line.size(); ++i) out << (i ? " L" : "") << pt(line[i]);
      out << "\"/>\n";
    }
    out << "</g>\n";
  }

  std::vector<std::vector<Vec2>> normals;
  for (const StyledStroke& st : styled.strokes) normals.push_back(vertex_normals(st.points));

  out << "<g id=\"halos\" fill=\"#ffffff\">\n";
  for (std::size_t k = 0; k < styled.strokes.size(); ++k) {
    const StyledStroke& st = styled.strokes[k];
    if (!st.halo || st.points.size() < 2) continue;
    out << "<path class=\"halo\" data-route=\"" << escape(st.route_id) << "\" data-leg=\"" << st.leg << "\" d=\""
        << outline(st, normals[k], 0, st.points.size() - 1, styled.spec.halo_extra) << "\"/>\n";
  }
  out << "</g>\n";

  out << "<g id=\"strokes\">\n";
  for (std::size_t k = 0; k < styled.strokes.size(); ++k) {
    const StyledStroke& st = styled.strokes[k];
    if (st.points.size() < 2) continue;
    const std::string attrs =
        "data-route=\"" + escape(st.route_id) + "\" data-leg=\"" + std::to_string(st.leg) + "\" fill=\"" +
        escape(st.color) + "\"";
    if (uniform_opacity(st)) {
      out << "<path class=\"stroke\" " << attrs << " fill-opacity=\"" << format_number(st.opacities.front())
          << "\" d=\"" << outline(st, normals[k], 0, st.points.size() - 1, 0.0) << "\"/>\n";
      continue;
    }
    out << "<g class=\"stroke\" " << attrs << ">\n";
    for (std::size_t i = 0; i + 1 < st.points.size(); ++i) {
      const double o = (st.opacities[i] + st.opacities[i + 1]) / 2.0;
      out << "<path fill-opacity=\"" << format_number(o) << "\" d=\"" << outline(st, normals[k], i, i + 1, 0.0)
          << "\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</g>\n";

  out << "<g id=\"arrows\" stroke=\"#ffffff\" stroke-width=\"0.75\" stroke-linejoin=\"round\">\n";
  for (const StyledStroke& st : styled.strokes) {
    for (const ArrowPlacement& a : st.arrows) {
      out << "<path class=\"arrow\" data-route=\"" << escape(st.route_id) << "\" fill=\"" << escape(st.color)
          << "\" d=\"" << arrow_path(a) << "\"/>\n";
    }
  }
  out << "</g>\n";

  out << "<g id=\"nodes\">\n";
  for (const NodeGlyph& g : styled.glyphs) {
    out << "<g class=\"node\" data-vertex=\"" << escape(g.vertex_id) << "\">\n";
    if (g.mode == NodeMode::kRings) {
      for (auto it = g.entries.rbegin(); it != g.entries.rend(); ++it) {
        if (!it->stops) continue;
        out << "<circle class=\"ring\" data-route=\"" << escape(it->route_id) << "\" cx=\""
            << format_number(g.center.x) << "\" cy=\"" << format_number(g.center.y) << "\" r=\""
            << format_number(it->radius) << "\" fill=\"none\" stroke=\"" << escape(it->color) << "\" stroke-width=\""
            << format_number(kRingThickness) << "\"/>\n";
      }
      out << "<circle class=\"hub\" cx=\"" << format_number(g.center.x) << "\" cy=\"" << format_number(g.center.y)
          << "\" r=\"" << format_number(g.inner_radius) << "\" fill=\"#ffffff\"/>\n";
    } else {
      out << "<circle class=\"hub\" cx=\"" << format_number(g.center.x) << "\" cy=\"" << format_number(g.center.y)
          << "\" r=\"" << format_number(g.inner_radius) << "\" fill=\"#ffffff\" stroke=\"#333333\" stroke-width=\"1.00\"/>\n";
      for (const GlyphEntry& e : g.entries) {
        if (g.mode == NodeMode::kCookieBites) {
          // Notch on the hub rim, pointing in for arrivals and out for departures.
          const Vec2 rim = g.center - e.direction * (e.inward ? g.inner_radius : -g.inner_radius);
          const Vec2 tip = e.inward ? g.center - e.direction * (g.inner_radius * 0.3) : rim + e.direction * 4.0;
          const Vec2 dir = e.direction;
          out << "<path class=\"bite\" data-route=\"" << escape(e.route_id) << "\" fill=\"" << escape(e.color)
              << "\" d=\"" << head_path(tip, dir, 5.0) << "\"/>\n";
        } else {
          out << "<path class=\"head\" data-route=\"" << escape(e.route_id) << "\" fill=\"" << escape(e.color)
              << "\" d=\"" << head_path(e.anchor, e.direction, 8.0) << "\"/>\n";
        }
      }
    }
    out << "</g>\n";
  }
  out << "</g>\n";
  out << "</g>\n";
  if (options.legend) out << render_legend(styled);
  out << "</svg>\n";
  return out.str();
}

}  // namespace routepack
