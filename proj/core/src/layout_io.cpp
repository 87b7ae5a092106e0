#include "routepack/layout_io.hpp"

#include <cmath>

#include "json.hpp"

namespace routepack {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

double round3(double v) {
  const double r = std::round(v * 1000.0) / 1000.0;
  return r == 0.0 ? 0.0 : r;
}

ordered point_json(Vec2 p) { return ordered::array({round3(p.x), round3(p.y)}); }

Vec2 point_from(const json& v) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ParseError("expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Polyline polyline_from(const json& v) {
  Polyline out;
  for (const json& p : v) out.push_back(point_from(p));
  return out;
}

}  // namespace

std::string layout_to_json(const PackedLayout& layout) {
  ordered doc;
  const Viewport& vp = layout.viewport;
  doc["viewport"] = {{"width", vp.width},
                     {"height", vp.height},
                     {"padding", vp.padding},
                     {"bounds",
                      {{"minLon", vp.bounds.min_lon},
                       {"minLat", vp.bounds.min_lat},
                       {"maxLon", vp.bounds.max_lon},
                       {"maxLat", vp.bounds.max_lat}}}};
  ordered routes = ordered::array();
  for (const LayoutRoute& r : layout.routes) {
    ordered jr;
    jr["id"] = r.id;
    if (r.color) jr["color"] = *r.color;
    jr["width"] = r.width;
    if (r.volumes) jr["volumes"] = *r.volumes;
    ordered strokes = ordered::array();
    for (const Stroke& st : r.strokes) {
      ordered pts = ordered::array();
      for (const Vec2& p : st.points) pts.push_back(point_json(p));
      strokes.push_back({{"segId", st.segment},
                         {"step", st.step},
                         {"leg", st.leg},
                         {"subpath", st.subpath},
                         {"rank", st.rank},
                         {"offsetPx", round3(st.offset)},
                         {"points", pts}});
    }
    jr["strokes"] = strokes;
    ordered stops = ordered::array();
    for (const StopMark& s : r.stops) {
      stops.push_back({{"vertexId", s.vertex_id}, {"x", round3(s.position.x)}, {"y", round3(s.position.y)}});
    }
    jr["stops"] = stops;
    routes.push_back(jr);
  }
  doc["routes"] = routes;
  auto items = [](const std::vector<ResidualItem>& list) {
    ordered arr = ordered::array();
    for (const ResidualItem& item : list) {
      arr.push_back({{"kind", item.kind},
                     {"routes", item.routes},
                     {"segments", item.segments},
                     {"length", round3(item.length)},
                     {"detail", item.detail}});
    }
    return arr;
  };
  doc["residual"] = items(layout.residual);
  if (!layout.warnings.empty()) doc["warnings"] = items(layout.warnings);
  doc["crossings"] = layout.crossings;
  doc["iterations"] = layout.iterations;
  doc["gap"] = layout.gap;
  if (!layout.basemap.empty()) {
    ordered base = ordered::array();
    for (const Polyline& line : layout.basemap) {
      ordered pts = ordered::array();
      for (const Vec2& p : line) pts.push_back(point_json(p));
      base.push_back(pts);
    }
    doc["basemap"] = base;
  }
  return doc.dump(1) + "\n";
}

PackedLayout parse_layout(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("$: malformed JSON: ") + e.what());
  }
  PackedLayout layout;
  try {
    if (!doc.is_object()) throw ParseError("$: expected an object");
    const json& jv = doc.at("viewport");
    layout.viewport.width = jv.at("width").get<int>();
    layout.viewport.height = jv.at("height").get<int>();
    layout.viewport.padding = jv.value("padding", 0.0);
    if (jv.contains("bounds")) {
      const json& b = jv["bounds"];
      layout.viewport.bounds = {b.at("minLon").get<double>(), b.at("minLat").get<double>(),
                                b.at("maxLon").get<double>(), b.at("maxLat").get<double>()};
    }
    if (layout.viewport.width <= 0 || layout.viewport.height <= 0) throw ParseError("$.viewport: size must be positive");

    for (const json& jr : doc.at("routes")) {
      LayoutRoute r;
      r.id = jr.at("id").get<std::string>();
      if (jr.contains("color")) r.color = jr["color"].get<std::string>();
      r.width = jr.value("width", 6.0);
      if (jr.contains("volumes")) r.volumes = jr["volumes"].get<std::vector<double>>();
      double s = 0.0;
      for (const json& js : jr.at("strokes")) {
        Stroke st;
        st.segment = js.at("segId").get<int>();
        st.step = js.value("step", r.strokes.size());
        st.leg = js.value("leg", std::size_t{0});
        st.subpath = js.value("subpath", -1);
        st.rank = js.at("rank").get<int>();
        st.offset = js.at("offsetPx").get<double>();
        st.points = polyline_from(js.at("points"));
        r.step_s.push_back(s);
        for (std::size_t i = 0; i < st.points.size(); ++i) {
          if (i == 0 && !r.path.empty()) continue;
          if (!r.path.empty()) s += distance(r.path.back(), st.points[i]);
          r.path.push_back(st.points[i]);
          r.path_s.push_back(s);
        }
        r.strokes.push_back(std::move(st));
      }
      r.step_s.push_back(s);
      for (const json& jp : jr.at("stops")) {
        r.stops.push_back({jp.at("vertexId").get<std::string>(), {jp.at("x").get<double>(), jp.at("y").get<double>()}});
      }
      if (r.path.empty() && !r.stops.empty()) {
        r.path.push_back(r.stops.front().position);
        r.path_s.push_back(0.0);
      }
      layout.routes.push_back(std::move(r));
    }
    auto read_items = [&](const char* key, std::vector<ResidualItem>& into) {
      if (!doc.contains(key)) return;
      for (const json& ji : doc[key]) {
        ResidualItem item;
        item.kind = ji.at("kind").get<std::string>();
        item.routes = ji.value("routes", std::vector<std::string>{});
        item.segments = ji.value("segments", std::vector<int>{});
        item.length = ji.value("length", 0.0);
        item.detail = ji.value("detail", std::string{});
        into.push_back(std::move(item));
      }
    };
    read_items("residual", layout.residual);
    read_items("warnings", layout.warnings);
    layout.crossings = doc.value("crossings", 0);
    layout.iterations = doc.value("iterations", 0);
    layout.gap = doc.value("gap", 2.0);
    if (doc.contains("basemap")) {
      for (const json& line : doc["basemap"]) layout.basemap.push_back(polyline_from(line));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("$: invalid layout: ") + e.what());
  }
  return layout;
}

}  // namespace routepack
