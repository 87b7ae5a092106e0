#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "routepack/cli.hpp"
#include "routepack/generator.hpp"
#include "routepack/layout_io.hpp"
#include "routepack/packing.hpp"
#include "routepack/styling.hpp"
#include "routepack/svg.hpp"

namespace routepack::cli {

namespace {

// Input problems: missing files, bad flag values. Exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& data, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << data;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  f << data;
  if (!f) throw UsageError("failed writing " + path);
}

std::pair<int, int> parse_size(const std::string& text) {
  static const std::regex re(R"((\d+)[xX](\d+))");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw UsageError("viewport must look like WIDTHxHEIGHT, got " + text);
  const int w = std::stoi(m[1]), h = std::stoi(m[2]);
  if (w < 16 || h < 16 || w > 20000 || h > 20000) throw UsageError("viewport size out of range: " + text);
  return {w, h};
}

std::pair<int, int> parse_range(const std::string& text, const char* what) {
  static const std::regex re(R"((\d+)(?:\.\.(\d+))?)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw UsageError(std::string(what) + " must be N or A..B, got " + text);
  const int a = std::stoi(m[1]);
  const int b = m[2].matched ? std::stoi(m[2]) : a;
  return {a, b};
}

std::string valid_codes() {
  std::string s;
  for (DirectionMode m : all_direction_modes()) s += (s.empty() ? "" : ", ") + to_string(m);
  return s;
}

struct Metrics {
  int crossings = 0;
  std::size_t residual = 0;
  std::map<std::string, std::size_t> residual_by_kind;
  double max_offset = 0.0;
  double max_bundle_width = 0.0;
  struct PerStyle {
    std::string code;
    std::size_t strokes = 0;
    std::size_t arrows = 0;
    std::size_t rings = 0;
  };
  std::vector<PerStyle> styles;
};

Metrics measure(const PackedLayout& layout) {
  Metrics m;
  m.crossings = count_crossings(layout);
  m.residual = layout.residual.size();
  for (const ResidualItem& item : layout.residual) ++m.residual_by_kind[item.kind];
  // Nominal bundle width per segment: passes stacked with the layout gap.
  std::map<int, std::pair<double, int>> per_segment;
  for (const LayoutRoute& r : layout.routes) {
    for (const Stroke& st : r.strokes) {
      m.max_offset = std::max(m.max_offset, std::abs(st.offset));
      auto& [w, k] = per_segment[st.segment];
      w += r.width;
      ++k;
    }
  }
  for (const auto& [seg, wk] : per_segment) {
    m.max_bundle_width = std::max(m.max_bundle_width, wk.first + (wk.second - 1) * layout.gap);
  }
  for (DirectionMode mode : all_direction_modes()) {
    const StyledLayout styled = style(layout, spec_for(mode));
    Metrics::PerStyle ps{to_string(mode), styled.strokes.size(), 0, 0};
    for (const StyledStroke& st : styled.strokes) ps.arrows += st.arrows.size();
    for (const NodeGlyph& g : styled.glyphs) {
      for (const GlyphEntry& e : g.entries) ps.rings += g.mode == NodeMode::kRings && e.stops ? 1 : 0;
    }
    m.styles.push_back(ps);
  }
  return m;
}

std::string metrics_text(const Metrics& m) {
  std::ostringstream out;
  out << "crossings " << m.crossings << "\n";
  out << "residual " << m.residual << "\n";
  for (const auto& [kind, n] : m.residual_by_kind) out << "residual." << kind << " " << n << "\n";
  out << "max_offset " << format_number(m.max_offset) << "\n";
  out << "max_bundle_width " << format_number(m.max_bundle_width) << "\n";
  for (const auto& s : m.styles) {
    out << "style " << s.code << " strokes " << s.strokes << " arrows " << s.arrows << " rings " << s.rings << "\n";
  }
  return out.str();
}

std::string metrics_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["crossings"] = m.crossings;
  j["residual"] = m.residual;
  j["residualByKind"] = m.residual_by_kind;
  j["maxOffset"] = std::round(m.max_offset * 100.0) / 100.0;
  j["maxBundleWidth"] = std::round(m.max_bundle_width * 100.0) / 100.0;
  nlohmann::ordered_json styles = nlohmann::ordered_json::object();
  for (const auto& s : m.styles) styles[s.code] = {{"strokes", s.strokes}, {"arrows", s.arrows}, {"rings", s.rings}};
  j["styles"] = styles;
  return j.dump(2) + "\n";
}

std::vector<std::string> palette_from_env() {
  const char* path = std::getenv("ROUTEPACK_PALETTE");
  if (path == nullptr || *path == '\0') return default_palette();
  const std::string p = path;
  if (p == "cvd") return cvd_palette();
  if (p == "default") return default_palette();
  return load_palette(p);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"routepack: side-by-side packing and rendering of overlapping routes"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");

  struct {
    std::string input, out, viewport = "1200x800";
    double gap = 2.0, bandwidth = 4.0, padding = 20.0;
    int iterations = 5;
  } pk;
  auto* pack_cmd = app.add_subcommand("pack", "Pack a route network into a layout");
  pack_cmd->add_option("--input", pk.input, "Network JSON")->required();
  pack_cmd->add_option("--viewport", pk.viewport, "Canvas size WxH")->capture_default_str();
  pack_cmd->add_option("--gap", pk.gap, "Gap between packed lines, px")->capture_default_str();
  pack_cmd->add_option("--bandwidth", pk.bandwidth, "KDE bandwidth, px")->capture_default_str();
  pack_cmd->add_option("--padding", pk.padding, "Canvas padding, px")->capture_default_str();
  pack_cmd->add_option("--max-iterations", pk.iterations, "Detect and shift rounds")->capture_default_str();
  pack_cmd->add_option("--out", pk.out, "Layout JSON (stdout if omitted)");

  struct {
    std::string layout, style, node_mode, out;
    bool no_legend = false, basemap = false;
  } rd;
  auto* render_cmd = app.add_subcommand("render", "Render a layout to SVG");
  render_cmd->add_option("--layout", rd.layout, "Layout JSON")->required();
  render_cmd->add_option("--style", rd.style, "Representation code: " + valid_codes())->required();
  render_cmd->add_option("--node-mode", rd.node_mode, "rings, cookie-bites, integrated-arrows or none");
  render_cmd->add_flag("--no-legend", rd.no_legend, "Leave out the legend");
  render_cmd->add_flag("--basemap", rd.basemap, "Draw road polylines underneath");
  render_cmd->add_option("--out", rd.out, "SVG file (stdout if omitted)");

  struct {
    int nodes = 10, grid = 0;
    std::string routes = "5", stops = "3..5", out, trials;
    std::uint64_t seed = 42;
  } gn;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic route network");
  gen_cmd->add_option("--nodes", gn.nodes, "Major node count")->capture_default_str();
  gen_cmd->add_option("--routes", gn.routes, "Route count, N or A..B")->capture_default_str();
  gen_cmd->add_option("--stops", gn.stops, "Stops per route, A..B")->capture_default_str();
  gen_cmd->add_option("--seed", gn.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--grid", gn.grid, "Road grid size (0: from node count)")->capture_default_str();
  gen_cmd->add_option("--out", gn.out, "Network JSON (stdout if omitted)");
  gen_cmd->add_option("--emit-trials", gn.trials, "Also write node-pair connectivity trials to this file");

  struct {
    std::string layout;
    bool json = false;
  } st;
  auto* stats_cmd = app.add_subcommand("stats", "Print layout metrics");
  stats_cmd->add_option("--layout", st.layout, "Layout JSON")->required();
  stats_cmd->add_flag("--json", st.json, "Print JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (pack_cmd->parsed()) {
      const auto [w, h] = parse_size(pk.viewport);
      if (!(pk.gap >= 0.0)) throw UsageError("--gap must be non-negative");
      if (!(pk.bandwidth > 0.0)) throw UsageError("--bandwidth must be positive");
      if (pk.iterations < 1) throw UsageError("--max-iterations must be at least 1");
      const RouteNetwork net = parse_network(read_file(pk.input));
      const Viewport vp = fit_viewport(net, w, h, pk.padding);
      PackParams params;
      params.gap = pk.gap;
      params.skeleton.bandwidth = pk.bandwidth;
      params.max_iterations = pk.iterations;
      const PackedLayout layout = pack(net, vp, params);
      write_output(pk.out, layout_to_json(layout), out);
      if (!layout.residual.empty()) {
        err << "warning: " << layout.residual.size() << " residual item(s) after " << layout.iterations
            << " iteration(s)\n";
        for (const ResidualItem& item : layout.residual) {
          err << "  " << item.kind;
          for (const std::string& r : item.routes) err << " " << r;
          err << ": " << item.detail << "\n";
        }
      }
      for (const ResidualItem& item : layout.warnings) {
        err << "warning: " << item.kind;
        for (const std::string& r : item.routes) err << " " << r;
        err << ": " << item.detail << "\n";
      }
    } else if (render_cmd->parsed()) {
      const auto mode = parse_direction_mode(rd.style);
      if (!mode) throw UsageError("unknown style code '" + rd.style + "'; valid codes: " + valid_codes());
      StyleSpec spec = spec_for(*mode);
      if (!rd.node_mode.empty()) {
        const auto nm = parse_node_mode(rd.node_mode);
        if (!nm) throw UsageError("unknown node mode '" + rd.node_mode + "'; valid: rings, cookie-bites, integrated-arrows, none");
        spec.node_mode = *nm;
      }
      spec.palette = palette_from_env();
      const PackedLayout layout = parse_layout(read_file(rd.layout));
      spec.gap = layout.gap;
      const StyledLayout styled = style(layout, spec);
      for (const std::string& w : styled.warnings) err << "warning: " << w << "\n";
      RenderOptions opts;
      opts.legend = !rd.no_legend;
      if (rd.basemap) opts.basemap = layout.basemap;
      write_output(rd.out, render(styled, layout.viewport, opts), out);
    } else if (gen_cmd->parsed()) {
      GenParams params;
      params.nodes = gn.nodes;
      params.grid = gn.grid;
      params.seed = gn.seed;
      std::tie(params.routes_min, params.routes_max) = parse_range(gn.routes, "--routes");
      std::tie(params.stops_min, params.stops_max) = parse_range(gn.stops, "--stops");
      const RouteNetwork net = generate_network(params);
      write_output(gn.out, serialize_network(net), out);
      if (!gn.trials.empty()) {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const Trial& t : trials(net)) j.push_back({{"a", t.a}, {"b", t.b}, {"connected", t.connected}});
        write_output(gn.trials, j.dump(2) + "\n", out);
      }
    } else if (stats_cmd->parsed()) {
      const PackedLayout layout = parse_layout(read_file(st.layout));
      const Metrics m = measure(layout);
      out << (st.json ? metrics_json(m) : metrics_text(m));
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace routepack::cli
