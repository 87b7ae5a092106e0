#include <gtest/gtest.h>

#include <set>

#include "routepack/styling.hpp"
#include "test_support.hpp"

namespace routepack {
namespace {

PackedLayout packed(const std::string& name) {
  const RouteNetwork net = test::load_network(name);
  return pack(net, test::default_viewport(net));
}

StyledStroke straight_stroke(double length, double width) {
  StyledStroke st;
  for (double s = 0.0; s <= length + 1e-9; s += 5.0) {
    st.points.push_back({s, 0.0});
    st.s.push_back(s);
    st.widths.push_back(width);
  }
  return st;
}

TEST(Modes, ParseIsCaseInsensitive) {
  EXPECT_EQ(parse_direction_mode("agr"), DirectionMode::kAGR);
  EXPECT_EQ(parse_direction_mode("Lta"), DirectionMode::kLTA);
  EXPECT_FALSE(parse_direction_mode("xx").has_value());
  EXPECT_EQ(all_direction_modes().size(), 8u);
  for (DirectionMode m : all_direction_modes()) EXPECT_EQ(parse_direction_mode(to_string(m)), m);
  EXPECT_EQ(parse_node_mode("cookie-bites"), NodeMode::kCookieBites);
}

TEST(Modes, Traits) {
  EXPECT_TRUE(traits(DirectionMode::kAG).arrows);
  EXPECT_FALSE(traits(DirectionMode::kAG).taper.has_value());
  EXPECT_EQ(traits(DirectionMode::kTR).opacity, Scope::kGlobal);
  EXPECT_EQ(traits(DirectionMode::kLT).taper, Scope::kLocal);
  EXPECT_EQ(traits(DirectionMode::kGTA).taper, Scope::kGlobal);
  EXPECT_TRUE(traits(DirectionMode::kGTA).arrows);
  EXPECT_EQ(default_node_mode(DirectionMode::kAGR), NodeMode::kRings);
  EXPECT_EQ(default_node_mode(DirectionMode::kAG), NodeMode::kNone);
}

TEST(Widths, BaseWidth) {
  const StyleSpec spec;
  EXPECT_DOUBLE_EQ(base_width(std::nullopt, 0, spec), 4.0);
  const std::vector<double> vols = {10.0, 20.0, 30.0};
  EXPECT_DOUBLE_EQ(base_width(vols, 0, spec), 2.0);
  EXPECT_DOUBLE_EQ(base_width(vols, 1, spec), 4.0);
  EXPECT_DOUBLE_EQ(base_width(vols, 2, spec), 6.0);
  EXPECT_DOUBLE_EQ(base_width(std::vector<double>{7.0, 7.0}, 1, spec), 4.0);
}

TEST(Profiles, EndpointsAndMidpoint) {
  const StyleSpec spec;
  EXPECT_DOUBLE_EQ(taper_profile(0.0, 200.0, spec), 6.0);
  EXPECT_DOUBLE_EQ(taper_profile(200.0, 200.0, spec), 2.0);
  EXPECT_DOUBLE_EQ(taper_profile(100.0, 200.0, spec), 4.0);
  EXPECT_DOUBLE_EQ(opacity_profile(0.0, 200.0, spec), 1.0);
  EXPECT_DOUBLE_EQ(opacity_profile(200.0, 200.0, spec), 0.35);
  EXPECT_DOUBLE_EQ(opacity_profile(100.0, 200.0, spec), 0.675);
}

TEST(Arrows, RegularSpacing) {
  const StyleSpec spec;
  const auto arrows = place_arrows(straight_stroke(300.0, 4.0), spec);
  ASSERT_EQ(arrows.size(), 5u);
  for (std::size_t k = 0; k < arrows.size(); ++k) {
    EXPECT_DOUBLE_EQ(arrows[k].s, 30.0 + 60.0 * k);
    EXPECT_NEAR(arrows[k].tangent.x, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(arrows[k].length, 10.0);
  }
}

TEST(Arrows, ShortStrokeGetsOneCentered) {
  const auto arrows = place_arrows(straight_stroke(20.0, 4.0), StyleSpec{});
  ASSERT_EQ(arrows.size(), 1u);
  EXPECT_DOUBLE_EQ(arrows[0].s, 10.0);
}

TEST(Arrows, SizeFollowsTaper) {
  StyleSpec spec;
  StyledStroke st = straight_stroke(300.0, 0.0);
  for (std::size_t i = 0; i < st.s.size(); ++i) st.widths[i] = taper_profile(st.s[i], 300.0, spec);
  const auto arrows = place_arrows(st, spec);
  ASSERT_GE(arrows.size(), 2u);
  for (std::size_t k = 1; k < arrows.size(); ++k) EXPECT_LT(arrows[k].length, arrows[k - 1].length);
}

TEST(Colors, SharingRoutesDiffer) {
  const ColorAssignment ca = assign_colors(packed("triple_overlap.json"), default_palette());
  ASSERT_EQ(ca.colors.size(), 3u);
  std::set<std::string> distinct;
  for (const auto& [id, c] : ca.colors) distinct.insert(c);
  EXPECT_EQ(distinct.size(), 3u);
  EXPECT_TRUE(ca.warnings.empty());
}

TEST(Colors, DisjointRoutesMayShare) {
  const ColorAssignment ca = assign_colors(packed("disjoint.json"), default_palette());
  EXPECT_EQ(ca.colors.at("r1"), ca.colors.at("r2"));
}

TEST(Colors, SmallPaletteWarns) {
  PackedLayout l;
  for (int i = 0; i < 13; ++i) {
    LayoutRoute r;
    r.id = "r" + std::to_string(100 + i);
    r.strokes.push_back(Stroke{});
    l.routes.push_back(r);
  }
  std::vector<std::string> palette(default_palette().begin(), default_palette().begin() + 12);
  const ColorAssignment ca = assign_colors(l, palette);
  EXPECT_EQ(ca.warnings.size(), 1u);
}

TEST(Style, AllModesProduceStrokes) {
  const PackedLayout l = packed("triple_overlap.json");
  for (DirectionMode m : all_direction_modes()) {
    const StyledLayout s = style(l, spec_for(m));
    EXPECT_FALSE(s.strokes.empty()) << to_string(m);
    const bool arrows = std::any_of(s.strokes.begin(), s.strokes.end(),
                                    [](const StyledStroke& st) { return !st.arrows.empty(); });
    EXPECT_EQ(arrows, traits(m).arrows) << to_string(m);
  }
}

TEST(Style, GlobalTaperRunsOverWholeRoute) {
  const PackedLayout l = packed("two_legs.json");
  const StyledLayout s = style(l, spec_for(DirectionMode::kGT));
  // r1 has two legs and no volumes: the taper continues across the stop at B.
  std::vector<const StyledStroke*> legs;
  for (const StyledStroke& st : s.strokes) {
    if (st.route_id == "r1") legs.push_back(&st);
  }
  ASSERT_EQ(legs.size(), 2u);
  EXPECT_DOUBLE_EQ(legs[0]->widths.front(), 6.0);
  EXPECT_DOUBLE_EQ(legs[1]->widths.back(), 2.0);
  EXPECT_NEAR(legs[0]->widths.back(), legs[1]->widths.front(), 0.05);
}

TEST(Style, VolumesScaleLocalTaper) {
  const PackedLayout l = packed("triple_overlap.json");
  const StyledLayout s = style(l, spec_for(DirectionMode::kLT));
  for (const StyledStroke& st : s.strokes) {
    if (st.route_id != "r2") continue;
    // Volumes 10 and 30: the first leg tops out at the minimum width.
    const double expect = st.leg == 0 ? 2.0 : 6.0;
    EXPECT_NEAR(st.widths.front(), expect, 1e-9) << st.leg;
  }
}

TEST(Glyphs, RingsPerStoppingRoute) {
  const PackedLayout l = packed("triple_overlap.json");
  const StyledLayout s = style(l, spec_for(DirectionMode::kAGR));
  std::map<std::string, const NodeGlyph*> by_vertex;
  for (const NodeGlyph& g : s.glyphs) by_vertex[g.vertex_id] = &g;
  ASSERT_TRUE(by_vertex.contains("Q"));
  const NodeGlyph& q = *by_vertex.at("Q");
  std::vector<double> radii;
  for (const GlyphEntry& e : q.entries) {
    if (e.stops) radii.push_back(e.radius);
  }
  EXPECT_EQ(radii, (std::vector<double>{6.0}));
  ASSERT_TRUE(by_vertex.contains("A1"));
  EXPECT_EQ(by_vertex.at("A1")->entries.front().radius, kRingInnerRadius);
  // P is a junction where nobody stops.
  EXPECT_FALSE(by_vertex.contains("P"));
  EXPECT_FALSE(by_vertex.contains("M"));
}

TEST(Glyphs, StackedRings) {
  // Three routes all ending at the same vertex.
  const Vertex a{"A", {0.0, 0.0}, std::nullopt, VertexKind::kMajor};
  const Vertex b{"B", {0.1, 0.05}, std::nullopt, VertexKind::kMajor};
  const RouteNetwork net({a, b}, {{"ab", "A", "B", {a.position, b.position}}},
                         {{"x", {"A", "B"}, {"ab"}, std::nullopt},
                          {"y", {"A", "B"}, {"ab"}, std::nullopt},
                          {"z", {"B", "A"}, {"ab"}, std::nullopt}});
  const PackedLayout l = pack(net, test::default_viewport(net));
  const auto glyphs = node_glyphs(l, assign_colors(l, default_palette()).colors, NodeMode::kRings);
  ASSERT_EQ(glyphs.size(), 2u);
  for (const NodeGlyph& g : glyphs) {
    std::vector<double> radii;
    for (const GlyphEntry& e : g.entries) radii.push_back(e.radius);
    EXPECT_EQ(radii, (std::vector<double>{6.0, 8.0, 10.0})) << g.vertex_id;
  }
}

TEST(Glyphs, NoneModeIsEmpty) {
  const PackedLayout l = packed("triple_overlap.json");
  EXPECT_TRUE(style(l, spec_for(DirectionMode::kAG)).glyphs.empty());
}

TEST(StyleSpec, ValidateRejectsBadRanges) {
  StyleSpec spec;
  spec.width_min = 7.0;
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = StyleSpec{};
  spec.palette.clear();
  EXPECT_THROW(spec.validate(), ValidationError);
}

}  // namespace
}  // namespace routepack
