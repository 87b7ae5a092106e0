#include <gtest/gtest.h>

#include <json.hpp>

#include "routepack/network.hpp"
#include "test_support.hpp"

namespace routepack {
namespace {

using nlohmann::json;
using test::load_network;
using test::read_file;

json two_legs_doc() { return json::parse(read_file(test::data_path("two_legs.json"))); }

TEST(ParseNetwork, TwoLegRoute) {
  const RouteNetwork net = load_network("two_legs.json");
  const std::vector<Leg> legs = legs_of(net, net.route("r1"));
  ASSERT_EQ(legs.size(), 2u);
  EXPECT_EQ(legs[0].start_stop, "A");
  EXPECT_EQ(legs[0].end_stop, "B");
  EXPECT_EQ(legs[1].start_stop, "B");
  EXPECT_EQ(legs[1].end_stop, "F");
  EXPECT_EQ(legs[0].edges, (std::vector<std::string>{"e1", "e2", "e3"}));
  EXPECT_EQ(legs[1].edges, (std::vector<std::string>{"e4", "e5", "e6", "e7", "e8"}));
}

TEST(ParseNetwork, ZeroRoutes) {
  json doc = two_legs_doc();
  doc["routes"] = json::array();
  const RouteNetwork net = parse_network(doc.dump());
  EXPECT_TRUE(net.routes().empty());
  EXPECT_EQ(net.vertices().size(), 11u);
}

TEST(ParseNetwork, DisconnectedPathNamesRouteAndStop) {
  json doc = two_legs_doc();
  doc["routes"][0]["path"] = {"e1", "e2", "e3", "e4", "e6", "e7", "e8"};
  try {
    parse_network(doc.dump());
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("disconnected route path r1 at B"), std::string::npos) << e.what();
  }
}

TEST(ParseNetwork, SchemaErrorsNameThePath) {
  json doc = two_legs_doc();
  doc["vertices"][2]["color"] = "red";
  try {
    parse_network(doc.dump());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("$.vertices[2].color"), std::string::npos) << e.what();
  }

  doc = two_legs_doc();
  doc["crs"] = "EPSG:3857";
  EXPECT_THROW(parse_network(doc.dump()), ParseError);
  EXPECT_THROW(parse_network("{\"crs\": "), ParseError);
}

TEST(ParseNetwork, ReferenceAndVolumeErrors) {
  json doc = two_legs_doc();
  doc["edges"][0]["to"] = "nowhere";
  EXPECT_THROW(parse_network(doc.dump()), ValidationError);

  doc = two_legs_doc();
  doc["routes"][0]["volumes"] = {1.0};
  EXPECT_THROW(parse_network(doc.dump()), ValidationError);

  doc = two_legs_doc();
  doc["routes"][0]["volumes"] = {1.0, -2.0};
  EXPECT_THROW(parse_network(doc.dump()), ValidationError);

  doc = two_legs_doc();
  doc["routes"][0]["stops"] = {"A", "F", "B"};
  EXPECT_THROW(parse_network(doc.dump()), ValidationError);
}

TEST(ParseNetwork, RoundTrip) {
  const RouteNetwork net = load_network("triple_overlap.json");
  const RouteNetwork again = parse_network(serialize_network(net));
  EXPECT_EQ(net, again);
  EXPECT_EQ(serialize_network(net), serialize_network(again));
  ASSERT_TRUE(again.route("r2").volumes.has_value());
  EXPECT_EQ(again.vertex("P").label, std::optional<std::string>("Bridge"));
  EXPECT_EQ(again.vertex("M").kind, VertexKind::kWaypoint);
}

TEST(LegsOf, SingleLeg) {
  const RouteNetwork net = load_network("two_legs.json");
  const std::vector<Leg> legs = legs_of(net, net.route("r2"));
  ASSERT_EQ(legs.size(), 1u);
  EXPECT_EQ(legs[0].edges, net.route("r2").path);
}

TEST(LegsOf, ThreeLegsSplitOneTwoThree) {
  std::vector<Vertex> vs;
  for (int i = 0; i <= 6; ++i) vs.push_back({"n" + std::to_string(i), {0.01 * i, 0.0}, std::nullopt, VertexKind::kMajor});
  std::vector<Edge> es;
  for (int i = 0; i < 6; ++i) {
    es.push_back({"e" + std::to_string(i), vs[i].id, vs[i + 1].id, {vs[i].position, vs[i + 1].position}});
  }
  const Route r{"r", {"n0", "n1", "n3", "n6"}, {"e0", "e1", "e2", "e3", "e4", "e5"}, std::nullopt};
  const RouteNetwork net(vs, es, {r});
  const std::vector<Leg> legs = legs_of(net, net.route("r"));
  ASSERT_EQ(legs.size(), 3u);
  EXPECT_EQ(legs[0].edges.size(), 1u);
  EXPECT_EQ(legs[1].edges.size(), 2u);
  EXPECT_EQ(legs[2].edges.size(), 3u);
  std::vector<std::string> all;
  for (const Leg& l : legs) all.insert(all.end(), l.edges.begin(), l.edges.end());
  EXPECT_EQ(all, r.path);
}

TEST(LegsOf, ReversedEdgeTraversal) {
  const std::vector<Vertex> vs = {{"a", {0.0, 0.0}, std::nullopt, VertexKind::kMajor},
                                  {"b", {0.1, 0.0}, std::nullopt, VertexKind::kMajor},
                                  {"c", {0.2, 0.0}, std::nullopt, VertexKind::kMajor}};
  const std::vector<Edge> es = {{"ab", "a", "b", {{0.0, 0.0}, {0.1, 0.0}}},
                                {"cb", "c", "b", {{0.2, 0.0}, {0.1, 0.0}}}};
  const RouteNetwork net(vs, es, {{"r", {"a", "c"}, {"ab", "cb"}, std::nullopt}});
  const RouteChain& ch = net.chain("r");
  EXPECT_EQ(ch.vertices, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(ch.reversed, (std::vector<bool>{false, true}));
}

Viewport square(double lo, double hi, int px, double pad) { return Viewport{px, px, {lo, lo, hi, hi}, pad}; }

TEST(Project, EquatorCenter) {
  const Vec2 p = project(GeoPoint{0.0, 0.0}, square(-10.0, 10.0, 1000, 0.0));
  EXPECT_NEAR(p.x, 500.0, 1e-9);
  EXPECT_NEAR(p.y, 500.0, 1e-9);
}

TEST(Project, BoundsCenterAndCorner) {
  const RouteNetwork net = load_network("triple_overlap.json");
  const Viewport vp = test::default_viewport(net);
  const GeoBounds& b = vp.bounds;
  const Vec2 nw = project(GeoPoint{b.min_lon, b.max_lat}, vp);
  const Vec2 se = project(GeoPoint{b.max_lon, b.min_lat}, vp);
  // Aspect ratio is preserved, so one axis touches the padding exactly.
  EXPECT_TRUE(std::abs(nw.x - 20.0) < 1e-6 || std::abs(nw.y - 20.0) < 1e-6);
  EXPECT_NEAR((nw.x + se.x) / 2.0, 600.0, 0.5);
  EXPECT_NEAR((nw.y + se.y) / 2.0, 400.0, 0.5);
  EXPECT_LT(nw.y, se.y);  // y down
}

TEST(Project, MatchingAspectMapsCornerToPadding) {
  // Mercator stretches latitude, so the box is a little taller than wide and
  // only the vertical extent reaches the padding.
  const Vec2 p = project(GeoPoint{-10.0, 10.0}, square(-10.0, 10.0, 1000, 25.0));
  EXPECT_NEAR(p.y, 25.0, 1e-6);
  EXPECT_GT(p.x, 25.0);
  EXPECT_LT(p.x, 30.0);
}

TEST(Project, OutsideViewportThrows) {
  EXPECT_THROW(project(GeoPoint{30.0, 0.0}, square(-10.0, 10.0, 1000, 0.0)), ProjectionError);
  EXPECT_THROW(project(GeoPoint{0.0, 89.0}, square(-10.0, 10.0, 1000, 0.0)), ProjectionError);
}

TEST(Project, DistinctPointsStayDistinct) {
  const Viewport vp = square(0.0, 0.01, 256, 0.0);
  const Vec2 a = project(GeoPoint{0.005, 0.005}, vp);
  const Vec2 b = project(GeoPoint{0.005 + 1e-6, 0.005}, vp);
  const Vec2 c = project(GeoPoint{0.005, 0.005 + 1e-6}, vp);
  EXPECT_GT(distance(a, b), 0.0);
  EXPECT_GT(distance(a, c), 0.0);
}

}  // namespace
}  // namespace routepack
