#include <gtest/gtest.h>

#include "routepack/layout_io.hpp"
#include "test_support.hpp"

namespace routepack {
namespace {

TEST(LayoutJson, RoundTrip) {
  for (const char* name : {"triple_overlap.json", "two_legs.json", "x_crossing.json"}) {
    const RouteNetwork net = test::load_network(name);
    const PackedLayout l = pack(net, test::default_viewport(net));
    const std::string js = layout_to_json(l);
    const PackedLayout back = parse_layout(js);
    EXPECT_EQ(layout_to_json(back), js) << name;
    ASSERT_EQ(back.routes.size(), l.routes.size());
    for (std::size_t i = 0; i < l.routes.size(); ++i) {
      EXPECT_EQ(back.routes[i].id, l.routes[i].id);
      EXPECT_EQ(back.routes[i].strokes.size(), l.routes[i].strokes.size());
      EXPECT_EQ(back.routes[i].stops.size(), l.routes[i].stops.size());
    }
    EXPECT_EQ(count_crossings(back), l.crossings) << name;
  }
}

TEST(LayoutJson, KeepsVolumesAndIterations) {
  const RouteNetwork net = test::load_network("triple_overlap.json");
  const PackedLayout back = parse_layout(layout_to_json(pack(net, test::default_viewport(net))));
  ASSERT_TRUE(back.route("r2").volumes.has_value());
  EXPECT_EQ(*back.route("r2").volumes, (std::vector<double>{10.0, 30.0}));
  EXPECT_GE(back.iterations, 1);
}

TEST(LayoutJson, Rejects) {
  EXPECT_THROW(parse_layout("{"), ParseError);
  EXPECT_THROW(parse_layout("[]"), ParseError);
  EXPECT_THROW(parse_layout(R"({"viewport": 3, "routes": []})"), ParseError);
}

}  // namespace
}  // namespace routepack
