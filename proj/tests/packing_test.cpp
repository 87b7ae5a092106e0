#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "routepack/generator.hpp"
#include "routepack/layout_io.hpp"
#include "routepack/packing.hpp"
#include "test_support.hpp"

namespace routepack {
namespace {

Vertex major(const std::string& id, double lon, double lat) { return {id, {lon, lat}, std::nullopt, VertexKind::kMajor}; }

Edge straight(const std::string& id, const Vertex& a, const Vertex& b) { return {id, a.id, b.id, {a.position, b.position}}; }

// Corridor P-Q heading east; after Q one route goes straight, one turns up
// (the perpendicular side) and, with `third`, one turns 45 degrees down.
RouteNetwork fork_network(bool third = true) {
  const Vertex w1 = major("W1", 0.0, 0.03), w2 = major("W2", 0.0, 0.0), w3 = major("W3", 0.0, -0.03);
  const Vertex p = major("P", 0.05, 0.0), q = major("Q", 0.2, 0.0);
  const Vertex s = major("S", 0.3, 0.0), u = major("U", 0.2, 0.1), d = major("D", 0.27, -0.07);
  std::vector<Vertex> vs = {w1, w2, p, q, s, u};
  std::vector<Edge> es = {straight("w1p", w1, p), straight("w2p", w2, p), straight("pq", p, q), straight("qs", q, s),
                          straight("qu", q, u)};
  std::vector<Route> rs = {{"ru", {"W1", "U"}, {"w1p", "pq", "qu"}, std::nullopt},
                           {"rs", {"W2", "S"}, {"w2p", "pq", "qs"}, std::nullopt}};
  if (third) {
    vs.insert(vs.end(), {w3, d});
    es.insert(es.end(), {straight("w3p", w3, p), straight("qd", q, d)});
    rs.push_back({"rd", {"W3", "D"}, {"w3p", "pq", "qd"}, std::nullopt});
  }
  return RouteNetwork(vs, es, rs);
}

std::size_t participant(const SharedSubpath& sp, const std::string& id) {
  for (std::size_t i = 0; i < sp.participants.size(); ++i) {
    if (sp.participants[i].route_id == id) return i;
  }
  throw Error("no participant " + id);
}

TEST(SharedSubpaths, DisjointRoutesShareNothing) {
  const RouteNetwork net = test::load_network("disjoint.json");
  EXPECT_TRUE(find_shared_subpaths(skeletonize(net, test::default_viewport(net))).empty());
}

TEST(SharedSubpaths, TripleOverlapIsOneSubpath) {
  const RouteNetwork net = test::load_network("triple_overlap.json");
  const auto sps = find_shared_subpaths(skeletonize(net, test::default_viewport(net)));
  ASSERT_EQ(sps.size(), 1u);
  EXPECT_EQ(sps[0].participants.size(), 3u);
  for (const Participant& p : sps[0].participants) EXPECT_TRUE(p.forward);
}

TEST(SharedSubpaths, OppositeDirectionsAreFlagged) {
  const Vertex a = major("A", 0.0, 0.0), b = major("B", 0.1, 0.01), c = major("C", 0.2, 0.0);
  const Vertex n = major("N", 0.0, 0.08), s = major("S", 0.2, -0.08);
  const RouteNetwork net({a, b, c, n, s},
                         {straight("ab", a, b), straight("bc", b, c), straight("na", n, a), straight("cs", c, s)},
                         {{"r1", {"N", "A", "B", "C"}, {"na", "ab", "bc"}, std::nullopt},
                          {"r2", {"S", "C", "B", "A"}, {"cs", "bc", "ab"}, std::nullopt}});
  const auto sps = find_shared_subpaths(skeletonize(net, test::default_viewport(net)));
  ASSERT_EQ(sps.size(), 1u);
  ASSERT_EQ(sps[0].participants.size(), 2u);
  EXPECT_EQ(sps[0].participants[0].route_id, "r1");
  EXPECT_TRUE(sps[0].participants[0].forward);
  EXPECT_FALSE(sps[0].participants[1].forward);
}

TEST(DepartureDelta, StraightAndPerpendicular) {
  const RouteNetwork net = fork_network(false);
  const PackPlan plan = plan_packing(net, test::default_viewport(net), {});
  ASSERT_EQ(plan.subpaths.size(), 1u);
  const SharedSubpath& sp = plan.subpaths[0];
  const double probe = PackParams{}.angle_probe;
  const auto du = departure_delta(plan.graph, sp, participant(sp, "ru"), probe);
  const auto ds = departure_delta(plan.graph, sp, participant(sp, "rs"), probe);
  ASSERT_TRUE(du && ds);
  EXPECT_NEAR(*ds, 0.0, 2.0);
  EXPECT_NEAR(*du, 90.0, 2.0);

  const DivergenceFrame f = divergence_frame(plan.graph, sp, participant(sp, "rs"), probe);
  EXPECT_NEAR(f.angle_of(f.pre), 0.0, 1e-9);
  EXPECT_NEAR(norm(f.perpendicular), 1.0, 1e-12);
  // Up on screen is a quarter turn counter-clockwise from eastward travel.
  EXPECT_LT(f.perpendicular.y, -0.99);
}

TEST(DepartureDelta, ThreeWaySigns) {
  // The merged junction sits a few pixels past Q, which skews the angles but
  // not their order.
  const RouteNetwork net = fork_network();
  const PackPlan plan = plan_packing(net, test::default_viewport(net), {});
  ASSERT_EQ(plan.subpaths.size(), 1u);
  const SharedSubpath& sp = plan.subpaths[0];
  const double probe = PackParams{}.angle_probe;
  const auto du = departure_delta(plan.graph, sp, participant(sp, "ru"), probe);
  const auto ds = departure_delta(plan.graph, sp, participant(sp, "rs"), probe);
  const auto dd = departure_delta(plan.graph, sp, participant(sp, "rd"), probe);
  ASSERT_TRUE(du && ds && dd);
  EXPECT_GT(*du, 45.0);
  EXPECT_NEAR(*ds, 0.0, 10.0);
  EXPECT_LT(*dd, -20.0);
}

TEST(RankRoutes, LargerDeltaGoesToPerpendicularSide) {
  const RouteNetwork net = fork_network();
  const PackPlan plan = plan_packing(net, test::default_viewport(net), {});
  const RankAssignment ranks = rank_routes(plan.graph, plan.subpaths, PackParams{}.angle_probe);
  ASSERT_EQ(ranks.size(), 1u);
  const SharedSubpath& sp = plan.subpaths[0];
  EXPECT_EQ(ranks[0].ranks[participant(sp, "ru")], 0);
  EXPECT_EQ(ranks[0].ranks[participant(sp, "rs")], 1);
  EXPECT_EQ(ranks[0].ranks[participant(sp, "rd")], 2);
}

TEST(RankByDelta, PairwiseLossesAndTies) {
  EXPECT_EQ(rank_by_delta({90.0, 0.0, -90.0}, {"a", "b", "c"}), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(rank_by_delta({-10.0, 30.0}, {"red", "blue"}), (std::vector<int>{1, 0}));
  EXPECT_EQ(rank_by_delta({5.0, 5.0}, {"r2", "r1"}), (std::vector<int>{1, 0}));
}

TEST(ComputeOffsets, SingleRoute) {
  const BundleOffsets b = compute_offsets({0}, {6.0}, 2.0);
  EXPECT_EQ(b.offsets, (std::vector<double>{0.0}));
  EXPECT_DOUBLE_EQ(b.bundle_width, 6.0);
}

TEST(ComputeOffsets, ThreeEqualWidths) {
  const BundleOffsets b = compute_offsets({0, 1, 2}, {4.0, 4.0, 4.0}, 2.0);
  EXPECT_DOUBLE_EQ(b.offsets[0], 6.0);
  EXPECT_DOUBLE_EQ(b.offsets[1], 0.0);
  EXPECT_DOUBLE_EQ(b.offsets[2], -6.0);
  EXPECT_DOUBLE_EQ(b.bundle_width, 16.0);
}

TEST(ComputeOffsets, WidthWeightedCentering) {
  const BundleOffsets b = compute_offsets({0, 1}, {6.0, 2.0}, 2.0);
  EXPECT_DOUBLE_EQ(b.offsets[0] - b.offsets[1], 6.0);
  EXPECT_DOUBLE_EQ(6.0 * b.offsets[0] + 2.0 * b.offsets[1], 0.0);
  EXPECT_DOUBLE_EQ(b.offsets[0], 1.5);
  EXPECT_DOUBLE_EQ(b.offsets[1], -4.5);
}

TEST(ComputeOffsets, OrderFollowsRankNotInputOrder) {
  const BundleOffsets b = compute_offsets({2, 0, 1}, {4.0, 4.0, 4.0}, 1.0);
  EXPECT_GT(b.offsets[1], b.offsets[2]);
  EXPECT_GT(b.offsets[2], b.offsets[0]);
}

TEST(Pack, DisjointRoutesStayPut) {
  const RouteNetwork net = test::load_network("disjoint.json");
  const PackedLayout l = pack(net, test::default_viewport(net));
  EXPECT_EQ(l.iterations, 1);
  EXPECT_TRUE(l.residual.empty());
  EXPECT_EQ(count_crossings(l), 0);
  for (const LayoutRoute& r : l.routes) {
    for (const Stroke& s : r.strokes) EXPECT_EQ(s.offset, 0.0);
  }
}

TEST(Pack, TripleOverlapSeparatesStrokes) {
  const RouteNetwork net = test::load_network("triple_overlap.json");
  const PackedLayout l = pack(net, test::default_viewport(net));
  EXPECT_TRUE(l.residual.empty());
  EXPECT_EQ(count_crossings(l), 0);
  const int shared = skeletonize(net, test::default_viewport(net)).incidence.at("pm").front();
  std::vector<double> offsets;
  std::vector<int> ranks;
  for (const LayoutRoute& r : l.routes) {
    for (const Stroke& s : r.strokes) {
      if (s.segment != shared) continue;
      offsets.push_back(s.offset);
      ranks.push_back(s.rank);
    }
  }
  ASSERT_EQ(offsets.size(), 3u);
  std::sort(offsets.begin(), offsets.end());
  EXPECT_LT(offsets[0], offsets[1]);
  EXPECT_LT(offsets[1], offsets[2]);
  std::sort(ranks.begin(), ranks.end());
  EXPECT_EQ(ranks, (std::vector<int>{0, 1, 2}));
  for (const SeparationSample& s : shared_separations(l)) EXPECT_GE(s.distance, s.required - 0.5) << s.route_a << s.route_b;
}

TEST(Pack, OrderIsKeptAlongTheSubpath) {
  const RouteNetwork net = test::load_network("triple_overlap.json");
  const PackedLayout l = pack(net, test::default_viewport(net));
  for (const LayoutRoute& r : l.routes) {
    std::set<int> ranks;
    for (const Stroke& s : r.strokes) {
      if (s.subpath >= 0) ranks.insert(s.rank);
    }
    EXPECT_LE(ranks.size(), 1u) << r.id;
  }
}

TEST(Pack, OverDenseBundleIsReported) {
  const RouteNetwork net = test::load_network("triple_overlap.json");
  PackParams prm;
  prm.max_bundle_width = 10.0;
  const PackedLayout l = pack(net, test::default_viewport(net), prm);
  const bool reported = std::any_of(l.residual.begin(), l.residual.end(),
                                    [](const ResidualItem& r) { return r.kind == "over-dense"; });
  EXPECT_TRUE(reported);
}

TEST(Pack, Deterministic) {
  const RouteNetwork net = generate_network(GenParams{});
  const Viewport vp = test::default_viewport(net);
  EXPECT_EQ(layout_to_json(pack(net, vp)), layout_to_json(pack(net, vp)));
}

TEST(Pack, SeedFortyTwoConvergesQuickly) {
  const RouteNetwork net = generate_network(GenParams{});
  const PackedLayout l = pack(net, test::default_viewport(net));
  EXPECT_TRUE(l.residual.empty());
  EXPECT_LE(l.iterations, 3);
}

TEST(CountCrossings, Fixtures) {
  for (const auto& [name, expected] : std::vector<std::pair<std::string, int>>{
           {"disjoint.json", 0}, {"x_crossing.json", 1}, {"triple_overlap.json", 0}, {"two_legs.json", 1}}) {
    const RouteNetwork net = test::load_network(name);
    EXPECT_EQ(count_crossings(pack(net, test::default_viewport(net))), expected) << name;
  }
}

TEST(CountCrossings, HandBuiltPaths) {
  PackedLayout l;
  LayoutRoute a, b;
  a.id = "a";
  b.id = "b";
  a.path = {{0.0, 0.0}, {100.0, 0.0}};
  b.path = {{50.0, -50.0}, {50.0, 50.0}};
  l.routes = {a, b};
  EXPECT_EQ(count_crossings(l), 1);
  // Touching at an end point is not a crossing.
  l.routes[1].path = {{50.0, -50.0}, {50.0, 0.0}};
  EXPECT_EQ(count_crossings(l), 0);
  // Weaving over and back is two.
  l.routes[1].path = {{20.0, -10.0}, {40.0, 10.0}, {60.0, -10.0}};
  EXPECT_EQ(count_crossings(l), 2);
}

TEST(BruteForce, MatchesRankingOnFixtures) {
  for (const char* name : {"triple_overlap.json", "two_legs.json"}) {
    const RouteNetwork net = test::load_network(name);
    const Viewport vp = test::default_viewport(net);
    const PackParams prm;
    const PackPlan plan = plan_packing(net, vp, prm.skeleton);
    const RankAssignment ranks = rank_routes(plan.graph, plan.subpaths, prm.angle_probe);
    EXPECT_EQ(count_crossings(layout_from_ranks(net, vp, plan, ranks, prm)),
              brute_force_min_crossings(plan, net, vp, prm))
        << name;
  }
}

TEST(BruteForce, EmptyAndOversized) {
  const RouteNetwork net = test::load_network("disjoint.json");
  const Viewport vp = test::default_viewport(net);
  PackPlan plan = plan_packing(net, vp, {});
  EXPECT_EQ(brute_force_min_crossings(plan, net, vp, {}), 0);

  SharedSubpath big;
  for (int i = 0; i < 8; ++i) big.participants.push_back({"r" + std::to_string(i), 0, 0, true});
  plan.subpaths = {big};
  EXPECT_THROW(brute_force_min_crossings(plan, net, vp, {}), OracleSizeError);
}

TEST(Corridor, AlgorithmMatchesOracle) {
  for (int k = 2; k <= 5; ++k) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const RouteNetwork net = generate_corridor(k, 500 + seed);
      const Viewport vp = test::default_viewport(net);
      const PackParams prm;
      const PackPlan plan = plan_packing(net, vp, prm.skeleton);
      const RankAssignment ranks = rank_routes(plan.graph, plan.subpaths, prm.angle_probe);
      EXPECT_EQ(count_crossings(layout_from_ranks(net, vp, plan, ranks, prm)),
                brute_force_min_crossings(plan, net, vp, prm))
          << "k " << k << " seed " << seed;
    }
  }
}

}  // namespace
}  // namespace routepack
