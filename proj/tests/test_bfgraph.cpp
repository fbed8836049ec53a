#include <gtest/gtest.h>

#include <set>
#include <stdexcept>
#include <vector>

#include "bfc/best_friend_graph.hpp"
#include "bfc/synthetic.hpp"
#include "support/city_instance.hpp"
#include "support/oracles.hpp"

namespace {

bfc::DataMatrix points_1d(std::initializer_list<double> xs) {
  bfc::DataMatrix m;
  for (const double x : xs) m.append_row({&x, 1});
  return m;
}

}  // namespace

TEST(BestFriendGraph, TwoPointsPointAtEachOther) {
  const auto m = points_1d({0.0, 3.0});
  const auto g = bfc::build_best_friend_graph(m);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g.target(0), 1u);
  EXPECT_EQ(g.target(1), 0u);
  EXPECT_DOUBLE_EQ(g.weight(0), 3.0);
  EXPECT_DOUBLE_EQ(g.weight(1), 3.0);
}

TEST(BestFriendGraph, ForcedChainOnThreePoints) {
  const auto g = bfc::build_best_friend_graph(points_1d({0.0, 1.0, 3.0}));
  EXPECT_EQ(g.target(0), 1u);
  EXPECT_EQ(g.target(1), 0u);
  EXPECT_EQ(g.target(2), 1u);
}

TEST(BestFriendGraph, TieBreaksToLowestIndex) {
  // Point 2 sits exactly between 0 and 1.
  bfc::DataMatrix m;
  const double rows[3][2] = {{0.0, 0.0}, {2.0, 0.0}, {1.0, 0.0}};
  for (const auto& r : rows) m.append_row({r, 2});
  const auto g = bfc::build_best_friend_graph(m);
  EXPECT_EQ(g.target(2), 0u);
}

TEST(BestFriendGraph, DuplicatePointsResolveByIndex) {
  // Three coincident points: everyone's nearest neighbor at distance 0 is
  // the lowest other index.
  const auto g = bfc::build_best_friend_graph(points_1d({4.0, 4.0, 4.0}));
  EXPECT_EQ(g.target(0), 1u);
  EXPECT_EQ(g.target(1), 0u);
  EXPECT_EQ(g.target(2), 0u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(g.weight(i), 0.0);
  const auto comps = bfc::find_components(g);
  ASSERT_EQ(comps.size(), 1u);
  EXPECT_DOUBLE_EQ(comps[0].compactness, 0.0);
}

TEST(BestFriendGraph, FewerThanTwoPointsThrows) {
  bfc::DataMatrix one(1, 3);
  EXPECT_THROW((void)bfc::build_best_friend_graph(one), std::invalid_argument);
}

TEST(BestFriendGraph, MatchesFullMatrixOracle) {
  const auto pts = bfc::make_uniform(32, 2, 321u);
  const auto g = bfc::build_best_friend_graph(pts);
  const auto want = oracles::nn_matrix_oracle(pts);
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    EXPECT_EQ(g.target(i), want.target[i]) << "vertex " << i;
    EXPECT_NEAR(g.weight(i), want.weight[i], 1e-12);
  }
}

TEST(BestFriendGraph, WorkerCountDoesNotChangeResult) {
  for (const std::uint32_t seed : {1u, 2u, 3u}) {
    const auto pts = bfc::make_uniform(100, 3, seed);
    const auto g1 = bfc::build_best_friend_graph(pts, 1);
    const auto g8 = bfc::build_best_friend_graph(pts, 8);
    EXPECT_EQ(g1.targets(), g8.targets());
    EXPECT_EQ(g1.weights(), g8.weights());  // bitwise
  }
}

TEST(Components, TwoPointGraph) {
  const auto g = bfc::build_best_friend_graph(points_1d({0.0, 4.0}));
  const auto comps = bfc::find_components(g);
  ASSERT_EQ(comps.size(), 1u);
  EXPECT_EQ(comps[0].cycle_pair, std::make_pair(0u, 1u));
  EXPECT_EQ(comps[0].edge_count, 1u);
  EXPECT_DOUBLE_EQ(comps[0].compactness, 4.0);
}

TEST(Components, WorkedCompactnessExample) {
  // Tree edge weights {3,5,4,7} average to 4.75.
  const auto city = testdata::make_city_instance();
  const auto g = bfc::build_best_friend_graph(city.points);
  const auto comps = bfc::find_components(g);
  ASSERT_EQ(comps.size(), 4u);
  EXPECT_NEAR(comps[0].compactness, 4.75, 1e-9);
  EXPECT_NEAR(comps[1].compactness, 1.0, 1e-9);
  EXPECT_NEAR(comps[2].compactness, 1.5, 1e-9);
  EXPECT_NEAR(comps[3].compactness, 2.0, 1e-9);
}

TEST(Components, MatchUnionFindOracle) {
  const auto pts = bfc::make_uniform(64, 2, 99u);
  const auto g = bfc::build_best_friend_graph(pts);
  const auto comps = bfc::find_components(g);
  const auto want = oracles::component_sets_oracle(g.targets());
  ASSERT_EQ(comps.size(), want.size());
  for (std::size_t c = 0; c < comps.size(); ++c)
    EXPECT_EQ(comps[c].members, want[c]);
}

TEST(Components, ParallelTraversalMatchesSerial) {
  const auto pts = bfc::make_uniform(200, 2, 5u);
  const auto g = bfc::build_best_friend_graph(pts);
  const auto serial = bfc::find_components(g, 1);
  const auto parallel = bfc::find_components(g, 8);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t c = 0; c < serial.size(); ++c) {
    EXPECT_EQ(serial[c].members, parallel[c].members);
    EXPECT_EQ(serial[c].weight_sum, parallel[c].weight_sum);  // bitwise
  }
}

TEST(Forest, TwoPointComponentHasOneEdge) {
  const auto g = bfc::build_best_friend_graph(points_1d({0.0, 4.0}));
  const auto comps = bfc::find_components(g);
  const auto forest = bfc::forest_as_undirected(g, comps);
  ASSERT_EQ(forest.size(), 1u);
  ASSERT_EQ(forest[0].size(), 1u);
  EXPECT_DOUBLE_EQ(forest[0][0].weight, 4.0);
}

TEST(Forest, ChainDropsOneCycleEdge) {
  // 0 -> 1, 1 <-> 2: undirected tree edges are (0,1) and (1,2).
  const auto g = bfc::build_best_friend_graph(points_1d({0.0, 2.0, 3.0}));
  const auto comps = bfc::find_components(g);
  const auto forest = bfc::forest_as_undirected(g, comps);
  ASSERT_EQ(forest.size(), 1u);
  ASSERT_EQ(forest[0].size(), 2u);
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const auto& e : forest[0])
    edges.insert({std::min(e.source, e.target), std::max(e.source, e.target)});
  EXPECT_TRUE(edges.count({0u, 1u}));
  EXPECT_TRUE(edges.count({1u, 2u}));
}

TEST(Forest, ComponentWeightEqualsKruskalMst) {
  // Theorem-level property: each tree is an MST of its complete subgraph.
  const auto pts = bfc::make_uniform(48, 2, 404u);
  const auto g = bfc::build_best_friend_graph(pts);
  const auto comps = bfc::find_components(g);
  for (const auto& comp : comps) {
    const double want = oracles::kruskal_mst_weight(pts, comp.members);
    EXPECT_NEAR(comp.weight_sum, want, 1e-9);
  }
}

TEST(StructuralLemmas, HoldOnRandomInstances) {
  for (const std::uint32_t seed : {10u, 20u, 30u, 40u}) {
    const auto pts = bfc::make_uniform(128, 2, seed);
    const std::size_t n = pts.rows();
    const auto g = bfc::build_best_friend_graph(pts);
    const auto comps = bfc::find_components(g);

    // Component count is bounded by floor(n/2); members >= 2 each.
    EXPECT_LE(comps.size(), n / 2);

    std::size_t mutual_pairs = 0;
    for (std::uint32_t i = 0; i < n; ++i)
      if (i < g.target(i) && g.target(g.target(i)) == i) ++mutual_pairs;
    EXPECT_EQ(mutual_pairs, comps.size());

    for (const auto& comp : comps) {
      EXPECT_GE(comp.members.size(), 2u);
      // The two cycle edges carry identical weights.
      EXPECT_EQ(g.weight(comp.cycle_pair.first), g.weight(comp.cycle_pair.second));
      // Exactly one mutual pair inside the component.
      std::size_t pairs_here = 0;
      for (const std::uint32_t v : comp.members)
        if (v < g.target(v) && g.target(g.target(v)) == v) ++pairs_here;
      EXPECT_EQ(pairs_here, 1u);
    }

    // Every walk reaches the cycle within n hops with non-increasing weights.
    for (std::uint32_t start = 0; start < n; ++start) {
      std::uint32_t v = start;
      double prev = std::numeric_limits<double>::infinity();
      bool reached = false;
      for (std::size_t hop = 0; hop <= n; ++hop) {
        EXPECT_LE(g.weight(v), prev);
        prev = g.weight(v);
        if (g.target(g.target(v)) == v) {
          reached = true;
          break;
        }
        v = g.target(v);
      }
      EXPECT_TRUE(reached) << "walk from " << start << " missed the cycle";
    }
  }
}
