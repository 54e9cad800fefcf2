#include "conflict/mapproc.hpp"
#include "conflict/synth.hpp"

#include "fixtures.hpp"

#include <fmt/format.h>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

using namespace conflict;
using fixtures::line;

namespace {

LaneSegment seg(std::string id, std::initializer_list<Vec2> pts, std::set<std::string> next = {})
{
  return {std::move(id), line(pts), std::move(next), {}};
}

/// Graph-walk oracle: number of maximal chains under the unique-link rule.
std::size_t chain_count(const std::vector<LaneSegment>& segments)
{
  std::map<std::string, std::set<std::string>> succ;
  std::map<std::string, std::set<std::string>> pred;
  for (const auto& s : segments) {
    succ[s.id];
    pred[s.id];
  }
  for (const auto& s : segments) {
    for (const auto& n : s.successors) {
      succ[s.id].insert(n);
      pred[n].insert(s.id);
    }
  }
  std::size_t links = 0;
  for (const auto& [id, next] : succ) {
    if (next.size() == 1 && pred[*next.begin()].size() == 1) ++links;
  }
  return segments.size() - links;
}

}  // namespace

TEST(Connectivity, BackLinksAndUnknownIds)
{
  const auto out = normalize_connectivity({seg("a", {{0, 0}, {1, 0}}, {"b"}), seg("b", {{1, 0}, {2, 0}})});
  EXPECT_EQ(out[1].predecessors, std::set<std::string>{"a"});
  EXPECT_THROW(normalize_connectivity({seg("a", {{0, 0}, {1, 0}}, {"zz"})}), InvalidInput);
  EXPECT_THROW(normalize_connectivity({seg("a", {{0, 0}, {1, 0}}), seg("a", {{1, 0}, {2, 0}})}), InvalidInput);
}

TEST(MergeLanes, LinearChain)
{
  const auto merged = merge_lanes({seg("c", {{20, 0}, {30, 0}}), seg("a", {{0, 0}, {10, 0}}, {"b"}),
                                   seg("b", {{10, 0}, {20, 0}}, {"c"})});
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged[0].id, "a");
  EXPECT_EQ(merged[0].segment_ids, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_DOUBLE_EQ(merged[0].centerline.length(), 30.0);
}

TEST(MergeLanes, DivergeSplitsChains)
{
  const auto merged = merge_lanes({seg("a", {{0, 0}, {10, 0}}, {"b", "c"}), seg("b", {{10, 0}, {20, 0}}),
                                   seg("c", {{10, 0}, {20, 5}})});
  ASSERT_EQ(merged.size(), 3u);
  for (const auto& m : merged) EXPECT_EQ(m.segment_ids.size(), 1u);
}

TEST(MergeLanes, CycleIsCutAtLowestId)
{
  const auto merged = merge_lanes({seg("q", {{0, 0}, {10, 0}}, {"r"}), seg("r", {{10, 0}, {10, 10}}, {"p"}),
                                   seg("p", {{10, 10}, {0, 0}}, {"q"})});
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_TRUE(merged[0].cycle_cut);
  EXPECT_EQ(merged[0].segment_ids.front(), "p");
}

TEST(MergeLanes, GridNetworkMatchesGraphWalk)
{
  // 3 x 3 grid of eastbound and northbound segments; interior nodes branch.
  std::vector<LaneSegment> grid;
  auto id = [](char dir, int i, int j) { return fmt::format("{}{}{}", dir, i, j); };
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Vec2 p{10.0 * i, 10.0 * j};
      std::set<std::string> east_next;
      std::set<std::string> north_next;
      if (i + 1 < 3) east_next.insert(id('e', i + 1, j));
      if (j + 1 < 3) east_next.insert(id('n', i + 1, j));
      if (j + 1 < 3) north_next.insert(id('n', i, j + 1));
      grid.push_back({id('e', i, j), line({p, p + Vec2{10.0, 0.0}}), east_next, {}});
      grid.push_back({id('n', i, j), line({p, p + Vec2{0.0, 10.0}}), north_next, {}});
    }
  }
  // Drop links whose targets do not exist.
  std::set<std::string> ids;
  for (const auto& s : grid) ids.insert(s.id);
  for (auto& s : grid) std::erase_if(s.successors, [&](const std::string& n) { return !ids.contains(n); });
  EXPECT_EQ(merge_lanes(grid).size(), chain_count(normalize_connectivity(grid)));
}

TEST(MergeLanes, InputOrderDoesNotMatter)
{
  auto segments = four_leg_intersection();
  const auto reference = merge_lanes(segments);
  std::mt19937 rng(3);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(segments.begin(), segments.end(), rng);
    const auto again = merge_lanes(segments);
    ASSERT_EQ(again.size(), reference.size());
    for (std::size_t i = 0; i < again.size(); ++i) {
      EXPECT_EQ(again[i].segment_ids, reference[i].segment_ids);
      EXPECT_EQ(again[i].centerline.vertices(), reference[i].centerline.vertices());
    }
  }
}

TEST(ResegmentLane, StraightLane)
{
  const auto lane = resegment_lane("a", line({{0, 0}, {40, 0}, {100, 0}}));
  for (std::size_t k = 0; k <= kLaneVectorCount; ++k) {
    EXPECT_NEAR(lane.breakpoints[k].x, 5.0 * k, 1e-9);
    EXPECT_NEAR(lane.breakpoints[k].y, 0.0, 1e-12);
  }
  EXPECT_NEAR(lane.length(), 100.0, 1e-9);
}

TEST(ResegmentLane, ArcBreakpointsLieOnArc)
{
  std::vector<Vec2> pts;
  for (int i = 0; i <= 90; ++i) {
    const double phi = std::numbers::pi * i / 90.0;
    pts.push_back({25.0 * std::cos(phi), 25.0 * std::sin(phi)});
  }
  const Polyline arc(pts);
  const auto lane = resegment_lane("arc", arc);
  for (const auto& b : lane.breakpoints) EXPECT_NEAR(b.norm(), 25.0, 0.05);
  EXPECT_EQ(lane.tail(), arc.front());
  EXPECT_NEAR(distance(lane.head(), arc.back()), 0.0, 1e-9);
}

TEST(Adjacency, ChainedAndIsolated)
{
  const auto a = resegment_lane("a", line({{0, 0}, {10, 0}}));
  const auto b = resegment_lane("b", line({{10.05, 0}, {20, 0}}));
  const auto c = resegment_lane("c", line({{0, 50}, {10, 50}}));
  const auto adj = build_adjacency({a, b, c});
  std::size_t trues = 0;
  for (const auto& row : adj) trues += static_cast<std::size_t>(std::count(row.begin(), row.end(), true));
  EXPECT_EQ(trues, 1u);
  EXPECT_TRUE(adj[0][1]);
  EXPECT_FALSE(build_adjacency({a, c})[0][1]);
}

TEST(LaneGraph, FourLegIntersectionEndpointsOracle)
{
  const auto graph = build_lane_graph(four_leg_intersection());
  ASSERT_EQ(graph.lanes.size(), 20u);
  for (std::size_t i = 0; i < graph.lanes.size(); ++i) {
    for (std::size_t j = 0; j < graph.lanes.size(); ++j) {
      const bool touch = i != j && distance(graph.lanes[i].head(), graph.lanes[j].tail()) <= kAdjacencyTolerance;
      EXPECT_EQ(graph.adjacency[i][j], touch) << graph.lanes[i].id << " -> " << graph.lanes[j].id;
    }
  }
}
