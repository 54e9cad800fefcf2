#include "conflict/geometry.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace conflict;
using fixtures::line;
using fixtures::make_track;
using fixtures::straight;

TEST(Polyline, RejectsDegenerateInput)
{
  EXPECT_THROW(Polyline({{0.0, 0.0}}), DegenerateGeometry);
  EXPECT_THROW(Polyline({{0.0, 0.0}, {0.0, 0.0}}), DegenerateGeometry);
  const std::vector<Vec2> pts{{0, 0}, {0, 0}, {1, 0}, {1, 0}};
  EXPECT_EQ(Polyline::from_points(pts).size(), 2u);
}

TEST(Polyline, ArcLengthAndPointAt)
{
  const auto p = line({{0, 0}, {3, 4}, {3, 10}});
  EXPECT_DOUBLE_EQ(p.length(), 11.0);
  EXPECT_NEAR(p.point_at(8.0).y, 7.0, 1e-12);
  EXPECT_NEAR(p.point_at(-5.0).x, -3.0, 1e-12);
}

TEST(Segments, ProperAndCollinearIntersections)
{
  const auto hit = intersect_segments({0, 0}, {2, 2}, {0, 2}, {2, 0});
  ASSERT_TRUE(hit);
  EXPECT_NEAR(hit->point.x, 1.0, 1e-12);
  EXPECT_NEAR(hit->u, 0.5, 1e-12);
  EXPECT_FALSE(intersect_segments({0, 0}, {1, 0}, {0, 1}, {1, 1}));
  const auto overlap = intersect_segments({0, 0}, {4, 0}, {2, 0}, {6, 0});
  ASSERT_TRUE(overlap);
  EXPECT_NEAR(overlap->point.x, 2.0, 1e-12);
  EXPECT_TRUE(intersect_segments({0, 0}, {1, 0}, {1, 0}, {1, 1}));
}

TEST(Offset, StraightSegment)
{
  const auto [left, right] = offset_polylines(line({{0, 0}, {10, 0}}), 3.0);
  for (const auto& v : left.vertices()) EXPECT_NEAR(v.y, 3.0, 1e-12);
  for (const auto& v : right.vertices()) EXPECT_NEAR(v.y, -3.0, 1e-12);
}

TEST(Offset, RightAngleVerticesStayAtDistance)
{
  const auto path = line({{0, 0}, {10, 0}, {10, 10}});
  const auto [left, right] = offset_polylines(path, 1.0);
  // Dense sampling of the path as the distance oracle.
  auto nearest = [&](Vec2 q) {
    double best = std::numeric_limits<double>::max();
    for (int i = 0; i <= 20000; ++i) best = std::min(best, distance(q, path.point_at(path.length() * i / 20000.0)));
    return best;
  };
  for (const auto* side : {&left, &right}) {
    for (const auto& v : side->vertices()) EXPECT_NEAR(nearest(v), 1.0, 0.01);
  }
}

TEST(Offset, RejectsNonPositiveDistance)
{
  EXPECT_THROW(offset_polylines(line({{0, 0}, {1, 0}}), 0.0), std::invalid_argument);
}

TEST(CrossingTest, PerpendicularPaths)
{
  EXPECT_TRUE(crossing_test(line({{-20, 0}, {20, 0}}), 3.0, line({{0, -20}, {0, 20}}), 3.0));
}

TEST(CrossingTest, ParallelPathsAreExcluded)
{
  EXPECT_FALSE(crossing_test(line({{-20, 0}, {20, 0}}), 3.0, line({{-20, 3.5}, {20, 3.5}}), 3.0));
}

TEST(CrossingTest, MergeTouchingOneBufferIsExcluded)
{
  const auto a = line({{-50, 0}, {50, 0}});
  const auto b = line({{-50, 20}, {0, 0}, {50, 0}});
  EXPECT_TRUE(polylines_intersect(b, offset_polylines(a, 3.0).first));
  EXPECT_FALSE(crossing_test(a, 3.0, b, 3.0));
}

TEST(ConflictPoint, ConstantSpeedCrossing)
{
  const Track a = make_track(
      "a", AgentKind::vehicle, 40, [](double t) { return Vec2{-10.0 + 10.0 * t, 0.0}; },
      [](double) { return Vec2{10.0, 0.0}; });
  const Track b = make_track(
      "b", AgentKind::vehicle, 60, [](double t) { return Vec2{0.0, -10.0 + 5.0 * t}; },
      [](double) { return Vec2{0.0, 5.0}; });
  const auto cp = conflict_point(a, b);
  EXPECT_NEAR(cp.location.x, 0.0, 1e-9);
  EXPECT_NEAR(cp.location.y, 0.0, 1e-9);
  EXPECT_NEAR(cp.t_first, 1.0, 1e-9);
  EXPECT_NEAR(cp.t_second, 2.0, 1e-9);
  EXPECT_EQ(cp.first_agent, "a");
  EXPECT_EQ(cp, conflict_point(b, a));
}

TEST(ConflictPoint, DoubleCrossingPicksClosestPassageTimes)
{
  // b weaves across a's x axis path three times.
  const Track a = straight("a", AgentKind::vehicle, {0.0, 0.0}, {8.0, 0.0}, 5.0);
  const Track b = make_track(
      "b", AgentKind::vehicle, 110, [](double t) { return Vec2{-30.0 + 6.0 * t, 6.0 * std::sin(1.3 * t)}; },
      [](double t) { return Vec2{6.0, 7.8 * std::cos(1.3 * t)}; });
  const auto cp = conflict_point(a, b);

  // Brute-force enumeration of every segment pair.
  const auto pa = a.positions();
  const auto pb = b.positions();
  double best = std::numeric_limits<double>::max();
  Vec2 where;
  for (std::size_t i = 0; i + 1 < pa.size(); ++i) {
    for (std::size_t j = 0; j + 1 < pb.size(); ++j) {
      const auto hit = intersect_segments(pa[i], pa[i + 1], pb[j], pb[j + 1]);
      if (!hit) continue;
      const double ta = 0.1 * (i + hit->u);
      const double tb = 0.1 * (j + hit->w);
      if (std::abs(ta - tb) < best) {
        best = std::abs(ta - tb);
        where = hit->point;
      }
    }
  }
  EXPECT_NEAR(cp.t_second - cp.t_first, best, 1e-9);
  EXPECT_NEAR(distance(cp.location, where), 0.0, 1e-9);
}

TEST(ConflictPoint, NoCrossingThrows)
{
  const Track a = straight("a", AgentKind::vehicle, {0.0, 0.0}, {8.0, 0.0}, 5.0);
  const Track b = straight("b", AgentKind::vehicle, {0.0, 10.0}, {8.0, 0.0}, 5.0);
  EXPECT_THROW(conflict_point(a, b), DegenerateGeometry);
}

TEST(MinSeparation, MeetingPoint)
{
  const Track a = straight("a", AgentKind::vehicle, {0.0, 0.0}, {10.0, 0.0}, 5.0);
  const Track b = straight("b", AgentKind::vehicle, {0.0, 0.0}, {0.0, 10.0}, 5.0);
  EXPECT_NEAR(min_separation(a, b), 0.0, 1e-9);
}

TEST(MinSeparation, ParallelEightMetres)
{
  const Track a = straight("a", AgentKind::vehicle, {0.0, 0.0}, {10.0, 0.0}, 5.0);
  const Track b = straight("b", AgentKind::vehicle, {0.0, 8.0}, {10.0, 0.0}, 5.0);
  EXPECT_NEAR(min_separation(a, b), 8.0, 1e-9);
}

TEST(MinSeparation, MatchesPairwiseScan)
{
  const Track a = straight("a", AgentKind::vehicle, {0.0, 0.0}, {9.0, 0.0}, 4.0);
  const Track b = straight("b", AgentKind::vehicle, {0.0, 0.0}, {0.0, 7.0}, 6.3, 80, 1.0);
  double best = std::numeric_limits<double>::max();
  for (const auto& p : a.points()) {
    for (const auto& q : b.points()) {
      if (std::abs(p.t - q.t) < 1e-9) best = std::min(best, distance(p.position(), q.position()));
    }
  }
  EXPECT_NEAR(min_separation(a, b), best, 1e-12);
}

TEST(MinSeparation, NoOverlapThrows)
{
  const Track a = straight("a", AgentKind::vehicle, {0.0, 0.0}, {9.0, 0.0}, 1.0, 20);
  const Track b = straight("b", AgentKind::vehicle, {0.0, 0.0}, {0.0, 7.0}, 6.0, 20, 5.0);
  EXPECT_THROW(min_separation(a, b), InsufficientData);
}
