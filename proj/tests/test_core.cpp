#include "conflict/core.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace conflict;
using fixtures::make_track;

namespace {

Track uniform_x(double speed_given, double speed_moved, std::size_t n = 101)
{
  return make_track(
      "a", AgentKind::vehicle, n, [=](double t) { return Vec2{speed_moved * t, 0.0}; },
      [=](double) { return Vec2{speed_given, 0.0}; });
}

}  // namespace

TEST(Track, RejectsOffGridTimestamps)
{
  EXPECT_THROW(Track("a", AgentKind::vehicle, {{0.0, 0, 0, 0, 0, 0}, {0.15, 0, 0, 0, 0, 0}}), InvalidInput);
}

TEST(Track, RejectsNonIncreasingTime)
{
  EXPECT_THROW(Track("a", AgentKind::vehicle, {{0.2, 0, 0, 0, 0, 0}, {0.1, 0, 0, 0, 0, 0}}), InvalidInput);
  EXPECT_THROW(Track("a", AgentKind::vehicle, {{0.1, 0, 0, 0, 0, 0}, {0.1, 1, 0, 0, 0, 0}}), InvalidInput);
}

TEST(Track, RejectsNonFiniteValues)
{
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Track("a", AgentKind::vehicle, {{0.0, nan, 0, 0, 0, 0}}), InvalidInput);
  EXPECT_THROW(Track("a", AgentKind::vehicle, {{-0.1, 0, 0, 0, 0, 0}}), InvalidInput);
}

TEST(Track, GapsAreKeptAndFlagged)
{
  const Track t("a", AgentKind::vehicle, {{0.0, 0, 0, 1, 0, 0}, {0.1, 0.1, 0, 1, 0, 0}, {0.4, 0.4, 0, 1, 0, 0}});
  EXPECT_TRUE(t.has_gaps());
  EXPECT_EQ(t.size(), 3u);
  EXPECT_FALSE(uniform_x(1.0, 1.0, 5).has_gaps());
}

TEST(Track, PositionAtInterpolatesAndClamps)
{
  const Track t = uniform_x(10.0, 10.0, 11);
  EXPECT_NEAR(t.position_at(0.25).x, 2.5, 1e-12);
  EXPECT_NEAR(t.position_at(-1.0).x, 0.0, 1e-12);
  EXPECT_NEAR(t.position_at(5.0).x, 10.0, 1e-12);
}

TEST(AgentKindText, RoundTrips)
{
  for (auto k : {AgentKind::AV, AgentKind::vehicle, AgentKind::pedestrian, AgentKind::cyclist, AgentKind::other}) {
    EXPECT_EQ(parse_agent_kind(to_string(k)), k);
  }
  EXPECT_FALSE(parse_agent_kind("bus").has_value());
}

TEST(PositionBasedSpeed, UniformMotion)
{
  const auto v = position_based_speed(uniform_x(10.0, 10.0));
  for (double x : v) EXPECT_NEAR(x, 10.0, 1e-9);
}

TEST(PositionBasedSpeed, Stationary)
{
  const auto v = position_based_speed(uniform_x(0.0, 0.0, 20));
  for (double x : v) EXPECT_EQ(x, 0.0);
}

TEST(PositionBasedSpeed, QuadraticIsExactInTheInterior)
{
  const Track t = make_track(
      "a", AgentKind::vehicle, 50, [](double s) { return Vec2{s * s, 0.0}; },
      [](double s) { return Vec2{2.0 * s, 0.0}; });
  const auto v = position_based_speed(t);
  for (std::size_t i = 1; i + 1 < v.size(); ++i) EXPECT_NEAR(v[i], 2.0 * t.points()[i].t, 1e-9);
}

TEST(SpeedConsistency, ZeroWhenConsistent) { EXPECT_NEAR(speed_consistency_error(uniform_x(4.0, 4.0)), 0.0, 1e-9); }

TEST(SpeedConsistency, ConstantOffset) { EXPECT_NEAR(speed_consistency_error(uniform_x(5.0, 4.0)), 1.0, 1e-9); }

TEST(SpeedConsistency, ZeroFilledSegmentMatchesHandSummation)
{
  auto pts = uniform_x(10.0, 10.0, 30).points();
  for (std::size_t i = 10; i < 14; ++i) pts[i].vx = 0.0;
  const Track t("a", AgentKind::vehicle, pts);
  EXPECT_NEAR(speed_consistency_error(t), 4.0 * 10.0 / 30.0, 1e-9);
}

TEST(LengthInconsistency, ZeroForConsistentMotion) { EXPECT_NEAR(length_inconsistency(uniform_x(7.0, 7.0)), 0.0, 1e-9); }

TEST(LengthInconsistency, HundredVersusNinetyEight)
{
  EXPECT_NEAR(length_inconsistency(uniform_x(10.0, 9.8)), 2.0, 1e-9);
}

TEST(Gradient, MatchesNumpyConvention)
{
  const std::vector<double> y{1.0, 4.0, 9.0, 16.0};
  const std::vector<double> t{0.0, 1.0, 2.0, 3.0};
  const auto g = gradient(y, t);
  EXPECT_DOUBLE_EQ(g[0], 3.0);
  EXPECT_DOUBLE_EQ(g[1], 4.0);
  EXPECT_DOUBLE_EQ(g[2], 6.0);
  EXPECT_DOUBLE_EQ(g[3], 7.0);
}

TEST(KinematicProfile, ConstantSpeed)
{
  const Track t = uniform_x(6.0, 6.0, 30);
  const auto p = kinematic_profile(t.speeds(), t.times());
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    EXPECT_NEAR(p.acceleration[i], 0.0, 1e-12);
    EXPECT_NEAR(p.jerk[i], 0.0, 1e-12);
  }
}

TEST(KinematicProfile, LinearAndQuadraticSpeed)
{
  std::vector<double> t;
  std::vector<double> lin;
  std::vector<double> quad;
  for (int i = 0; i < 40; ++i) {
    t.push_back(0.1 * i);
    lin.push_back(2.0 * t.back());
    quad.push_back(t.back() * t.back());
  }
  const auto a = kinematic_profile(lin, t);
  for (std::size_t i = 1; i + 1 < t.size(); ++i) EXPECT_NEAR(a.acceleration[i], 2.0, 1e-9);
  const auto q = kinematic_profile(quad, t);
  for (std::size_t i = 2; i + 2 < t.size(); ++i) EXPECT_NEAR(q.jerk[i], 2.0, 1e-9);
}
