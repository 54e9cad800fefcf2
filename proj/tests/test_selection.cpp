#include "conflict/selection.hpp"
#include "conflict/synth.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace conflict;
using fixtures::make_track;
using fixtures::straight;

namespace {

ConflictCase case_with(double t_first, double t_second)
{
  ConflictCase c;
  c.conflict.t_first = t_first;
  c.conflict.t_second = t_second;
  c.pet = pet(c.conflict);
  return c;
}

}  // namespace

TEST(Pet, Difference)
{
  EXPECT_DOUBLE_EQ(pet(case_with(2.0, 4.5).conflict), 2.5);
  EXPECT_DOUBLE_EQ(pet(case_with(3.0, 3.0).conflict), 0.0);
}

TEST(SelectionConfig, Validation)
{
  SelectionConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.pet_soft = 6.0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.buffer_vru = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  EXPECT_DOUBLE_EQ(SelectionConfig{}.buffer_for(AgentKind::pedestrian), 1.5);
  EXPECT_DOUBLE_EQ(SelectionConfig{}.buffer_for(AgentKind::AV), 3.0);
}

TEST(BehaviourChange, ShortTravelFails)
{
  const Track a = straight("a", AgentKind::vehicle, {0, 0}, {1.0, 0.0}, 2.5, 51);
  const Track b = straight("b", AgentKind::vehicle, {0, 0}, {0.0, 1.0}, 4.5, 51);
  EXPECT_FALSE(behaviour_change_ok(case_with(2.5, 4.5), a, b));
}

TEST(BehaviourChange, LongPetNeedsSpeedChange)
{
  const Track a = make_track(
      "a", AgentKind::vehicle, 110, [](double t) { return Vec2{8.0 * t + 0.05 * t * t, 0.0}; },
      [](double t) { return Vec2{8.0 + 0.1 * t, 0.0}; });
  const Track b = straight("b", AgentKind::vehicle, {0, 0}, {0.0, 9.0}, 8.0);
  EXPECT_FALSE(behaviour_change_ok(case_with(4.5, 8.0), a, b));
}

TEST(BehaviourChange, ShortPetBypassesSpeedRule)
{
  const Track a = straight("a", AgentKind::vehicle, {0, 0}, {10.0, 0.0}, 3.0, 21);
  const Track b = straight("b", AgentKind::vehicle, {0, 0}, {0.0, 0.5}, 5.0, 21);
  EXPECT_TRUE(behaviour_change_ok(case_with(3.0, 5.0), a, b));
}

TEST(BehaviourChange, LongPetWithBrakingPasses)
{
  const Track a = straight("a", AgentKind::vehicle, {0, 0}, {10.0, 0.0}, 3.0);
  const Track b = make_track(
      "b", AgentKind::vehicle, 110, [](double t) { return Vec2{0.0, 12.0 * t - 0.6 * t * t - 52.65}; },
      [](double t) { return Vec2{0.0, 12.0 - 1.2 * t}; });
  EXPECT_GT(speed_variation(b, 6.5), 3.0);
  EXPECT_TRUE(behaviour_change_ok(case_with(3.0, 6.5), a, b));
}

TEST(SelectConflicts, ParallelFollowersAreExcluded)
{
  const Scenario s("s", {straight("a", AgentKind::vehicle, {0, 0}, {10, 0}, 5.0),
                         straight("b", AgentKind::vehicle, {-15, 0}, {10, 0}, 5.0)});
  EXPECT_TRUE(select_conflicts(s).empty());
}

TEST(SelectConflicts, PerpendicularPairWithCategories)
{
  const Scenario s("s", {straight("AV", AgentKind::AV, {0, 0}, {10, 0}, 4.0),
                         straight("hv", AgentKind::vehicle, {0, 0}, {0, 10}, 6.0),
                         straight("ped", AgentKind::pedestrian, {20, 0}, {0, -1.4}, 7.0)});
  const auto cases = select_conflicts(s);
  ASSERT_EQ(cases.size(), 2u);
  for (const auto& c : cases) {
    if (c.first_agent == "AV" && c.second_agent == "hv") {
      EXPECT_EQ(c.category, CaseCategory::AV_first);
      EXPECT_EQ(c.pair_kind, PairKind::veh_veh);
      EXPECT_NEAR(c.pet, 2.0, 1e-9);
      EXPECT_EQ(c.surrounding, std::set<std::string>{"ped"});
      EXPECT_EQ(c.case_id(), "s:AV:hv");
    } else if (c.second_agent == "ped") {
      EXPECT_EQ(c.pair_kind, PairKind::veh_ped);
      EXPECT_GE(c.pet, 0.0);
    }
  }
}

TEST(SelectConflicts, LongPetAndWideSeparationWithoutSpeedChange)
{
  const Scenario s("s", {straight("a", AgentKind::vehicle, {0, 0}, {10, 0}, 2.0),
                         straight("b", AgentKind::vehicle, {0, 0}, {0, 10}, 8.0)});
  ASSERT_GT(min_separation(s.tracks()[0], s.tracks()[1]), 8.0);
  EXPECT_TRUE(select_conflicts(s).empty());
}

TEST(SelectConflicts, PedestrianPairsWithoutVehicleAreSkipped)
{
  const Scenario s("s", {straight("p1", AgentKind::pedestrian, {0, 0}, {1.5, 0}, 5.0),
                         straight("p2", AgentKind::pedestrian, {0, 0}, {0, 1.5}, 6.0)});
  EXPECT_TRUE(select_conflicts(s).empty());
}

TEST(SelectConflicts, UnprotectedLeftTurnFromGenerator)
{
  SynthSpec spec;
  spec.regime = *parse_regime("O>C:L");
  spec.pet_target = 2.5;
  const auto s = synth(spec, 3);
  const auto cases = select_conflicts(s.scenario);
  ASSERT_EQ(cases.size(), 1u);
  EXPECT_EQ(cases[0].pair_kind, PairKind::veh_veh);
  EXPECT_EQ(cases[0].first_agent, s.truth.first);
  EXPECT_NEAR(cases[0].pet, 2.5, 0.05);
  EXPECT_NEAR(distance(cases[0].conflict.location, s.truth.location), 0.0, 0.05);
}

TEST(Surrounding, InsideDiscOutsideAndClipping)
{
  ConflictPoint cp;
  cp.location = {0.0, 0.0};
  cp.first_agent = "a";
  cp.second_agent = "b";
  const Scenario s("s", {straight("a", AgentKind::vehicle, {0, 0}, {10, 0}, 5.0),
                         straight("b", AgentKind::vehicle, {0, 0}, {0, 10}, 6.0),
                         straight("inside", AgentKind::pedestrian, {5, 5}, {0.2, 0}, 5.0),
                         straight("far", AgentKind::vehicle, {0, 31}, {10, 0}, 5.0),
                         // One 0.1 s step of 400 m/s: both ends lie outside the disc, the chord clips it at y = 29.9.
                         straight("chord", AgentKind::vehicle, {0, 29.9}, {400, 0}, 0.05, 2, 0.0)});
  const auto around = surrounding_agents(s, cp, 30.0);
  EXPECT_EQ(around, (std::set<std::string>{"chord", "inside"}));

  // Dense sampling of the clipping chord confirms it enters the disc.
  const auto& pts = s.find("chord")->points();
  bool enters = false;
  for (int k = 0; k <= 1000; ++k) {
    const Vec2 q = pts[0].position() + (pts[1].position() - pts[0].position()) * (k / 1000.0);
    enters = enters || q.norm() <= 30.0;
  }
  EXPECT_TRUE(enters);
}
