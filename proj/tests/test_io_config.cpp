#include "conflict/config.hpp"
#include "conflict/io.hpp"
#include "conflict/synth.hpp"

#include "fixtures.hpp"

#include <fmt/format.h>
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace conflict;
using fixtures::straight;
namespace fs = std::filesystem;

namespace {

Scenario parse(const std::string& text, const std::string& map = {})
{
  std::istringstream in(text);
  std::istringstream map_in(map);
  return parse_scenario(in, "test.csv", map.empty() ? nullptr : &map_in, "test.map.csv");
}

const char* kTwoTracks = "scenario_id,track_id,agent_kind,t,x,y,vx,vy,heading\n"
                         "s1,a,vehicle,0.0,0,0,1,0,0\n"
                         "s1,a,vehicle,0.1,0.1,0,1,0,0\n"
                         "s1,b,pedestrian,0.0,5,5,0,1,1.5708\n"
                         "s1,b,pedestrian,0.1,5,5.1,0,1,1.5708\n";

class TempDir : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path() /
           fmt::format("conflict_test_{}_{}", ::getpid(), ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST(Ingest, WellFormedTwoTrackFile)
{
  const auto s = parse(kTwoTracks);
  EXPECT_EQ(s.scenario_id(), "s1");
  ASSERT_EQ(s.tracks().size(), 2u);
  EXPECT_EQ(s.find("b")->kind(), AgentKind::pedestrian);
}

TEST(Ingest, ColumnsInAnyOrder)
{
  const auto s = parse("t,x,y,vx,vy,heading,track_id,agent_kind,scenario_id\n0.0,1,2,3,4,0.5,a,AV,s\n");
  EXPECT_EQ(s.av()->points()[0].y, 2.0);
}

TEST(Ingest, DuplicateTimestampNamesScenarioTrackAndTime)
{
  try {
    parse(std::string(kTwoTracks) + "s1,a,vehicle,0.1,0.2,0,1,0,0\n");
    FAIL() << "expected rejection";
  } catch (const IngestError& e) {
    ASSERT_EQ(e.diagnostics().size(), 1u);
    EXPECT_EQ(e.diagnostics()[0].row, 5u);
    EXPECT_NE(std::string(e.what()).find("duplicate timestamp: scenario s1 track a t = 0.1"), std::string::npos);
  }
}

TEST(Ingest, RowLevelDiagnostics)
{
  const std::string bad = "scenario_id,track_id,agent_kind,t,x,y,vx,vy,heading\n"
                          "s1,a,vehicle,0.05,0,0,1,0,0\n"
                          "s1,a,bus,0.1,0,0,1,0,0\n"
                          "s1,a,vehicle,0.2,nan,0,1,0,0\n"
                          "s2,a,vehicle,0.3,0,0,1,0,0\n"
                          "s1,a,vehicle,0.4,0,0,1,0\n";
  try {
    parse(bad);
    FAIL() << "expected rejection";
  } catch (const IngestError& e) {
    EXPECT_EQ(e.diagnostics().size(), 5u);
  }
}

TEST(Ingest, HeaderProblems)
{
  EXPECT_THROW(parse(""), IngestError);
  EXPECT_THROW(parse("scenario_id,track_id,agent_kind,t,x,y,vx,vy\n"), IngestError);
  EXPECT_THROW(parse("scenario_id,track_id,agent_kind,t,x,y,vx,vy,heading,extra\n"), IngestError);
  EXPECT_THROW(parse("scenario_id,track_id,agent_kind,t,x,y,vx,vy,heading\n"), IngestError);
}

TEST(Ingest, TwoAvsRejected)
{
  EXPECT_THROW(parse("scenario_id,track_id,agent_kind,t,x,y,vx,vy,heading\n"
                     "s,a,AV,0.0,0,0,1,0,0\ns,b,AV,0.0,5,0,1,0,0\n"),
               IngestError);
}

TEST(Export, FixedDecimals)
{
  EXPECT_EQ(format_fixed(1.0 / 3.0), "0.333333");
  EXPECT_EQ(format_fixed(-0.0000001), "0.000000");
}

TEST(Export, RoundTripIsIdentical)
{
  const Scenario s("rt", {straight("AV", AgentKind::AV, {1.5, -2.25}, {8.0, 0.5}, 3.0),
                          straight("ped", AgentKind::pedestrian, {0.0, 0.0}, {0.0, 1.25}, 4.0, 50, 2.0)},
                   four_leg_intersection(40.0));
  const auto back = parse(scenario_csv(s), map_csv(s));
  EXPECT_EQ(scenario_csv(back), scenario_csv(s));
  EXPECT_EQ(map_csv(back), map_csv(s));
  EXPECT_EQ(back.lane_graph().lanes.size(), s.lane_graph().lanes.size());
  for (std::size_t k = 0; k < s.tracks().size(); ++k) {
    const auto& want = s.tracks()[k].points();
    const auto& got = back.tracks()[k].points();
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i].x, want[i].x, 5e-7);
  }
  // Once quantised to the export precision the model survives unchanged.
  const auto again = parse(scenario_csv(back), map_csv(back));
  EXPECT_EQ(again.tracks(), back.tracks());
}

TEST(Export, LaneGraphListing)
{
  const Scenario s("m", {}, four_leg_intersection());
  const auto text = lane_graph_csv(s);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 20 * 21 + 24);
}

TEST_F(TempDir, DirectoryIngestWithMapsAndSorting)
{
  SynthSpec spec;
  spec.with_map = true;
  for (const char* id : {"zeta", "alpha"}) {
    spec.scenario_id = id;
    write_scenario(synth(spec, 1).scenario, dir_);
  }
  const auto all = ingest(dir_);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].scenario_id(), "alpha");
  EXPECT_FALSE(all[0].lane_segments().empty());
  EXPECT_EQ(ingest(dir_ / "zeta.csv").size(), 1u);
  EXPECT_THROW(ingest(dir_ / "missing"), IngestError);
}

TEST_F(TempDir, DuplicateScenarioIdsAcrossFiles)
{
  std::ofstream(dir_ / "one.csv") << kTwoTracks;
  std::ofstream(dir_ / "two.csv") << kTwoTracks;
  EXPECT_THROW(ingest(dir_), IngestError);
}

TEST_F(TempDir, EmptyDirectoryIsEmptyCorpus) { EXPECT_TRUE(ingest(dir_).empty()); }

TEST(Config, DefaultsAndOverrides)
{
  const auto cfg = parse_config("# comment\n\nselection.pet_max = 4.5\nrun.jobs=3\nsynth.noise_scope = split_by_kind\n"
                                "synth.with_map = false\nenhance.wavelet_levels = 2\n");
  EXPECT_DOUBLE_EQ(cfg.selection.pet_max, 4.5);
  EXPECT_EQ(cfg.jobs, 3u);
  EXPECT_EQ(cfg.corpus.noise.scope, NoiseScope::split_by_kind);
  EXPECT_FALSE(cfg.corpus.with_map);
  EXPECT_EQ(cfg.enhance.smoothing.levels, 2);
  EXPECT_DOUBLE_EQ(cfg.selection.pet_soft, 3.0);
}

TEST(Config, ErrorsCarryLineNumbers)
{
  try {
    parse_config("run.jobs = 2\nselection.nope = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse_config("run.jobs = 2\nrun.jobs = 3\n"), ConfigError);
  EXPECT_THROW(parse_config("run.jobs = two\n"), ConfigError);
  EXPECT_THROW(parse_config("run.jobs\n"), ConfigError);
  EXPECT_THROW(parse_config("synth.with_map = maybe\n"), ConfigError);
}

TEST(Config, Validation)
{
  PipelineConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.jobs = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.input = "same";
  cfg.output = "same";
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.metrics.mrct.search_max = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Config, KeysAreSortedAndComplete)
{
  const auto keys = config_keys();
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
  for (const char* k : {"selection.buffer_vehicle", "enhance.wavelet_sigma", "mrct.gap_floor", "run.seed"}) {
    EXPECT_NE(std::find(keys.begin(), keys.end(), k), keys.end()) << k;
  }
}
