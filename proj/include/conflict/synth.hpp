#pragma once
/**
 * @file synth.hpp
 * @brief Seeded synthetic scenarios with known conflicts, plus the raw-data flaws to repair.
 *
 * In the local frame the first passer drives east along y = 0 and passes the origin at t_first.
 * The second passer crosses the origin pet_target later on a north-south middle segment and
 * enters / leaves it through 90 degree fillets, so its approach and exit headings realize the
 * requested regime. A random rigid transform is applied afterwards.
 */

#include "conflict/mapproc.hpp"
#include "conflict/regime.hpp"
#include "conflict/scenario.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace conflict {

enum class NoiseScope : std::uint8_t
{
  all,
  split_by_kind,  // Gaussian speed noise on the AV only, zero-fills on everyone else
};

struct NoiseModel
{
  double speed_noise_sigma = 0.0;
  double zero_fill_probability = 0.0;  // per track, one run of 2..5 zero samples
  bool boundary_corruption = false;    // position steps shrink to ~half over the first / last 0.3 s
  NoiseScope scope = NoiseScope::all;
};

struct SynthSpec
{
  std::string scenario_id = "synth";
  RegimeLabel regime{Motion::C, Motion::C, Side::left_to_right};
  std::array<double, 2> speeds{10.0, 10.0};        // at passage, first / second passer
  std::array<double, 2> accelerations{0.0, 0.0};   // constant, m/s^2
  std::array<AgentKind, 2> kinds{AgentKind::vehicle, AgentKind::vehicle};
  double pet_target = 2.0;
  double t_first = 5.0;
  std::size_t samples = 110;                       // 10.9 s at 10 Hz
  NoiseModel noise;
  std::size_t background = 0;
  bool random_pose = true;
  bool with_map = false;                           // attach the four-leg lane network

  /// Throws InvalidInput unless pet_target >= 0, speeds > 0 and both agents keep moving over the recording.
  void validate() const;
};

struct ConflictTruth
{
  std::string first;
  std::string second;
  Vec2 location;
  double t_first = 0.0;
  double t_second = 0.0;
  std::optional<RegimeLabel> regime;  // absent when a pedestrian or cyclist is involved (it walks straight)
};

struct SynthScenario
{
  Scenario scenario;
  std::vector<Track> clean;  // same ids and order as scenario.tracks(), before corruption
  ConflictTruth truth;
};

SynthScenario synth(const SynthSpec& spec, std::uint64_t seed);

struct CorpusSettings
{
  std::size_t scenarios = 50;
  NoiseModel noise;
  std::size_t background = 2;
  double av_share = 0.6;      // probability that one of the pair is the AV
  std::size_t vru_every = 5;  // every n-th scenario pairs a vehicle with a pedestrian or cyclist; 0 disables
  bool with_map = true;
};

/// Scenario i realizes regime i mod 18; ids are "synth_0000", "synth_0001", ...
std::vector<SynthScenario> synth_corpus(const CorpusSettings& settings, std::uint64_t seed);

/// Four approaches, each with a two-piece inbound lane, an outbound lane and straight / left / right
/// connectors; right-hand traffic, lanes 2 m off the axes, stop lines 8 m from the centre.
std::vector<LaneSegment> four_leg_intersection(double leg_length = 50.0);

}  // namespace conflict
