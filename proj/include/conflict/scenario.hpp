#pragma once

#include "conflict/core.hpp"
#include "conflict/mapproc.hpp"

#include <string>
#include <vector>

namespace conflict {

inline constexpr double kMaxScenarioDuration = 11.0;  // s

class Scenario
{
public:
  /// Validates unique track ids, at most one AV and a recording span of at most 11 s.
  /// The lane graph is derived from the lane segments.
  Scenario(std::string scenario_id, std::vector<Track> tracks, std::vector<LaneSegment> lane_segments = {});

  const std::string& scenario_id() const { return scenario_id_; }
  const std::vector<Track>& tracks() const { return tracks_; }
  const std::vector<LaneSegment>& lane_segments() const { return lane_segments_; }
  const LaneGraph& lane_graph() const { return lane_graph_; }
  double duration() const { return duration_; }

  /// nullptr when absent.
  const Track* find(const std::string& agent_id) const;
  const Track* av() const;

  bool operator==(const Scenario&) const = default;

private:
  std::string scenario_id_;
  std::vector<Track> tracks_;
  std::vector<LaneSegment> lane_segments_;
  LaneGraph lane_graph_;
  double duration_ = 0.0;
};

}  // namespace conflict
