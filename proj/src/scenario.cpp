#include "conflict/scenario.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <limits>
#include <set>

namespace conflict {

Scenario::Scenario(std::string scenario_id, std::vector<Track> tracks, std::vector<LaneSegment> lane_segments)
  : scenario_id_(std::move(scenario_id)), tracks_(std::move(tracks)), lane_segments_(std::move(lane_segments))
{
  std::set<std::string> ids;
  int av_count = 0;
  double t_min = std::numeric_limits<double>::max();
  double t_max = std::numeric_limits<double>::lowest();
  for (const auto& track : tracks_) {
    if (!ids.insert(track.agent_id()).second) {
      throw InvalidInput(fmt::format("scenario {}: duplicate track id {}", scenario_id_, track.agent_id()));
    }
    if (track.kind() == AgentKind::AV) ++av_count;
    if (track.empty()) continue;
    t_min = std::min(t_min, track.start_time());
    t_max = std::max(t_max, track.end_time());
  }
  if (av_count > 1) throw InvalidInput(fmt::format("scenario {}: {} AV tracks", scenario_id_, av_count));
  duration_ = t_max >= t_min ? t_max - t_min : 0.0;
  if (duration_ > kMaxScenarioDuration + kGridTolerance) {
    throw InvalidInput(fmt::format("scenario {}: duration {:.1f} s exceeds {:.0f} s", scenario_id_, duration_,
                                   kMaxScenarioDuration));
  }
  if (!lane_segments_.empty()) {
    lane_segments_ = normalize_connectivity(std::move(lane_segments_));
    lane_graph_ = build_lane_graph(lane_segments_);
  }
}

const Track* Scenario::find(const std::string& agent_id) const
{
  auto it = std::find_if(tracks_.begin(), tracks_.end(), [&](const Track& t) { return t.agent_id() == agent_id; });
  return it == tracks_.end() ? nullptr : &*it;
}

const Track* Scenario::av() const
{
  auto it = std::find_if(tracks_.begin(), tracks_.end(), [](const Track& t) { return t.kind() == AgentKind::AV; });
  return it == tracks_.end() ? nullptr : &*it;
}

}  // namespace conflict
