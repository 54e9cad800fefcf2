#pragma once
/**
 * @file mapproc.hpp
 * @brief Lane-graph compaction: merges lane segments into maximal chains, resamples each merged
 * lane into a fixed series of tail-to-head vectors and indexes lane-to-lane adjacency.
 */

#include "conflict/geometry.hpp"

#include <array>
#include <set>
#include <string>
#include <vector>

namespace conflict {

inline constexpr std::size_t kLaneVectorCount = 20;
inline constexpr double kAdjacencyTolerance = 0.1;  // m

struct LaneSegment
{
  std::string id;
  Polyline centerline;
  std::set<std::string> successors;
  std::set<std::string> predecessors;

  bool operator==(const LaneSegment& o) const
  {
    return id == o.id && centerline.vertices() == o.centerline.vertices() && successors == o.successors &&
           predecessors == o.predecessors;
  }
};

/// Fills in missing predecessor/successor back-links and rejects links to unknown ids.
std::vector<LaneSegment> normalize_connectivity(std::vector<LaneSegment> segments);

struct MergedPolyline
{
  std::string id;                        // id of the chain's first segment
  std::vector<std::string> segment_ids;  // in driving order
  Polyline centerline;
  bool cycle_cut = false;  // chain was part of a closed loop and cut at its lowest id
};

struct MergedLane
{
  std::string id;
  std::array<Vec2, kLaneVectorCount + 1> breakpoints{};  // vector k runs breakpoints[k] -> breakpoints[k+1]

  Vec2 tail() const { return breakpoints.front(); }
  Vec2 head() const { return breakpoints.back(); }
  double length() const;

  bool operator==(const MergedLane&) const = default;
};

struct LaneGraph
{
  std::vector<MergedLane> lanes;
  std::vector<std::vector<bool>> adjacency;  // adjacency[i][j]: lane i flows into lane j

  bool empty() const { return lanes.empty(); }
  bool operator==(const LaneGraph&) const = default;
};

/// Chains A -> B whenever B is A's only successor and A is B's only predecessor.
/// The result is ordered by chain id and does not depend on input order.
std::vector<MergedPolyline> merge_lanes(const std::vector<LaneSegment>& segments);

/// 20 vectors of equal arc length spanning the polyline.
MergedLane resegment_lane(const std::string& id, const Polyline& centerline);

std::vector<std::vector<bool>> build_adjacency(const std::vector<MergedLane>& lanes);

LaneGraph build_lane_graph(const std::vector<LaneSegment>& segments);

}  // namespace conflict
