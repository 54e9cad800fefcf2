#include "conflict/mapproc.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <map>

namespace conflict {

std::vector<LaneSegment> normalize_connectivity(std::vector<LaneSegment> segments)
{
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (!index.emplace(segments[i].id, i).second) {
      throw InvalidInput(fmt::format("duplicate lane segment id {}", segments[i].id));
    }
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    for (const auto& s : std::set<std::string>(segments[i].successors)) {
      auto it = index.find(s);
      if (it == index.end()) throw InvalidInput(fmt::format("lane {} links to unknown successor {}", segments[i].id, s));
      segments[it->second].predecessors.insert(segments[i].id);
    }
    for (const auto& p : std::set<std::string>(segments[i].predecessors)) {
      auto it = index.find(p);
      if (it == index.end()) throw InvalidInput(fmt::format("lane {} links to unknown predecessor {}", segments[i].id, p));
      segments[it->second].successors.insert(segments[i].id);
    }
  }
  return segments;
}

std::vector<MergedPolyline> merge_lanes(const std::vector<LaneSegment>& input)
{
  const auto segments = normalize_connectivity(input);
  std::map<std::string, const LaneSegment*> by_id;
  for (const auto& s : segments) by_id.emplace(s.id, &s);

  // next(A) = B when A -> B is a sole link in both directions.
  auto merge_next = [&](const LaneSegment& a) -> const LaneSegment* {
    if (a.successors.size() != 1) return nullptr;
    const LaneSegment* b = by_id.at(*a.successors.begin());
    if (b->predecessors.size() != 1 || b == &a) return nullptr;
    return b;
  };
  std::map<std::string, bool> continues;  // true when the segment is merged onto its predecessor
  for (const auto& [id, seg] : by_id) continues[id] = false;
  for (const auto& [id, seg] : by_id) {
    if (const auto* b = merge_next(*seg)) continues[b->id] = true;
  }

  std::vector<MergedPolyline> out;
  std::set<std::string> visited;
  auto walk = [&](const LaneSegment* head, bool cut) {
    std::vector<std::string> ids;
    std::vector<Vec2> points;
    for (const LaneSegment* cur = head; cur != nullptr; cur = merge_next(*cur)) {
      if (!visited.insert(cur->id).second) break;
      ids.push_back(cur->id);
      for (const auto& v : cur->centerline.vertices()) {
        if (points.empty() || distance(points.back(), v) > 1e-9) points.push_back(v);
      }
    }
    out.push_back({head->id, std::move(ids), Polyline(std::move(points)), cut});
  };

  // std::map iteration is id-ordered, so the result is independent of input order.
  for (const auto& [id, seg] : by_id) {
    if (!continues[id]) walk(seg, false);
  }
  // Whatever is left lies on closed sole-link loops; cut each loop at its lowest id.
  for (const auto& [id, seg] : by_id) {
    if (!visited.contains(id)) walk(seg, true);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

double MergedLane::length() const
{
  double len = 0.0;
  for (std::size_t k = 0; k < kLaneVectorCount; ++k) len += distance(breakpoints[k], breakpoints[k + 1]);
  return len;
}

MergedLane resegment_lane(const std::string& id, const Polyline& centerline)
{
  const double total = centerline.length();
  if (!(total > 0.0)) throw DegenerateGeometry(fmt::format("lane {} has zero length", id));
  MergedLane lane;
  lane.id = id;
  for (std::size_t k = 0; k <= kLaneVectorCount; ++k) {
    lane.breakpoints[k] = centerline.point_at(total * static_cast<double>(k) / static_cast<double>(kLaneVectorCount));
  }
  lane.breakpoints.front() = centerline.front();
  lane.breakpoints.back() = centerline.back();
  return lane;
}

std::vector<std::vector<bool>> build_adjacency(const std::vector<MergedLane>& lanes)
{
  std::vector<std::vector<bool>> adjacency(lanes.size(), std::vector<bool>(lanes.size(), false));
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    for (std::size_t j = 0; j < lanes.size(); ++j) {
      adjacency[i][j] = distance(lanes[i].head(), lanes[j].tail()) <= kAdjacencyTolerance;
    }
  }
  return adjacency;
}

LaneGraph build_lane_graph(const std::vector<LaneSegment>& segments)
{
  LaneGraph graph;
  for (const auto& merged : merge_lanes(segments)) graph.lanes.push_back(resegment_lane(merged.id, merged.centerline));
  graph.adjacency = build_adjacency(graph.lanes);
  return graph;
}

}  // namespace conflict
