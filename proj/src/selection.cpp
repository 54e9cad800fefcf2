#include "conflict/selection.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <limits>

namespace conflict {

std::string_view to_string(CaseCategory c)
{
  switch (c) {
    case CaseCategory::AV_first: return "AV_first";
    case CaseCategory::AV_second: return "AV_second";
    case CaseCategory::AV_free: return "AV_free";
  }
  return "?";
}

std::string_view to_string(PairKind k)
{
  switch (k) {
    case PairKind::veh_veh: return "veh_veh";
    case PairKind::veh_ped: return "veh_ped";
    case PairKind::veh_cyc: return "veh_cyc";
    case PairKind::veh_other: return "veh_other";
  }
  return "?";
}

void SelectionConfig::validate() const
{
  for (double v : {buffer_vehicle, buffer_vru, pet_max, min_sep_max, travel_min, pet_soft, speed_var_min,
                   surround_radius}) {
    if (!(v > 0.0)) throw InvalidInput("selection thresholds must be strictly positive");
  }
  if (!(pet_soft < pet_max)) throw InvalidInput("selection.pet_soft must be smaller than selection.pet_max");
}

double SelectionConfig::buffer_for(AgentKind kind) const
{
  return (kind == AgentKind::pedestrian || kind == AgentKind::cyclist) ? buffer_vru : buffer_vehicle;
}

std::string ConflictCase::case_id() const { return fmt::format("{}:{}:{}", scenario_id, first_agent, second_agent); }

double pet(const ConflictPoint& conflict) { return conflict.t_second - conflict.t_first; }

double speed_variation(const Track& track, double t_until)
{
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (const auto& p : track.points()) {
    if (p.t > t_until + kGridTolerance) break;
    lo = std::min(lo, p.speed());
    hi = std::max(hi, p.speed());
  }
  return hi >= lo ? hi - lo : 0.0;
}

bool behaviour_change_ok(const ConflictCase& c, const Track& first, const Track& second, const SelectionConfig& cfg)
{
  const bool travels = path_length(first.positions()) > cfg.travel_min || path_length(second.positions()) > cfg.travel_min;
  if (!travels) return false;
  if (c.pet <= cfg.pet_soft) return true;
  return speed_variation(first, c.conflict.t_first) > cfg.speed_var_min ||
         speed_variation(second, c.conflict.t_second) > cfg.speed_var_min;
}

std::set<std::string> surrounding_agents(const Scenario& scenario, const ConflictPoint& conflict, double r)
{
  if (!(r > 0.0)) throw std::invalid_argument("surround radius must be positive");
  std::set<std::string> out;
  for (const auto& track : scenario.tracks()) {
    if (track.agent_id() == conflict.first_agent || track.agent_id() == conflict.second_agent) continue;
    const auto& pts = track.points();
    bool inside = false;
    if (pts.size() == 1) inside = distance(pts[0].position(), conflict.location) <= r;
    for (std::size_t i = 1; i < pts.size() && !inside; ++i) {
      inside = point_segment_distance(conflict.location, pts[i - 1].position(), pts[i].position()) <= r;
    }
    if (inside) out.insert(track.agent_id());
  }
  return out;
}

namespace {

std::optional<PairKind> pair_kind_of(AgentKind a, AgentKind b)
{
  const bool va = is_vehicle(a);
  const bool vb = is_vehicle(b);
  if (va && vb) return PairKind::veh_veh;
  if (!va && !vb) return std::nullopt;
  switch (va ? b : a) {
    case AgentKind::pedestrian: return PairKind::veh_ped;
    case AgentKind::cyclist: return PairKind::veh_cyc;
    default: return PairKind::veh_other;
  }
}

}  // namespace

std::vector<ConflictCase> select_conflicts(const Scenario& scenario, const SelectionConfig& cfg)
{
  cfg.validate();

  struct Candidate
  {
    const Track* track;
    Polyline path;
  };
  std::vector<Candidate> movers;
  for (const auto& track : scenario.tracks()) {
    if (track.size() < 2) continue;
    try {
      movers.push_back({&track, Polyline::from_points(track.positions())});
    } catch (const DegenerateGeometry&) {
      // static agents have no path to cross
    }
  }
  std::sort(movers.begin(), movers.end(),
            [](const Candidate& a, const Candidate& b) { return a.track->agent_id() < b.track->agent_id(); });

  std::vector<ConflictCase> cases;
  for (std::size_t i = 0; i < movers.size(); ++i) {
    for (std::size_t j = i + 1; j < movers.size(); ++j) {
      const Track& a = *movers[i].track;
      const Track& b = *movers[j].track;
      const auto kind = pair_kind_of(a.kind(), b.kind());
      if (!kind) continue;
      if (!crossing_test(movers[i].path, cfg.buffer_for(a.kind()), movers[j].path, cfg.buffer_for(b.kind()))) continue;

      ConflictCase c;
      try {
        c.conflict = conflict_point(a, b);
        c.min_sep = min_separation(a, b);
      } catch (const DegenerateGeometry&) {
        continue;
      } catch (const InsufficientData&) {
        continue;
      }
      c.scenario_id = scenario.scenario_id();
      c.first_agent = c.conflict.first_agent;
      c.second_agent = c.conflict.second_agent;
      c.pet = pet(c.conflict);
      c.pair_kind = *kind;
      if (c.pet > cfg.pet_max && c.min_sep > cfg.min_sep_max) continue;

      const Track& first = a.agent_id() == c.first_agent ? a : b;
      const Track& second = a.agent_id() == c.first_agent ? b : a;
      if (!behaviour_change_ok(c, first, second, cfg)) continue;

      if (first.kind() == AgentKind::AV) {
        c.category = CaseCategory::AV_first;
      } else if (second.kind() == AgentKind::AV) {
        c.category = CaseCategory::AV_second;
      } else {
        c.category = CaseCategory::AV_free;
      }
      c.surrounding = surrounding_agents(scenario, c.conflict, cfg.surround_radius);
      cases.push_back(std::move(c));
    }
  }
  return cases;
}

}  // namespace conflict
