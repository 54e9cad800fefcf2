#pragma once
/**
 * @file selection.hpp
 * @brief Heuristic extraction of two-agent conflict cases from a scenario.
 *
 * A pair qualifies when (1) each trajectory crosses both buffer curves of the other,
 * (2) it is not the case that PET > pet_max and the minimum separation > min_sep_max, and
 * (3) the behaviour-change rule holds (enough travel, and a short PET or a marked speed change).
 */

#include "conflict/geometry.hpp"
#include "conflict/regime.hpp"
#include "conflict/scenario.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace conflict {

enum class CaseCategory : std::uint8_t
{
  AV_first,
  AV_second,
  AV_free
};

enum class PairKind : std::uint8_t
{
  veh_veh,
  veh_ped,
  veh_cyc,
  veh_other
};

std::string_view to_string(CaseCategory c);
std::string_view to_string(PairKind k);

struct SelectionConfig
{
  double buffer_vehicle = 3.0;   // m, roughly one lane width
  double buffer_vru = 1.5;       // m, pedestrians and cyclists
  double pet_max = 5.0;          // s
  double min_sep_max = 8.0;      // m
  double travel_min = 8.0;       // m
  double pet_soft = 3.0;         // s
  double speed_var_min = 3.0;    // m/s
  double surround_radius = 30.0; // m

  /// Throws InvalidInput unless every field is positive and pet_soft < pet_max.
  void validate() const;
  double buffer_for(AgentKind kind) const;
};

struct ConflictCase
{
  std::string scenario_id;
  std::string first_agent;
  std::string second_agent;
  ConflictPoint conflict;
  double pet = 0.0;
  double min_sep = 0.0;
  CaseCategory category = CaseCategory::AV_free;
  PairKind pair_kind = PairKind::veh_veh;
  std::set<std::string> surrounding;
  std::optional<RegimeLabel> regime;

  std::string case_id() const;
};

/// t_second - t_first.
double pet(const ConflictPoint& conflict);

/// Speed range (max - min of the given speed) over samples up to time t_until.
double speed_variation(const Track& track, double t_until);

bool behaviour_change_ok(const ConflictCase& c, const Track& first, const Track& second,
                         const SelectionConfig& cfg = {});

/// Non-conflicting agents whose trajectory touches or lies inside the disc of radius r at the conflict point.
std::set<std::string> surrounding_agents(const Scenario& scenario, const ConflictPoint& conflict, double r);

std::vector<ConflictCase> select_conflicts(const Scenario& scenario, const SelectionConfig& cfg = {});

}  // namespace conflict
