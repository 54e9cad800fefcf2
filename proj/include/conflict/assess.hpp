#pragma once
/**
 * @file assess.hpp
 * @brief Kinematic quality gates and conflict-regime classification.
 *
 * Anomaly constraints: a in [-8, 5] m/s^2, j in [-15, 15] m/s^3, and at most one jerk sign
 * reversal inside any 1 s window (JSI).
 */

#include "conflict/core.hpp"
#include "conflict/regime.hpp"
#include "conflict/selection.hpp"

#include <span>
#include <vector>

namespace conflict {

struct AnomalyLimits
{
  double accel_min = -8.0;
  double accel_max = 5.0;
  double jerk_abs = 15.0;
  double jsi_window = 1.0;     // s
  double jerk_deadband = 0.05; // m/s^3, smaller |j| never counts toward a reversal
};

struct AnomalyFlags
{
  std::vector<bool> acc;
  std::vector<bool> jerk;
  std::vector<bool> jsi;
};

AnomalyFlags anomaly_flags(const KinematicProfile& profile, const AnomalyLimits& limits = {});

/// One conflicting vehicle as seen by the quality report.
struct VehicleQuality
{
  AgentKind kind = AgentKind::vehicle;
  KinematicProfile profile;
  double delta_v = 0.0;  // mean |position-based speed - stored speed|
};

struct AnomalyReport
{
  std::size_t vehicles = 0;
  std::size_t samples = 0;
  double delta_v = 0.0;
  double acc_pct = 0.0;
  double jerk_pct = 0.0;
  double jsi_pct = 0.0;
};

struct AnomalyBreakdown
{
  AnomalyReport av;
  AnomalyReport hv;
  AnomalyReport all;
};

/// Timestep percentages and mean delta_v, split by AV / human-driven. Throws InsufficientData when empty.
AnomalyBreakdown anomaly_report(std::span<const VehicleQuality> vehicles, const AnomalyLimits& limits = {});

struct RegimeSettings
{
  double parallel_max_deg = 45.0;  // strictly below: P
  double opposite_min_deg = 135.0; // strictly above: O; boundaries fall to C
  double direction_window = 1.0;   // s averaged at each track end
  double min_step = 0.01;          // m
};

/// Mean unit direction over the first (or last) window seconds of motion. Throws DegenerateGeometry for static agents.
Vec2 initial_direction(const Track& track, double window = 1.0, double min_step = 0.01);
Vec2 ending_direction(const Track& track, double window = 1.0, double min_step = 0.01);

Motion classify_motion(Vec2 a, Vec2 b, const RegimeSettings& settings = {});

/// Before/after letters from the angle between initial / ending directions; side from the sign of
/// cross(first initial direction, second position - first position) at t_first (positive: L).
RegimeLabel classify_regime(const ConflictCase& c, const Track& first, const Track& second,
                            const RegimeSettings& settings = {});

}  // namespace conflict
