#pragma once
/**
 * @file enhance.hpp
 * @brief Trajectory repair and reconstruction.
 *
 * The given speed is treated as the trusted signal. Outliers (implausible acceleration or
 * zero-padding) are replaced by a local cubic fit; AV tracks then get their first and last 1.5 s
 * of positions re-integrated from the corrected speed and the speed is wavelet-smoothed, while
 * other agents are re-paced along their raw polyline so positions and speed agree everywhere.
 */

#include "conflict/core.hpp"
#include "conflict/wavelet.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace conflict {

struct EnhanceConfig
{
  double outlier_accel = 10.0;        // m/s^2
  double zero_window = 0.3;           // s, neighbourhood searched for zero-padded speed
  std::size_t fit_samples = 10;       // nearest valid observations for the cubic fit (1 s at 10 Hz)
  double min_duration = 5.0;          // s
  double min_length = 8.0;            // m, background agents only
  double max_inconsistency = 2.0;     // m
  double boundary_window = 1.5;       // s, AV boundary reconstruction span
  double static_speed = 0.1;          // m/s, below this everywhere the agent is parked
  double heading_min_step = 0.01;     // m
  wavelet::DenoiseSettings smoothing; // db6, soft BayesShrink, sigma 0.5, 3 levels
};

enum class EnhanceStatus : std::uint8_t
{
  enhanced,
  preserved_raw
};

enum class SkipReason : std::uint8_t
{
  too_short_duration,
  too_short_length,
  too_inconsistent,
  has_gaps,
  degenerate_path,
};

std::string_view to_string(EnhanceStatus s);
std::string_view to_string(SkipReason r);

/// Samples flagged by |dv/dt| > outlier_accel (central difference; a sample whose two neighbours
/// are both flagged is flagged too), or by an exact zero within +-zero_window (the zero test is
/// skipped for agents that are static over the whole track).
std::vector<bool> detect_speed_outliers(std::span<const double> speed, const EnhanceConfig& cfg = {},
                                        double dt = kSampleInterval);

struct SampleRun
{
  std::size_t begin = 0;  // first masked index
  std::size_t end = 0;    // one past the last masked index
};

struct RepairResult
{
  std::vector<double> values;
  std::vector<SampleRun> unrepaired;  // runs without 4 valid support samples
  std::vector<SampleRun> one_sided;   // runs fitted from one side only (low confidence)
};

/// Replaces every masked run by a least-squares cubic in time fitted to the nearest valid samples.
RepairResult repair_outliers(std::span<const double> values, const std::vector<bool>& mask,
                             const EnhanceConfig& cfg = {}, double dt = kSampleInterval);

/// Integral of uniformly sampled values between sample indices `from` and `to` (either order),
/// exact for cubic signals: composite Simpson, closed with the 3/8 rule on odd interval counts.
double integrate_samples(std::span<const double> values, std::size_t from, std::size_t to, double dt);

/// Positions with the first and last boundary_window re-integrated from the corrected velocity,
/// anchored at the samples exactly boundary_window from each end. Throws InsufficientData for
/// tracks shorter than two windows.
std::vector<Vec2> reconstruct_av_boundaries(const Track& track, std::span<const double> vx,
                                            std::span<const double> vy, const EnhanceConfig& cfg = {});

/// Positions placed on the raw polyline so that each step covers the interval's mean corrected speed
/// times dt. Throws DegenerateGeometry when the raw polyline has zero length.
std::vector<Vec2> resegment_positions(const Track& track, std::span<const double> corrected_speed);

/// Returns the first applicable reason, in the order duration, length, inconsistency. The inconsistency
/// integrates `speed` when given (enhance_track passes the outlier-repaired speed), else the given speed.
std::optional<SkipReason> preserve_raw_gate(const Track& track, bool conflicting, const EnhanceConfig& cfg = {},
                                            std::span<const double> speed = {});

struct SmoothResult
{
  std::vector<double> speed;
  bool applied = false;  // false when the signal was too short (< 16 samples)
};

SmoothResult smooth_av_speed(std::span<const double> speed, const EnhanceConfig& cfg = {});

struct HeadingResult
{
  std::vector<double> heading;
  bool from_raw = false;  // no displacement anywhere; raw heading field used
};

/// Direction of the local chord; holds the last well-defined value through near-static stretches.
HeadingResult derive_heading(std::span<const Vec2> positions, std::span<const double> raw_heading = {},
                             double min_step = 0.01);

struct EnhancedTrack
{
  Track base;
  std::vector<double> corrected_speed;
  std::vector<Vec2> positions;
  KinematicProfile profile;
  std::vector<double> heading;
  EnhanceStatus status = EnhanceStatus::preserved_raw;
  std::optional<SkipReason> skip_reason;
  std::vector<SampleRun> unrepaired;
  bool heading_from_raw = false;
  bool smoothing_skipped = false;

  /// The enhanced state as a plain track (velocity = speed along heading); the raw track when preserved.
  Track to_track() const;
  /// Mean |position-based speed - stored speed|.
  double consistency_error() const;
};

EnhancedTrack enhance_track(const Track& track, bool conflicting, const EnhanceConfig& cfg = {});

}  // namespace conflict
