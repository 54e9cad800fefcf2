#pragma once
/**
 * @file metrics.hpp
 * @brief Safety and efficiency measures of a conflict case.
 *
 * PSD is the remaining distance to the conflict point over the stopping distance v^2 / (2|a_max|).
 *
 * MRCT (minimum recurrent clearance time) is the smallest period dt at which the observed
 * two-vehicle interaction could repeat with the streams passing alternately. With s the signed
 * arc length to the conflict point (negative while approaching), t1 / t2 the passage times of
 * the first / second vehicle and the next pair replaying the same motion dt later:
 *
 *   s1(t) - s1(t - dt) >= d_h(v1(t - dt))   for sampled t <= t1   (same-stream headway)
 *   -s1(t2 - dt)       >= d_g(v1(t2 - dt))                        (next first-passer still a gap away)
 *   s2(t) - s2(t - dt) >= d_h(v2(t - dt))   for sampled t <= t2
 *
 * with d_h(v) = 2 v + 8 and d_g(v) = max(2 v, 8). The gap condition makes MRCT > PET.
 */

#include "conflict/core.hpp"
#include "conflict/selection.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace conflict {

struct EnhancedTrack;

class OffPathError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Sampled motion of one agent: time, position, speed and (optionally) acceleration.
struct MotionSeries
{
  AgentKind kind = AgentKind::vehicle;
  std::vector<double> t;
  std::vector<Vec2> p;
  std::vector<double> v;
  std::vector<double> a;  // empty when unavailable
};

/// Given speed, with acceleration as its gradient when at least 3 samples exist.
MotionSeries motion_series(const Track& track);
/// Enhanced positions and the final (smoothed) speed / acceleration.
MotionSeries motion_series(const EnhancedTrack& track);

struct CurvilinearProfile
{
  std::vector<double> t;
  std::vector<double> s;  // signed arc length to the conflict point
  std::vector<double> v;
  std::vector<double> a;  // may be empty
  double t_pass = 0.0;    // time at which s crosses 0

  bool contiguous() const;
  double s_at(double time) const;
  double v_at(double time) const;
  double start() const { return t.front(); }
  double end() const { return t.back(); }
};

/// Arc length along the sampled path relative to the point where it passes `location`. When the path
/// comes near the location more than once, the passage closest in time to `t_hint` is used.
/// Throws OffPathError when the path never comes within max_offset of the location.
CurvilinearProfile curvilinear_profile(const MotionSeries& motion, Vec2 location, double t_hint,
                                       double max_offset = 0.5);

inline constexpr double kDefaultMaxDecel = 3.35;  // m/s^2, magnitude of a_max

double psd(double remaining_distance, double speed, double a_max = kDefaultMaxDecel);

/// Minimum PSD of the second passer before its passage, over samples with s < 0 and v > min_speed.
std::optional<double> psd_min(const CurvilinearProfile& second, double a_max = kDefaultMaxDecel,
                              double min_speed = 0.5);

struct DecelStats
{
  double max_decel = 0.0;  // most negative acceleration before passage
  double lead_time = 0.0;  // passage time minus the time of that acceleration
};

std::optional<DecelStats> decel_stats(const CurvilinearProfile& second);

struct MrctParams
{
  double headway_slope = 2.0;      // s
  double headway_offset = 8.0;     // m
  double gap_slope = 2.0;          // s
  double gap_floor = 8.0;          // m
  double search_resolution = 0.01; // s
  double search_max = 30.0;        // s
  double refine_tolerance = 0.001; // s

  void validate() const;
};

double critical_headway(double v, const MrctParams& params = {});
double critical_gap(double v, const MrctParams& params = {});

enum class MrctStatus : std::uint8_t
{
  ok,
  no_solution,  // a profile lacks the samples needed (missing pre-conflict motion or gaps)
  infeasible,   // no period up to search_max satisfies the constraints
};

std::string_view to_string(MrctStatus s);

enum class Execution : std::uint8_t
{
  serial,
  parallel,
};

struct MrctResult
{
  MrctStatus status = MrctStatus::no_solution;
  double value = 0.0;
  bool below_pet = false;  // would indicate a violated construction guarantee
};

/// Evaluates the constraint families at one candidate period.
class MrctFeasibility
{
public:
  /// Pass second = nullptr for the pure car-following variant (headway of the first stream only,
  /// over the whole profile).
  MrctFeasibility(const CurvilinearProfile& first, const CurvilinearProfile* second, const MrctParams& params);

  bool operator()(double dt) const;

private:
  bool headway_ok(const CurvilinearProfile& p, double t_limit, double dt) const;

  const CurvilinearProfile& first_;
  const CurvilinearProfile* second_;
  MrctParams params_;
};

/// Index k >= 1 of the first feasible candidate k * resolution, scanning up to `count`.
std::optional<std::size_t> first_feasible_serial(const MrctFeasibility& feasible, double resolution,
                                                 std::size_t count);
std::optional<std::size_t> first_feasible_parallel(const MrctFeasibility& feasible, double resolution,
                                                   std::size_t count);

/// Grid scan at search_resolution, then bisection of the bracketing step down to refine_tolerance.
MrctResult mrct(const CurvilinearProfile& first, const CurvilinearProfile& second, const MrctParams& params = {},
                Execution exec = Execution::serial);

/// Car-following clearance of a single stream: smallest dt with s(t) - s(t - dt) >= d_h(v(t - dt)).
MrctResult mrct_car_following(const CurvilinearProfile& stream, const MrctParams& params = {},
                              Execution exec = Execution::serial);

struct MetricsConfig
{
  MrctParams mrct;
  double a_max = kDefaultMaxDecel;
  double psd_min_speed = 0.5;
};

struct MetricsRecord
{
  std::string case_id;
  CaseCategory category = CaseCategory::AV_free;
  PairKind pair_kind = PairKind::veh_veh;
  std::optional<RegimeLabel> regime;
  double pet = 0.0;
  double min_sep = 0.0;
  std::optional<double> psd_min;
  std::optional<double> max_decel;
  std::optional<double> decel_lead_time;
  std::optional<double> mrct;
  std::optional<double> pre_conflict;
  std::optional<double> flow;
  std::optional<MrctStatus> mrct_status;  // absent when MRCT does not apply (non vehicle-vehicle)
};

/// PET, separation, PSD and deceleration of a vehicle second-passer, and MRCT for vehicle pairs.
/// Metrics that do not apply or cannot be evaluated stay empty.
MetricsRecord case_metrics(const ConflictCase& c, const MotionSeries& first, const MotionSeries& second,
                           const MetricsConfig& cfg = {}, Execution exec = Execution::serial);

}  // namespace conflict
