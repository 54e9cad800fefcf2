#include "conflict/assess.hpp"

#include "conflict/geometry.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace conflict {

AnomalyFlags anomaly_flags(const KinematicProfile& profile, const AnomalyLimits& limits)
{
  const std::size_t n = profile.t.size();
  AnomalyFlags flags{std::vector<bool>(n, false), std::vector<bool>(n, false), std::vector<bool>(n, false)};
  for (std::size_t i = 0; i < n; ++i) {
    flags.acc[i] = profile.acceleration[i] < limits.accel_min || profile.acceleration[i] > limits.accel_max;
    flags.jerk[i] = std::abs(profile.jerk[i]) > limits.jerk_abs;
  }

  // A reversal is a sign change between consecutive samples outside the deadband; it spans
  // the samples from the previous significant one to the one where the new sign shows up.
  struct Reversal
  {
    std::size_t from;
    std::size_t at;
  };
  std::vector<Reversal> reversals;
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(profile.jerk[i]) <= limits.jerk_deadband) continue;
    if (last && std::signbit(profile.jerk[i]) != std::signbit(profile.jerk[*last])) reversals.push_back({*last, i});
    last = i;
  }
  for (std::size_t k = 1; k < reversals.size(); ++k) {
    const auto& a = reversals[k - 1];
    const auto& b = reversals[k];
    if (profile.t[b.at] - profile.t[a.at] <= limits.jsi_window + kGridTolerance) {
      for (std::size_t i = a.from; i <= b.at; ++i) flags.jsi[i] = true;
    }
  }
  return flags;
}

namespace {

struct Tally
{
  std::size_t vehicles = 0;
  std::size_t samples = 0;
  std::size_t acc = 0;
  std::size_t jerk = 0;
  std::size_t jsi = 0;
  double delta_v = 0.0;

  void add(const VehicleQuality& q, const AnomalyFlags& f)
  {
    ++vehicles;
    samples += f.acc.size();
    for (std::size_t i = 0; i < f.acc.size(); ++i) {
      acc += f.acc[i];
      jerk += f.jerk[i];
      jsi += f.jsi[i];
    }
    delta_v += q.delta_v;
  }

  AnomalyReport report() const
  {
    AnomalyReport r;
    r.vehicles = vehicles;
    r.samples = samples;
    if (vehicles > 0) r.delta_v = delta_v / static_cast<double>(vehicles);
    if (samples > 0) {
      const double s = static_cast<double>(samples);
      r.acc_pct = 100.0 * static_cast<double>(acc) / s;
      r.jerk_pct = 100.0 * static_cast<double>(jerk) / s;
      r.jsi_pct = 100.0 * static_cast<double>(jsi) / s;
    }
    return r;
  }
};

Vec2 mean_direction(const Track& track, double window, double min_step, bool from_start)
{
  const auto& pts = track.points();
  if (pts.size() < 2) throw DegenerateGeometry(fmt::format("track {}: direction undefined", track.agent_id()));
  const double t_lo = from_start ? pts.front().t : pts.back().t - window;
  const double t_hi = from_start ? pts.front().t + window : pts.back().t;
  Vec2 sum;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i - 1].t < t_lo - kGridTolerance || pts[i].t > t_hi + kGridTolerance) continue;
    const Vec2 step = pts[i].position() - pts[i - 1].position();
    const double len = step.norm();
    if (len < min_step) continue;
    sum = sum + step * (1.0 / len);
  }
  const double norm = sum.norm();
  if (norm < 1e-9) throw DegenerateGeometry(fmt::format("track {}: direction undefined (static)", track.agent_id()));
  return sum * (1.0 / norm);
}

}  // namespace

AnomalyBreakdown anomaly_report(std::span<const VehicleQuality> vehicles, const AnomalyLimits& limits)
{
  if (vehicles.empty()) throw InsufficientData("anomaly report over an empty corpus");
  Tally av, hv, all;
  for (const auto& v : vehicles) {
    const auto flags = anomaly_flags(v.profile, limits);
    (v.kind == AgentKind::AV ? av : hv).add(v, flags);
    all.add(v, flags);
  }
  return {av.report(), hv.report(), all.report()};
}

Vec2 initial_direction(const Track& track, double window, double min_step)
{
  return mean_direction(track, window, min_step, true);
}

Vec2 ending_direction(const Track& track, double window, double min_step)
{
  return mean_direction(track, window, min_step, false);
}

Motion classify_motion(Vec2 a, Vec2 b, const RegimeSettings& settings)
{
  const double angle = std::atan2(std::abs(cross(a, b)), dot(a, b)) * 180.0 / std::numbers::pi;
  if (angle < settings.parallel_max_deg) return Motion::P;
  if (angle > settings.opposite_min_deg) return Motion::O;
  return Motion::C;
}

RegimeLabel classify_regime(const ConflictCase& c, const Track& first, const Track& second,
                            const RegimeSettings& settings)
{
  const Vec2 first_in = initial_direction(first, settings.direction_window, settings.min_step);
  const Vec2 second_in = initial_direction(second, settings.direction_window, settings.min_step);
  const Vec2 first_out = ending_direction(first, settings.direction_window, settings.min_step);
  const Vec2 second_out = ending_direction(second, settings.direction_window, settings.min_step);

  RegimeLabel label;
  label.before = classify_motion(first_in, second_in, settings);
  label.after = classify_motion(first_out, second_out, settings);
  const double t = c.conflict.t_first;
  const Vec2 offset = second.position_at(t) - first.position_at(t);
  label.side = cross(first_in, offset) > 0.0 ? Side::left_to_right : Side::right_to_left;
  return label;
}

}  // namespace conflict
