#include "conflict/core.hpp"

#include <algorithm>
#include <array>
#include <fmt/format.h>

namespace conflict {

namespace {

constexpr std::array<std::pair<AgentKind, std::string_view>, 5> kKindNames{{
  {AgentKind::AV, "AV"},
  {AgentKind::vehicle, "vehicle"},
  {AgentKind::pedestrian, "pedestrian"},
  {AgentKind::cyclist, "cyclist"},
  {AgentKind::other, "other"},
}};

}  // namespace

std::string_view to_string(AgentKind kind)
{
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "other";
}

std::optional<AgentKind> parse_agent_kind(std::string_view text)
{
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::optional<std::int64_t> grid_tick(double t)
{
  if (!std::isfinite(t)) return std::nullopt;
  const double ticks = t / kSampleInterval;
  const auto rounded = std::llround(ticks);
  if (std::abs(ticks - static_cast<double>(rounded)) * kSampleInterval > kGridTolerance) return std::nullopt;
  return rounded;
}

Track::Track(std::string agent_id, AgentKind kind, std::vector<TrackPoint> points)
  : agent_id_(std::move(agent_id)), kind_(kind), points_(std::move(points))
{
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!(p.t >= 0.0) || !grid_tick(p.t)) {
      throw InvalidInput(fmt::format("track {}: timestamp {} is negative or off the 0.1 s grid", agent_id_, p.t));
    }
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.vx) || !std::isfinite(p.vy) ||
        !std::isfinite(p.heading)) {
      throw InvalidInput(fmt::format("track {}: non-finite state at t={:.1f}", agent_id_, p.t));
    }
    if (i > 0 && p.tick() <= points_[i - 1].tick()) {
      throw InvalidInput(fmt::format("track {}: timestamps not strictly increasing at t={:.1f}", agent_id_, p.t));
    }
  }
}

double Track::start_time() const
{
  if (empty()) throw InsufficientData(fmt::format("track {} is empty", agent_id_));
  return points_.front().t;
}

double Track::end_time() const
{
  if (empty()) throw InsufficientData(fmt::format("track {} is empty", agent_id_));
  return points_.back().t;
}

bool Track::has_gaps() const
{
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i].tick() - points_[i - 1].tick() != 1) return true;
  }
  return false;
}

std::vector<double> Track::times() const
{
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.t);
  return out;
}

std::vector<Vec2> Track::positions() const
{
  std::vector<Vec2> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.position());
  return out;
}

std::vector<double> Track::speeds() const
{
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.speed());
  return out;
}

Vec2 Track::position_at(double t) const
{
  if (empty()) throw InsufficientData(fmt::format("track {} is empty", agent_id_));
  if (t <= points_.front().t) return points_.front().position();
  if (t >= points_.back().t) return points_.back().position();
  auto it = std::lower_bound(points_.begin(), points_.end(), t,
                             [](const TrackPoint& p, double value) { return p.t < value; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  return a.position() + (b.position() - a.position()) * w;
}

std::vector<double> gradient(std::span<const double> values, std::span<const double> t)
{
  const std::size_t n = values.size();
  if (n != t.size()) throw std::invalid_argument("gradient: values and times differ in length");
  if (n < 2) throw InsufficientData("gradient needs at least 2 samples");
  std::vector<double> out(n);
  out.front() = (values[1] - values[0]) / (t[1] - t[0]);
  out.back() = (values[n - 1] - values[n - 2]) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = (values[i + 1] - values[i - 1]) / (t[i + 1] - t[i - 1]);
  }
  return out;
}

std::vector<double> position_based_speed(std::span<const Vec2> positions, double dt)
{
  const std::size_t n = positions.size();
  if (n < 3) throw InsufficientData(fmt::format("position-based speed needs 3 samples, got {}", n));
  std::vector<double> chord(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) chord[i] = distance(positions[i], positions[i + 1]);

  std::vector<double> out(n);
  out.front() = chord.front() / dt;
  out.back() = chord.back() / dt;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (chord[i - 1] + chord[i]) / (2.0 * dt);
  return out;
}

std::vector<double> position_based_speed(const Track& track)
{
  if (track.size() < 3) {
    throw InsufficientData(fmt::format("track {}: position-based speed needs 3 samples", track.agent_id()));
  }
  if (track.has_gaps()) throw GapError(fmt::format("track {} has missing timesteps", track.agent_id()));
  return position_based_speed(track.positions(), kSampleInterval);
}

double speed_consistency_error(const Track& track)
{
  const auto vp = position_based_speed(track);
  const auto& pts = track.points();
  double sum = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) sum += std::abs(pts[i].speed() - vp[i]);
  return sum / static_cast<double>(pts.size());
}

double path_length(std::span<const Vec2> points)
{
  double len = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) len += distance(points[i - 1], points[i]);
  return len;
}

double length_inconsistency(const Track& track) { return length_inconsistency(track, track.speeds()); }

double length_inconsistency(const Track& track, std::span<const double> speed)
{
  if (track.size() < 2) {
    throw InsufficientData(fmt::format("track {}: length inconsistency needs 2 samples", track.agent_id()));
  }
  if (speed.size() != track.size()) throw std::invalid_argument("length_inconsistency: misaligned speed");
  const auto& pts = track.points();
  double integrated = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    integrated += 0.5 * (speed[i - 1] + speed[i]) * (pts[i].t - pts[i - 1].t);
  }
  return std::abs(path_length(track.positions()) - integrated);
}

KinematicProfile kinematic_profile(std::span<const double> speed, std::span<const double> t)
{
  if (speed.size() != t.size()) throw std::invalid_argument("kinematic_profile: misaligned arrays");
  if (speed.size() < 3) throw InsufficientData("kinematic profile needs at least 3 samples");
  KinematicProfile profile;
  profile.t.assign(t.begin(), t.end());
  profile.speed.assign(speed.begin(), speed.end());
  profile.acceleration = gradient(profile.speed, profile.t);
  profile.jerk = gradient(profile.acceleration, profile.t);
  return profile;
}

}  // namespace conflict
