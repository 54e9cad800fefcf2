#pragma once
// Track and scenario builders shared by the unit tests and the acceptance runner.

#include "conflict/core.hpp"
#include "conflict/geometry.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace fixtures {

using conflict::AgentKind;
using conflict::Track;
using conflict::TrackPoint;
using conflict::Vec2;

/// n samples from t0 on the 0.1 s grid; velocity from the supplied function, heading from velocity.
inline Track make_track(const std::string& id, AgentKind kind, std::size_t n,
                        const std::function<Vec2(double)>& position, const std::function<Vec2(double)>& velocity,
                        double t0 = 0.0)
{
  std::vector<TrackPoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * conflict::kSampleInterval;
    const Vec2 p = position(t);
    const Vec2 v = velocity(t);
    pts.push_back({t, p.x, p.y, v.x, v.y, std::atan2(v.y, v.x)});
  }
  return Track(id, kind, std::move(pts));
}

/// Constant-velocity straight line through `through` at time t_pass.
inline Track straight(const std::string& id, AgentKind kind, Vec2 through, Vec2 velocity, double t_pass,
                      std::size_t n = 110, double t0 = 0.0)
{
  return make_track(
      id, kind, n, [=](double t) { return through + velocity * (t - t_pass); }, [=](double) { return velocity; }, t0);
}

inline Track with_points(const Track& base, std::vector<TrackPoint> pts)
{
  return Track(base.agent_id(), base.kind(), std::move(pts));
}

inline conflict::Polyline line(std::initializer_list<Vec2> pts) { return conflict::Polyline(std::vector<Vec2>(pts)); }

inline Vec2 rotate(Vec2 p, double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

/// Rigid motion of every sample: rotation about the origin, then translation.
inline Track transformed(const Track& track, double angle, Vec2 shift)
{
  std::vector<TrackPoint> pts = track.points();
  for (auto& p : pts) {
    const Vec2 q = rotate(p.position(), angle) + shift;
    const Vec2 v = rotate(p.velocity(), angle);
    p.x = q.x;
    p.y = q.y;
    p.vx = v.x;
    p.vy = v.y;
    p.heading = std::atan2(std::sin(p.heading + angle), std::cos(p.heading + angle));
  }
  return with_points(track, std::move(pts));
}

}  // namespace fixtures
