#pragma once
/**
 * @file core.hpp
 * @brief Trajectory domain model and elementary kinematic / consistency computations.
 *
 * Tracks are sampled on a 0.1 s grid. Missing timesteps are kept as explicit gaps
 * (consecutive points more than one tick apart) and are never interpolated here.
 */

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace conflict {

inline constexpr double kSampleInterval = 0.1;  // s, source recordings are 10 Hz
inline constexpr double kGridTolerance = 1e-6;  // s

struct Vec2
{
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Thrown when an operation receives too few samples to be evaluated.
class InsufficientData : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an operation that requires a contiguous 0.1 s grid meets a gap.
class GapError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Violation of a declared invariant while constructing a domain object.
class InvalidInput : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

enum class AgentKind : std::uint8_t
{
  AV,
  vehicle,
  pedestrian,
  cyclist,
  other
};

std::string_view to_string(AgentKind kind);
std::optional<AgentKind> parse_agent_kind(std::string_view text);

/// AV and human-driven vehicles.
constexpr bool is_vehicle(AgentKind kind)
{
  return kind == AgentKind::AV || kind == AgentKind::vehicle;
}

/// Grid index of a timestamp, or nullopt when t is off the 0.1 s grid.
std::optional<std::int64_t> grid_tick(double t);

struct TrackPoint
{
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double heading = 0.0;

  Vec2 position() const { return {x, y}; }
  Vec2 velocity() const { return {vx, vy}; }
  double speed() const { return std::hypot(vx, vy); }
  std::int64_t tick() const { return std::llround(t / kSampleInterval); }

  bool operator==(const TrackPoint&) const = default;
};

class Track
{
public:
  /// Validates grid alignment, finiteness and strict time ordering.
  Track(std::string agent_id, AgentKind kind, std::vector<TrackPoint> points);

  const std::string& agent_id() const { return agent_id_; }
  AgentKind kind() const { return kind_; }
  const std::vector<TrackPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  double start_time() const;
  double end_time() const;
  double duration() const { return empty() ? 0.0 : end_time() - start_time(); }

  /// True when at least one timestep between the first and last sample is missing.
  bool has_gaps() const;

  std::vector<double> times() const;
  std::vector<Vec2> positions() const;
  /// ‖(vx, vy)‖ per sample.
  std::vector<double> speeds() const;

  /// Position at time t by linear interpolation; clamps outside the observed window.
  Vec2 position_at(double t) const;

  bool operator==(const Track&) const = default;

private:
  std::string agent_id_;
  AgentKind kind_;
  std::vector<TrackPoint> points_;
};

struct KinematicProfile
{
  std::vector<double> t;
  std::vector<double> speed;
  std::vector<double> acceleration;
  std::vector<double> jerk;
};

/// Central differences in the interior, one-sided differences at both ends.
std::vector<double> gradient(std::span<const double> values, std::span<const double> t);

/// Position-based speed: (s_{t-1,t} + s_{t,t+1}) / (2 dt) in the interior, one-sided chords at the ends.
std::vector<double> position_based_speed(std::span<const Vec2> positions, double dt = kSampleInterval);
std::vector<double> position_based_speed(const Track& track);

/// Mean absolute difference between the given speed ‖(vx,vy)‖ and the position-based speed.
double speed_consistency_error(const Track& track);

/// |polyline length - trapezoid integral of the given speed|.
double length_inconsistency(const Track& track);
/// Same, integrating a substitute speed series aligned with the track.
double length_inconsistency(const Track& track, std::span<const double> speed);

/// Sum of chord lengths of a point sequence.
double path_length(std::span<const Vec2> points);

KinematicProfile kinematic_profile(std::span<const double> speed, std::span<const double> t);

}  // namespace conflict
