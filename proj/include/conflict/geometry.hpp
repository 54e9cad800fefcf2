#pragma once
/**
 * @file geometry.hpp
 * @brief Planar polyline machinery: buffer curves, the crossing test, conflict points and separations.
 */

#include "conflict/core.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace conflict {

class DegenerateGeometry : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class Polyline
{
public:
  /// Requires >= 2 vertices with no two consecutive vertices equal.
  explicit Polyline(std::vector<Vec2> vertices);

  /// Drops consecutive duplicates (within tol) before validating; throws DegenerateGeometry
  /// when fewer than 2 distinct vertices remain.
  static Polyline from_points(std::span<const Vec2> points, double tol = 1e-9);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  std::size_t segment_count() const { return vertices_.size() - 1; }
  Vec2 front() const { return vertices_.front(); }
  Vec2 back() const { return vertices_.back(); }

  double length() const { return cumulative_.back(); }
  /// Arc length at each vertex.
  const std::vector<double>& cumulative_length() const { return cumulative_; }

  /// Point at arc length s; extrapolates linearly along the end segments outside [0, length].
  Vec2 point_at(double s) const;

  /// Shortest distance from p to the polyline.
  double distance_to(Vec2 p) const;

private:
  std::vector<Vec2> vertices_;
  std::vector<double> cumulative_;
};

/// Closest point on segment [a, b] to p, as the interpolation parameter in [0, 1].
double project_to_segment(Vec2 p, Vec2 a, Vec2 b);
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

struct SegmentHit
{
  Vec2 point;
  double u = 0.0;  // parameter along the first segment
  double w = 0.0;  // parameter along the second segment
};

/// Intersection of closed segments. Collinear overlaps report the overlap endpoint closest to a0.
std::optional<SegmentHit> intersect_segments(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);

struct PolylineHit
{
  Vec2 point;
  std::size_t segment_a = 0;
  double u = 0.0;
  std::size_t segment_b = 0;
  double w = 0.0;
};

bool polylines_intersect(const Polyline& a, const Polyline& b);
/// Every segment-pair intersection, ordered by (segment_a, u).
std::vector<PolylineHit> polyline_intersections(const Polyline& a, const Polyline& b);

/// Left and right buffer curves at perpendicular distance d.
///
/// Convex (outer) corners are bevelled so every vertex stays at distance d from the path;
/// concave (inner) corners use the miter point, falling back to a bevel when the miter
/// length exceeds 4d.
std::pair<Polyline, Polyline> offset_polylines(const Polyline& path, double d);

/// True iff b crosses both buffer curves of a AND a crosses both buffer curves of b.
bool crossing_test(const Polyline& path_a, double buffer_a, const Polyline& path_b, double buffer_b);

struct ConflictPoint
{
  Vec2 location;
  double t_first = 0.0;
  double t_second = 0.0;
  std::string first_agent;
  std::string second_agent;

  bool operator==(const ConflictPoint&) const = default;
};

/// A track's samples reduced to distinct consecutive positions, with the time each vertex is reached.
struct TimedPath
{
  Polyline line;
  std::vector<double> times;  // one per vertex

  /// Time at which the path reaches parameter u on segment k.
  double time_at(std::size_t segment, double u) const;
};

TimedPath timed_path(const Track& track);

/// Crossing of two trajectories; when they cross several times, the crossing with the smallest
/// |tA - tB| is chosen. Throws DegenerateGeometry when the trajectories never cross.
ConflictPoint conflict_point(const Track& track_a, const Track& track_b);

/// Minimum centroid distance over common timesteps. Throws InsufficientData without temporal overlap.
double min_separation(const Track& track_a, const Track& track_b);

}  // namespace conflict
