#include "conflict/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <tuple>
#include <unordered_map>

namespace conflict {

namespace {

constexpr double kParamEps = 1e-12;
constexpr double kMiterLimit = 4.0;  // in units of the offset distance

struct Box
{
  double min_x, min_y, max_x, max_y;

  bool overlaps(const Box& o) const
  {
    return min_x <= o.max_x && o.min_x <= max_x && min_y <= o.max_y && o.min_y <= max_y;
  }
};

Box segment_box(Vec2 a, Vec2 b)
{
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x), std::max(a.y, b.y)};
}

Box polyline_box(const Polyline& p)
{
  Box box{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
          std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const auto& v : p.vertices()) {
    box.min_x = std::min(box.min_x, v.x);
    box.min_y = std::min(box.min_y, v.y);
    box.max_x = std::max(box.max_x, v.x);
    box.max_y = std::max(box.max_y, v.y);
  }
  return box;
}

Vec2 unit(Vec2 v)
{
  const double n = v.norm();
  return {v.x / n, v.y / n};
}

Vec2 left_normal(Vec2 dir) { return {-dir.y, dir.x}; }

Polyline offset_side(const Polyline& path, double d, double side)
{
  const auto& v = path.vertices();
  const std::size_t nseg = path.segment_count();
  std::vector<Vec2> normals(nseg);
  std::vector<Vec2> dirs(nseg);
  for (std::size_t k = 0; k < nseg; ++k) {
    dirs[k] = unit(v[k + 1] - v[k]);
    normals[k] = left_normal(dirs[k]) * side;
  }

  std::vector<Vec2> out;
  out.reserve(v.size() + nseg);
  out.push_back(v.front() + normals.front() * d);
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const Vec2 n1 = normals[i - 1];
    const Vec2 n2 = normals[i];
    const double turn = cross(dirs[i - 1], dirs[i]) * side;
    const double cos_theta = dot(n1, n2);
    if (std::abs(turn) < 1e-12 && cos_theta > 0.0) {
      out.push_back(v[i] + n1 * d);
      continue;
    }
    // turn > 0 means the corner bends toward this side: the concave, inner corner.
    if (turn > 0.0 && cos_theta > -1.0 + 1e-12) {
      const Vec2 miter = (n1 + n2) * (1.0 / (1.0 + cos_theta));
      if (miter.norm() <= kMiterLimit) {
        out.push_back(v[i] + miter * d);
        continue;
      }
    }
    out.push_back(v[i] + n1 * d);
    out.push_back(v[i] + n2 * d);
  }
  out.push_back(v.back() + normals.back() * d);
  return Polyline::from_points(out);
}

}  // namespace

Polyline::Polyline(std::vector<Vec2> vertices) : vertices_(std::move(vertices))
{
  if (vertices_.size() < 2) throw DegenerateGeometry("polyline needs at least 2 vertices");
  cumulative_.resize(vertices_.size());
  cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    const double len = distance(vertices_[i - 1], vertices_[i]);
    if (len == 0.0) throw DegenerateGeometry(fmt::format("polyline has repeated vertex at index {}", i));
    cumulative_[i] = cumulative_[i - 1] + len;
  }
}

Polyline Polyline::from_points(std::span<const Vec2> points, double tol)
{
  std::vector<Vec2> kept;
  kept.reserve(points.size());
  for (const auto& p : points) {
    if (kept.empty() || distance(kept.back(), p) > tol) kept.push_back(p);
  }
  if (kept.size() < 2) throw DegenerateGeometry("polyline has zero length");
  return Polyline(std::move(kept));
}

Vec2 Polyline::point_at(double s) const
{
  std::size_t k = 0;
  if (s >= length()) {
    k = segment_count() - 1;
  } else if (s > 0.0) {
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    k = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  }
  const Vec2 a = vertices_[k];
  const Vec2 b = vertices_[k + 1];
  const double seg = cumulative_[k + 1] - cumulative_[k];
  return a + (b - a) * ((s - cumulative_[k]) / seg);
}

double Polyline::distance_to(Vec2 p) const
{
  double best = std::numeric_limits<double>::max();
  for (std::size_t k = 0; k < segment_count(); ++k) {
    best = std::min(best, point_segment_distance(p, vertices_[k], vertices_[k + 1]));
  }
  return best;
}

double project_to_segment(Vec2 p, Vec2 a, Vec2 b)
{
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return 0.0;
  return std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b)
{
  const double u = project_to_segment(p, a, b);
  return distance(p, a + (b - a) * u);
}

std::optional<SegmentHit> intersect_segments(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1)
{
  const Vec2 r = a1 - a0;
  const Vec2 q = b1 - b0;
  const Vec2 ab = b0 - a0;
  const double denom = cross(r, q);
  const double scale = r.norm() * q.norm();

  if (std::abs(denom) > kParamEps * scale) {
    const double u = cross(ab, q) / denom;
    const double w = cross(ab, r) / denom;
    if (u < -kParamEps || u > 1.0 + kParamEps || w < -kParamEps || w > 1.0 + kParamEps) return std::nullopt;
    const double uc = std::clamp(u, 0.0, 1.0);
    return SegmentHit{a0 + r * uc, uc, std::clamp(w, 0.0, 1.0)};
  }

  // Parallel: only collinear overlaps intersect.
  const double rr = dot(r, r);
  if (std::abs(cross(ab, r)) > kParamEps * std::max(rr, ab.norm() * r.norm())) return std::nullopt;
  const double t0 = dot(b0 - a0, r) / rr;
  const double t1 = dot(b1 - a0, r) / rr;
  const double lo = std::max(0.0, std::min(t0, t1));
  const double hi = std::min(1.0, std::max(t0, t1));
  if (lo > hi + kParamEps) return std::nullopt;
  const Vec2 point = a0 + r * lo;
  const double qq = dot(q, q);
  return SegmentHit{point, lo, std::clamp(dot(point - b0, q) / qq, 0.0, 1.0)};
}

bool polylines_intersect(const Polyline& a, const Polyline& b)
{
  if (!polyline_box(a).overlaps(polyline_box(b))) return false;
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  for (std::size_t i = 0; i + 1 < va.size(); ++i) {
    const Box ba = segment_box(va[i], va[i + 1]);
    for (std::size_t j = 0; j + 1 < vb.size(); ++j) {
      if (!ba.overlaps(segment_box(vb[j], vb[j + 1]))) continue;
      if (intersect_segments(va[i], va[i + 1], vb[j], vb[j + 1])) return true;
    }
  }
  return false;
}

std::vector<PolylineHit> polyline_intersections(const Polyline& a, const Polyline& b)
{
  std::vector<PolylineHit> hits;
  if (!polyline_box(a).overlaps(polyline_box(b))) return hits;
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  for (std::size_t i = 0; i + 1 < va.size(); ++i) {
    const Box ba = segment_box(va[i], va[i + 1]);
    for (std::size_t j = 0; j + 1 < vb.size(); ++j) {
      if (!ba.overlaps(segment_box(vb[j], vb[j + 1]))) continue;
      if (auto hit = intersect_segments(va[i], va[i + 1], vb[j], vb[j + 1])) {
        hits.push_back({hit->point, i, hit->u, j, hit->w});
      }
    }
  }
  std::sort(hits.begin(), hits.end(), [](const PolylineHit& x, const PolylineHit& y) {
    return std::tie(x.segment_a, x.u, x.segment_b, x.w) < std::tie(y.segment_a, y.u, y.segment_b, y.w);
  });
  return hits;
}

std::pair<Polyline, Polyline> offset_polylines(const Polyline& path, double d)
{
  if (!(d > 0.0)) throw std::invalid_argument("offset distance must be positive");
  return {offset_side(path, d, 1.0), offset_side(path, d, -1.0)};
}

bool crossing_test(const Polyline& path_a, double buffer_a, const Polyline& path_b, double buffer_b)
{
  const auto [left_a, right_a] = offset_polylines(path_a, buffer_a);
  if (!polylines_intersect(path_b, left_a) || !polylines_intersect(path_b, right_a)) return false;
  const auto [left_b, right_b] = offset_polylines(path_b, buffer_b);
  return polylines_intersect(path_a, left_b) && polylines_intersect(path_a, right_b);
}

double TimedPath::time_at(std::size_t segment, double u) const
{
  return times[segment] + (times[segment + 1] - times[segment]) * u;
}

TimedPath timed_path(const Track& track)
{
  std::vector<Vec2> kept;
  std::vector<double> times;
  for (const auto& p : track.points()) {
    if (!kept.empty() && distance(kept.back(), p.position()) <= 1e-9) continue;
    kept.push_back(p.position());
    times.push_back(p.t);
  }
  if (kept.size() < 2) throw DegenerateGeometry(fmt::format("track {} never moves", track.agent_id()));
  return {Polyline(std::move(kept)), std::move(times)};
}

ConflictPoint conflict_point(const Track& track_a, const Track& track_b)
{
  const bool swap = track_b.agent_id() < track_a.agent_id();
  const Track& lo = swap ? track_b : track_a;
  const Track& hi = swap ? track_a : track_b;

  const auto path_lo = timed_path(lo);
  const auto path_hi = timed_path(hi);
  const auto hits = polyline_intersections(path_lo.line, path_hi.line);
  if (hits.empty()) {
    throw DegenerateGeometry(fmt::format("tracks {} and {} do not cross", lo.agent_id(), hi.agent_id()));
  }

  const PolylineHit* best = nullptr;
  double best_gap = std::numeric_limits<double>::max();
  double best_t_lo = 0.0;
  double best_t_hi = 0.0;
  for (const auto& hit : hits) {
    const double t_lo = path_lo.time_at(hit.segment_a, hit.u);
    const double t_hi = path_hi.time_at(hit.segment_b, hit.w);
    const double gap = std::abs(t_lo - t_hi);
    if (gap < best_gap - 1e-9 || (std::abs(gap - best_gap) <= 1e-9 && t_lo < best_t_lo)) {
      best = &hit;
      best_gap = gap;
      best_t_lo = t_lo;
      best_t_hi = t_hi;
    }
  }

  ConflictPoint cp;
  cp.location = best->point;
  if (best_t_hi < best_t_lo) {
    cp.t_first = best_t_hi;
    cp.t_second = best_t_lo;
    cp.first_agent = hi.agent_id();
    cp.second_agent = lo.agent_id();
  } else {
    cp.t_first = best_t_lo;
    cp.t_second = best_t_hi;
    cp.first_agent = lo.agent_id();
    cp.second_agent = hi.agent_id();
  }
  return cp;
}

double min_separation(const Track& track_a, const Track& track_b)
{
  std::unordered_map<std::int64_t, Vec2> by_tick;
  by_tick.reserve(track_b.size());
  for (const auto& p : track_b.points()) by_tick.emplace(p.tick(), p.position());

  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : track_a.points()) {
    if (auto it = by_tick.find(p.tick()); it != by_tick.end()) best = std::min(best, distance(p.position(), it->second));
  }
  if (!std::isfinite(best)) {
    throw InsufficientData(
      fmt::format("tracks {} and {} share no timestep", track_a.agent_id(), track_b.agent_id()));
  }
  return best;
}

}  // namespace conflict
