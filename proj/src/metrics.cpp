#include "conflict/metrics.hpp"

#include "conflict/enhance.hpp"
#include "conflict/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <omp.h>

namespace conflict {

namespace {

double interpolate(std::span<const double> t, std::span<const double> y, double time)
{
  if (time <= t.front()) return y.front();
  if (time >= t.back()) return y.back();
  auto it = std::upper_bound(t.begin(), t.end(), time);
  const auto k = static_cast<std::size_t>(it - t.begin());
  const double w = (time - t[k - 1]) / (t[k] - t[k - 1]);
  return y[k - 1] + (y[k] - y[k - 1]) * w;
}

}  // namespace

MotionSeries motion_series(const Track& track)
{
  MotionSeries m{track.kind(), track.times(), track.positions(), track.speeds(), {}};
  if (m.t.size() >= 3) m.a = gradient(m.v, m.t);
  return m;
}

MotionSeries motion_series(const EnhancedTrack& track)
{
  if (track.status == EnhanceStatus::preserved_raw) return motion_series(track.base);
  return {track.base.kind(), track.profile.t, track.positions, track.profile.speed, track.profile.acceleration};
}

bool CurvilinearProfile::contiguous() const
{
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs(t[i] - t[i - 1] - kSampleInterval) > kGridTolerance) return false;
  }
  return true;
}

double CurvilinearProfile::s_at(double time) const { return interpolate(t, s, time); }
double CurvilinearProfile::v_at(double time) const { return interpolate(t, v, time); }

CurvilinearProfile curvilinear_profile(const MotionSeries& motion, Vec2 location, double t_hint, double max_offset)
{
  const std::size_t n = motion.p.size();
  if (n < 2 || motion.t.size() != n || motion.v.size() != n) {
    throw InsufficientData("curvilinear profile needs at least 2 aligned samples");
  }
  std::vector<double> arc(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) arc[i] = arc[i - 1] + distance(motion.p[i - 1], motion.p[i]);

  std::optional<double> best_arc;
  double best_time = 0.0;
  double best_gap = std::numeric_limits<double>::max();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double u = project_to_segment(location, motion.p[k], motion.p[k + 1]);
    const Vec2 foot = motion.p[k] + (motion.p[k + 1] - motion.p[k]) * u;
    if (distance(foot, location) > max_offset) continue;
    const double time = motion.t[k] + (motion.t[k + 1] - motion.t[k]) * u;
    const double gap = std::abs(time - t_hint);
    if (gap < best_gap) {
      best_gap = gap;
      best_time = time;
      best_arc = arc[k] + (arc[k + 1] - arc[k]) * u;
    }
  }
  if (!best_arc) {
    throw OffPathError(fmt::format("conflict point ({:.2f}, {:.2f}) is more than {} m off the path", location.x,
                                   location.y, max_offset));
  }

  CurvilinearProfile out{motion.t, std::move(arc), motion.v, motion.a, best_time};
  for (double& s : out.s) s -= *best_arc;
  return out;
}

double psd(double remaining_distance, double speed, double a_max)
{
  return remaining_distance / (speed * speed / (2.0 * std::abs(a_max)));
}

std::optional<double> psd_min(const CurvilinearProfile& second, double a_max, double min_speed)
{
  std::optional<double> best;
  for (std::size_t i = 0; i < second.t.size(); ++i) {
    if (second.t[i] >= second.t_pass || second.s[i] >= 0.0 || second.v[i] <= min_speed) continue;
    const double value = psd(-second.s[i], second.v[i], a_max);
    if (!best || value < *best) best = value;
  }
  return best;
}

std::optional<DecelStats> decel_stats(const CurvilinearProfile& second)
{
  if (second.a.size() != second.t.size()) return std::nullopt;
  std::optional<std::size_t> arg;
  for (std::size_t i = 0; i < second.t.size() && second.t[i] < second.t_pass; ++i) {
    if (!arg || second.a[i] < second.a[*arg]) arg = i;
  }
  if (!arg) return std::nullopt;
  return DecelStats{second.a[*arg], second.t_pass - second.t[*arg]};
}

void MrctParams::validate() const
{
  for (double v : {headway_slope, headway_offset, gap_slope, gap_floor, search_resolution, search_max,
                   refine_tolerance}) {
    if (!(v > 0.0)) throw InvalidInput("MRCT parameters must be strictly positive");
  }
}

double critical_headway(double v, const MrctParams& params) { return params.headway_slope * v + params.headway_offset; }

double critical_gap(double v, const MrctParams& params) { return std::max(params.gap_slope * v, params.gap_floor); }

std::string_view to_string(MrctStatus s)
{
  switch (s) {
    case MrctStatus::ok: return "ok";
    case MrctStatus::no_solution: return "no_solution";
    case MrctStatus::infeasible: return "infeasible";
  }
  return "?";
}

MrctFeasibility::MrctFeasibility(const CurvilinearProfile& first, const CurvilinearProfile* second,
                                 const MrctParams& params)
  : first_(first), second_(second), params_(params)
{
}

bool MrctFeasibility::headway_ok(const CurvilinearProfile& p, double t_limit, double dt) const
{
  // Only sampled times whose shifted counterpart t - dt was observed can be checked.
  std::size_t checked = 0;
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    const double t = p.t[i];
    if (t > t_limit + kGridTolerance) break;
    const double shifted = t - dt;
    if (shifted < p.start() - kGridTolerance) continue;
    ++checked;
    if (p.s[i] - p.s_at(shifted) < critical_headway(p.v_at(shifted), params_)) return false;
  }
  return checked > 0;
}

bool MrctFeasibility::operator()(double dt) const
{
  if (second_ == nullptr) return headway_ok(first_, first_.end(), dt);
  if (!headway_ok(first_, first_.t_pass, dt)) return false;
  const double tau = second_->t_pass - dt;
  if (tau < first_.start() - kGridTolerance || tau > first_.end() + kGridTolerance) return false;
  if (-first_.s_at(tau) < critical_gap(first_.v_at(tau), params_)) return false;
  return headway_ok(*second_, second_->t_pass, dt);
}

std::optional<std::size_t> first_feasible_serial(const MrctFeasibility& feasible, double resolution,
                                                 std::size_t count)
{
  for (std::size_t k = 1; k <= count; ++k) {
    if (feasible(static_cast<double>(k) * resolution)) return k;
  }
  return std::nullopt;
}

std::optional<std::size_t> first_feasible_parallel(const MrctFeasibility& feasible, double resolution,
                                                   std::size_t count)
{
  const auto n = static_cast<long long>(count);
  long long best = n + 1;
#pragma omp parallel for schedule(static) reduction(min : best)
  for (long long k = 1; k <= n; ++k) {
    if (k < best && feasible(static_cast<double>(k) * resolution)) best = k;
  }
  if (best > n) return std::nullopt;
  return static_cast<std::size_t>(best);
}

namespace {

bool has_pre_passage_motion(const CurvilinearProfile& p)
{
  return p.t.size() >= 2 && p.contiguous() && p.start() < p.t_pass - kGridTolerance;
}

MrctResult solve(const MrctFeasibility& feasible, const MrctParams& params, Execution exec)
{
  params.validate();
  const auto count = static_cast<std::size_t>(std::floor(params.search_max / params.search_resolution + 1e-9));
  const auto k = exec == Execution::parallel ? first_feasible_parallel(feasible, params.search_resolution, count)
                                             : first_feasible_serial(feasible, params.search_resolution, count);
  if (!k) return {MrctStatus::infeasible, 0.0, false};

  double hi = static_cast<double>(*k) * params.search_resolution;
  double lo = hi - params.search_resolution;
  while (hi - lo > params.refine_tolerance) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return {MrctStatus::ok, hi, false};
}

}  // namespace

MrctResult mrct(const CurvilinearProfile& first, const CurvilinearProfile& second, const MrctParams& params,
                Execution exec)
{
  if (!has_pre_passage_motion(first) || !has_pre_passage_motion(second)) return {MrctStatus::no_solution, 0.0, false};
  auto result = solve(MrctFeasibility(first, &second, params), params, exec);
  if (result.status == MrctStatus::ok) result.below_pet = result.value < second.t_pass - first.t_pass;
  return result;
}

MrctResult mrct_car_following(const CurvilinearProfile& stream, const MrctParams& params, Execution exec)
{
  if (stream.t.size() < 2 || !stream.contiguous()) return {MrctStatus::no_solution, 0.0, false};
  return solve(MrctFeasibility(stream, nullptr, params), params, exec);
}

MetricsRecord case_metrics(const ConflictCase& c, const MotionSeries& first, const MotionSeries& second,
                           const MetricsConfig& cfg, Execution exec)
{
  MetricsRecord rec;
  rec.case_id = c.case_id();
  rec.category = c.category;
  rec.pair_kind = c.pair_kind;
  rec.regime = c.regime;
  rec.pet = c.pet;
  rec.min_sep = c.min_sep;
  const bool vehicle_pair = c.pair_kind == PairKind::veh_veh;
  if (vehicle_pair) rec.mrct_status = MrctStatus::no_solution;

  std::optional<CurvilinearProfile> p1;
  std::optional<CurvilinearProfile> p2;
  try {
    p1 = curvilinear_profile(first, c.conflict.location, c.conflict.t_first);
    p2 = curvilinear_profile(second, c.conflict.location, c.conflict.t_second);
  } catch (const OffPathError&) {
    return rec;
  } catch (const InsufficientData&) {
    return rec;
  }
  // Passage times on the series actually measured keep PET and MRCT on one clock.
  rec.pet = p2->t_pass - p1->t_pass;

  if (is_vehicle(second.kind)) {
    rec.psd_min = psd_min(*p2, cfg.a_max, cfg.psd_min_speed);
    if (auto d = decel_stats(*p2)) {
      rec.max_decel = d->max_decel;
      rec.decel_lead_time = d->lead_time;
    }
  }
  if (vehicle_pair) {
    const auto r = mrct(*p1, *p2, cfg.mrct, exec);
    rec.mrct_status = r.status;
    if (r.status == MrctStatus::ok) {
      rec.mrct = r.value;
      rec.pre_conflict = r.value - rec.pet;
      rec.flow = 1.0 / r.value;
    }
  }
  return rec;
}

}  // namespace conflict
