#include "conflict/enhance.hpp"

#include "conflict/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace conflict {

std::string_view to_string(EnhanceStatus s)
{
  return s == EnhanceStatus::enhanced ? "enhanced" : "preserved_raw";
}

std::string_view to_string(SkipReason r)
{
  switch (r) {
    case SkipReason::too_short_duration: return "too_short_duration";
    case SkipReason::too_short_length: return "too_short_length";
    case SkipReason::too_inconsistent: return "too_inconsistent";
    case SkipReason::has_gaps: return "has_gaps";
    case SkipReason::degenerate_path: return "degenerate_path";
  }
  return "?";
}

std::vector<bool> detect_speed_outliers(std::span<const double> speed, const EnhanceConfig& cfg, double dt)
{
  const std::size_t n = speed.size();
  if (n < 3) throw InsufficientData("outlier detection needs at least 3 samples");

  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) * dt;
  const auto accel = gradient(speed, t);
  const bool parked = std::all_of(speed.begin(), speed.end(), [&](double v) { return v < cfg.static_speed; });
  const auto reach = static_cast<std::ptrdiff_t>(std::llround(cfg.zero_window / dt));

  std::vector<bool> mask(n, false);
  for (std::size_t i = 0; i < n; ++i) mask[i] = std::abs(accel[i]) > cfg.outlier_accel;
  // The central difference straddles an isolated spike, so only its neighbours trip the threshold.
  const auto jumps = mask;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (jumps[i - 1] && jumps[i + 1]) mask[i] = true;
  }
  if (!parked) {
    for (std::size_t i = 0; i < n; ++i) {
      if (speed[i] != 0.0) continue;
      const auto c = static_cast<std::ptrdiff_t>(i);
      const auto lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, c - reach));
      const auto hi = static_cast<std::size_t>(std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1, c + reach));
      for (std::size_t k = lo; k <= hi; ++k) mask[k] = true;
    }
  }
  return mask;
}

RepairResult repair_outliers(std::span<const double> values, const std::vector<bool>& mask, const EnhanceConfig& cfg,
                             double dt)
{
  const std::size_t n = values.size();
  if (mask.size() != n) throw std::invalid_argument("repair_outliers: mask length differs from signal length");
  RepairResult result;
  result.values.assign(values.begin(), values.end());

  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) valid.push_back(i);
  }

  std::size_t i = 0;
  while (i < n) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    SampleRun run{i, i};
    while (run.end < n && mask[run.end]) ++run.end;
    i = run.end;

    // Nearest valid observations in time; ties go to the earlier sample.
    auto gap = [&](std::size_t k) { return k < run.begin ? run.begin - k : k - (run.end - 1); };
    std::vector<std::size_t> support = valid;
    std::stable_sort(support.begin(), support.end(), [&](std::size_t a, std::size_t b) { return gap(a) < gap(b); });
    if (support.size() > cfg.fit_samples) support.resize(cfg.fit_samples);
    if (support.size() < 4) {
      result.unrepaired.push_back(run);
      continue;
    }
    const bool before = std::any_of(support.begin(), support.end(), [&](std::size_t k) { return k < run.begin; });
    const bool after = std::any_of(support.begin(), support.end(), [&](std::size_t k) { return k >= run.end; });
    if (!before || !after) result.one_sided.push_back(run);

    // Centre time on the run for conditioning.
    const double t0 = 0.5 * static_cast<double>(run.begin + run.end - 1) * dt;
    Eigen::MatrixXd design(static_cast<Eigen::Index>(support.size()), 4);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(support.size()));
    for (std::size_t r = 0; r < support.size(); ++r) {
      const double tau = static_cast<double>(support[r]) * dt - t0;
      const auto row = static_cast<Eigen::Index>(r);
      design(row, 0) = 1.0;
      design(row, 1) = tau;
      design(row, 2) = tau * tau;
      design(row, 3) = tau * tau * tau;
      rhs(row) = values[support[r]];
    }
    const Eigen::Vector4d coef = design.colPivHouseholderQr().solve(rhs);
    for (std::size_t k = run.begin; k < run.end; ++k) {
      const double tau = static_cast<double>(k) * dt - t0;
      result.values[k] = coef(0) + tau * (coef(1) + tau * (coef(2) + tau * coef(3)));
    }
  }
  return result;
}

double integrate_samples(std::span<const double> f, std::size_t from, std::size_t to, double dt)
{
  if (from == to) return 0.0;
  if (from > to) return -integrate_samples(f, to, from, dt);
  const std::size_t n = f.size();
  if (to >= n) throw std::out_of_range("integrate_samples: index past the end");
  const std::size_t m = to - from;

  if (m == 1) {
    if (n < 4) return 0.5 * dt * (f[from] + f[to]);
    // Cubic through four neighbouring samples, integrated over the one interval.
    if (from == 0) return dt / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    if (to == n - 1) return dt / 24.0 * (f[to - 3] - 5.0 * f[to - 2] + 19.0 * f[from] + 9.0 * f[to]);
    return dt / 24.0 * (-f[from - 1] + 13.0 * f[from] + 13.0 * f[to] - f[to + 1]);
  }

  double total = 0.0;
  std::size_t simpson_end = to;
  if (m % 2 == 1) {
    simpson_end = to - 3;
    total += 3.0 * dt / 8.0 * (f[to - 3] + 3.0 * f[to - 2] + 3.0 * f[to - 1] + f[to]);
  }
  for (std::size_t k = from; k + 2 <= simpson_end; k += 2) {
    total += dt / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
  }
  return total;
}

std::vector<Vec2> reconstruct_av_boundaries(const Track& track, std::span<const double> vx, std::span<const double> vy,
                                            const EnhanceConfig& cfg)
{
  const std::size_t n = track.size();
  if (vx.size() != n || vy.size() != n) throw std::invalid_argument("reconstruct_av_boundaries: misaligned speed");
  const auto w = static_cast<std::size_t>(std::llround(cfg.boundary_window / kSampleInterval));
  if (n < 2 * w + 1) {
    throw InsufficientData(fmt::format("track {}: {} samples cannot anchor both {:.1f} s boundaries", track.agent_id(),
                                       n, cfg.boundary_window));
  }
  auto positions = track.positions();
  const std::size_t head_anchor = w;
  const std::size_t tail_anchor = n - 1 - w;
  const Vec2 head = positions[head_anchor];
  const Vec2 tail = positions[tail_anchor];
  for (std::size_t k = 0; k < head_anchor; ++k) {
    positions[k] = {head.x - integrate_samples(vx, k, head_anchor, kSampleInterval),
                    head.y - integrate_samples(vy, k, head_anchor, kSampleInterval)};
  }
  for (std::size_t k = tail_anchor + 1; k < n; ++k) {
    positions[k] = {tail.x + integrate_samples(vx, tail_anchor, k, kSampleInterval),
                    tail.y + integrate_samples(vy, tail_anchor, k, kSampleInterval)};
  }
  return positions;
}

std::vector<Vec2> resegment_positions(const Track& track, std::span<const double> corrected_speed)
{
  if (corrected_speed.size() != track.size()) throw std::invalid_argument("resegment_positions: misaligned speed");
  const auto raw = track.positions();
  const Polyline line = Polyline::from_points(raw);

  std::vector<Vec2> out(raw.size());
  double s = 0.0;
  out[0] = line.point_at(0.0);
  for (std::size_t k = 1; k < raw.size(); ++k) {
    s += 0.5 * (corrected_speed[k - 1] + corrected_speed[k]) * kSampleInterval;
    out[k] = line.point_at(s);
  }
  return out;
}

std::optional<SkipReason> preserve_raw_gate(const Track& track, bool conflicting, const EnhanceConfig& cfg,
                                            std::span<const double> speed)
{
  if (track.size() < 2 || track.duration() < cfg.min_duration - kGridTolerance) return SkipReason::too_short_duration;
  if (!conflicting && path_length(track.positions()) < cfg.min_length) return SkipReason::too_short_length;
  const double inconsistency = speed.empty() ? length_inconsistency(track) : length_inconsistency(track, speed);
  if (inconsistency > cfg.max_inconsistency) return SkipReason::too_inconsistent;
  return std::nullopt;
}

SmoothResult smooth_av_speed(std::span<const double> speed, const EnhanceConfig& cfg)
{
  if (speed.size() < 16) return {{speed.begin(), speed.end()}, false};
  return {wavelet::denoise(speed, cfg.smoothing), true};
}

HeadingResult derive_heading(std::span<const Vec2> positions, std::span<const double> raw_heading, double min_step)
{
  const std::size_t n = positions.size();
  if (n < 2) throw InsufficientData("heading needs at least 2 positions");
  std::vector<std::optional<double>> local(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 chord = positions[std::min(i + 1, n - 1)] - positions[i == 0 ? 0 : i - 1];
    if (chord.norm() >= min_step) local[i] = std::atan2(chord.y, chord.x);
  }

  HeadingResult out;
  out.heading.resize(n);
  auto first = std::find_if(local.begin(), local.end(), [](const auto& h) { return h.has_value(); });
  if (first == local.end()) {
    out.from_raw = true;
    for (std::size_t i = 0; i < n; ++i) out.heading[i] = i < raw_heading.size() ? raw_heading[i] : 0.0;
    return out;
  }
  double held = **first;
  for (std::size_t i = 0; i < n; ++i) {
    if (local[i]) held = *local[i];
    out.heading[i] = held;
  }
  return out;
}

Track EnhancedTrack::to_track() const
{
  if (status == EnhanceStatus::preserved_raw) return base;
  std::vector<TrackPoint> pts;
  pts.reserve(positions.size());
  const auto& raw = base.points();
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double v = profile.speed[i];
    pts.push_back({raw[i].t, positions[i].x, positions[i].y, v * std::cos(heading[i]), v * std::sin(heading[i]),
                   heading[i]});
  }
  return Track(base.agent_id(), base.kind(), std::move(pts));
}

double EnhancedTrack::consistency_error() const
{
  if (status == EnhanceStatus::preserved_raw) return speed_consistency_error(base);
  const auto vp = position_based_speed(positions);
  double sum = 0.0;
  for (std::size_t i = 0; i < vp.size(); ++i) sum += std::abs(vp[i] - profile.speed[i]);
  return sum / static_cast<double>(vp.size());
}

namespace {

EnhancedTrack preserved(const Track& track, SkipReason reason)
{
  EnhancedTrack out{track, track.speeds(), track.positions(), {}, {}, EnhanceStatus::preserved_raw, reason, {}, false,
                    false};
  for (const auto& p : track.points()) out.heading.push_back(p.heading);
  if (track.size() >= 3) out.profile = kinematic_profile(out.corrected_speed, track.times());
  return out;
}

}  // namespace

EnhancedTrack enhance_track(const Track& track, bool conflicting, const EnhanceConfig& cfg)
{
  if (auto reason = preserve_raw_gate(track, conflicting, cfg)) {
    // Zero-padding alone should not disqualify a track, so inconsistency is judged after repair.
    if (*reason != SkipReason::too_inconsistent || track.has_gaps()) return preserved(track, *reason);
  }
  if (track.has_gaps()) return preserved(track, SkipReason::has_gaps);

  const auto& pts = track.points();
  const std::size_t n = pts.size();
  std::vector<double> vx(n), vy(n), speed(n);
  for (std::size_t i = 0; i < n; ++i) {
    vx[i] = pts[i].vx;
    vy[i] = pts[i].vy;
    speed[i] = pts[i].speed();
  }

  // Components are repaired jointly so the velocity direction survives.
  const auto mask = detect_speed_outliers(speed, cfg);
  const auto rx = repair_outliers(vx, mask, cfg);
  const auto ry = repair_outliers(vy, mask, cfg);

  EnhancedTrack out{track, std::vector<double>(n), {}, {}, {}, EnhanceStatus::enhanced, std::nullopt, rx.unrepaired,
                    false, false};
  for (std::size_t i = 0; i < n; ++i) out.corrected_speed[i] = std::hypot(rx.values[i], ry.values[i]);
  if (auto reason = preserve_raw_gate(track, conflicting, cfg, out.corrected_speed)) return preserved(track, *reason);

  std::vector<double> final_speed;
  try {
    if (track.kind() == AgentKind::AV) {
      out.positions = reconstruct_av_boundaries(track, rx.values, ry.values, cfg);
      auto smoothed = smooth_av_speed(out.corrected_speed, cfg);
      out.smoothing_skipped = !smoothed.applied;
      final_speed = std::move(smoothed.speed);
    } else {
      out.positions = resegment_positions(track, out.corrected_speed);
      final_speed = out.corrected_speed;
    }
  } catch (const DegenerateGeometry&) {
    return preserved(track, SkipReason::degenerate_path);
  } catch (const InsufficientData&) {
    return preserved(track, SkipReason::too_short_duration);
  }

  out.profile = kinematic_profile(final_speed, track.times());
  std::vector<double> raw_heading(n);
  for (std::size_t i = 0; i < n; ++i) raw_heading[i] = pts[i].heading;
  auto heading = derive_heading(out.positions, raw_heading, cfg.heading_min_step);
  out.heading = std::move(heading.heading);
  out.heading_from_raw = heading.from_raw;
  return out;
}

}  // namespace conflict
