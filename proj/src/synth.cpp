#include "conflict/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <random>

namespace conflict {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMiddleHalf = 8.0;   // m of straight path either side of the origin
constexpr double kFilletRadius = 6.0; // m
constexpr double kLegLength = 250.0;  // m
constexpr double kBoundaryRamp = 0.3; // s

Vec2 unit(double heading) { return {std::cos(heading), std::sin(heading)}; }

double wrap_angle(double a)
{
  a = std::remainder(a, 2.0 * kPi);
  return a <= -kPi ? a + 2.0 * kPi : a;
}

Vec2 rotate(Vec2 p, double angle) { return {p.x * std::cos(angle) - p.y * std::sin(angle), p.x * std::sin(angle) + p.y * std::cos(angle)}; }

/// Line (curvature 0) or circular arc.
struct Piece
{
  double heading = 0.0;
  double curvature = 0.0;
  double length = 0.0;
  Vec2 start;
  double arc_start = 0.0;

  Vec2 displacement(double sigma) const
  {
    if (curvature == 0.0) return unit(heading) * sigma;
    const double h = heading + curvature * sigma;
    return {(std::sin(h) - std::sin(heading)) / curvature, -(std::cos(h) - std::cos(heading)) / curvature};
  }
};

/// In-leg, fillet, straight middle through the origin, fillet, out-leg. Arc length is measured from the origin.
class Path
{
public:
  Path(double h_in, double h_mid, double h_out)
  {
    auto fillet = [](double from, double to) {
      const double turn = wrap_angle(to - from);
      if (turn == 0.0) return Piece{from, 0.0, 0.0, {}, 0.0};
      return Piece{from, std::copysign(1.0 / kFilletRadius, turn), kFilletRadius * std::abs(turn), {}, 0.0};
    };
    pieces_ = {Piece{h_in, 0.0, kLegLength, {}, 0.0}, fillet(h_in, h_mid), Piece{h_mid, 0.0, 2.0 * kMiddleHalf, {}, 0.0},
               fillet(h_mid, h_out), Piece{h_out, 0.0, kLegLength, {}, 0.0}};
    std::erase_if(pieces_, [](const Piece& p) { return p.length == 0.0; });

    Vec2 origin_offset = pieces_[0].displacement(pieces_[0].length);
    double origin_arc = pieces_[0].length;
    if (pieces_[1].curvature != 0.0) {
      origin_offset = origin_offset + pieces_[1].displacement(pieces_[1].length);
      origin_arc += pieces_[1].length;
    }
    origin_offset = origin_offset + unit(h_mid) * kMiddleHalf;
    origin_arc += kMiddleHalf;

    Vec2 cursor = Vec2{} - origin_offset;
    double arc = -origin_arc;
    for (auto& p : pieces_) {
      p.start = cursor;
      p.arc_start = arc;
      cursor = cursor + p.displacement(p.length);
      arc += p.length;
    }
  }

  Vec2 point(double s) const
  {
    const Piece& p = piece(s);
    return p.start + p.displacement(s - p.arc_start);
  }

  double heading(double s) const
  {
    const Piece& p = piece(s);
    return wrap_angle(p.heading + p.curvature * std::clamp(s - p.arc_start, 0.0, p.length));
  }

private:
  const Piece& piece(double s) const
  {
    for (std::size_t i = pieces_.size(); i-- > 1;) {
      if (s >= pieces_[i].arc_start) return pieces_[i];
    }
    return pieces_.front();
  }

  std::vector<Piece> pieces_;
};

double motion_heading(Motion m, double middle)
{
  switch (m) {
    case Motion::P: return 0.0;
    case Motion::C: return middle;
    case Motion::O: return kPi;
  }
  return 0.0;
}

/// Arc-length motion s(t) = v (t - tp) + a (t - tp)^2 / 2 along a path.
struct Mover
{
  Path path;
  double v_pass = 0.0;
  double accel = 0.0;
  double t_pass = 0.0;
  Vec2 offset{};

  Vec2 position(double s) const { return path.point(s) + offset; }
  double arc(double t) const
  {
    const double d = t - t_pass;
    return v_pass * d + 0.5 * accel * d * d;
  }
  double speed(double t) const { return v_pass + accel * (t - t_pass); }
};

struct RawTrack
{
  std::string id;
  AgentKind kind;
  std::vector<TrackPoint> points;
};

RawTrack sample_mover(const std::string& id, AgentKind kind, const Mover& m, std::size_t samples)
{
  RawTrack out{id, kind, {}};
  out.points.reserve(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) * kSampleInterval;
    const double s = m.arc(t);
    const Vec2 p = m.position(s);
    const double h = m.path.heading(s);
    const Vec2 v = unit(h) * m.speed(t);
    out.points.push_back({t, p.x, p.y, v.x, v.y, h});
  }
  return out;
}

RawTrack sample_static(const std::string& id, AgentKind kind, Vec2 at, double heading, std::size_t samples)
{
  RawTrack out{id, kind, {}};
  for (std::size_t k = 0; k < samples; ++k) {
    out.points.push_back({static_cast<double>(k) * kSampleInterval, at.x, at.y, 0.0, 0.0, heading});
  }
  return out;
}

/// Shrinks the first and last position steps as if the ends had been over-smoothed.
void corrupt_boundaries(RawTrack& track, const Mover& m)
{
  auto& pts = track.points;
  const std::size_t n = pts.size();
  const auto ramp = static_cast<std::size_t>(std::lround(kBoundaryRamp / kSampleInterval));
  if (n < 2 * ramp + 2) return;
  auto factor = [&](std::size_t step_from_edge) {
    const double mid = (static_cast<double>(step_from_edge) + 0.5) * kSampleInterval;
    return 0.5 + 0.5 * std::min(mid / kBoundaryRamp, 1.0);
  };
  auto place = [&](std::size_t i, double s) {
    const Vec2 p = m.position(s);
    pts[i].x = p.x;
    pts[i].y = p.y;
  };
  double s = m.arc(pts[ramp].t);
  for (std::size_t j = ramp; j-- > 0;) {
    s -= factor(j) * (m.arc(pts[j + 1].t) - m.arc(pts[j].t));
    place(j, s);
  }
  s = m.arc(pts[n - 1 - ramp].t);
  for (std::size_t j = ramp; j-- > 0;) {
    const std::size_t i = n - 1 - j;
    s += factor(j) * (m.arc(pts[i].t) - m.arc(pts[i - 1].t));
    place(i, s);
  }
}

void add_speed_noise(RawTrack& track, double sigma, std::mt19937_64& rng)
{
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& p : track.points) {
    const double v = p.speed() + noise(rng);
    p.vx = v * std::cos(p.heading);
    p.vy = v * std::sin(p.heading);
  }
}

void add_zero_fill(RawTrack& track, std::mt19937_64& rng)
{
  const std::size_t n = track.points.size();
  if (n < 50) return;
  const std::size_t len = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
  const std::size_t start = std::uniform_int_distribution<std::size_t>(20, n - 20 - len)(rng);
  for (std::size_t i = start; i < start + len; ++i) track.points[i].vx = track.points[i].vy = 0.0;
}

bool is_vru(AgentKind k) { return k == AgentKind::pedestrian || k == AgentKind::cyclist; }

}  // namespace

void SynthSpec::validate() const
{
  if (!(pet_target >= 0.0)) throw InvalidInput("pet_target must be non-negative");
  if (samples < 3 || static_cast<double>(samples - 1) * kSampleInterval > kMaxScenarioDuration) {
    throw InvalidInput("synthetic recording must hold 3 to 111 samples");
  }
  if (kinds[0] == AgentKind::AV && kinds[1] == AgentKind::AV) throw InvalidInput("at most one AV per scenario");
  const double t_end = static_cast<double>(samples - 1) * kSampleInterval;
  const std::array<double, 2> passes{t_first, t_first + pet_target};
  for (std::size_t i = 0; i < 2; ++i) {
    if (!(speeds[i] > 0.0)) throw InvalidInput("synthetic speeds must be positive");
    const double lo = std::min(speeds[i] - accelerations[i] * passes[i], speeds[i] + accelerations[i] * (t_end - passes[i]));
    if (lo < 0.5) throw InvalidInput(fmt::format("agent {} would slow below 0.5 m/s", i + 1));
  }
}

SynthScenario synth(const SynthSpec& spec, std::uint64_t seed)
{
  spec.validate();
  std::mt19937_64 rng(seed);

  // Side L: the second passer approaches from the first passer's left, i.e. drives south.
  const double middle = spec.regime.side == Side::left_to_right ? -kPi / 2.0 : kPi / 2.0;
  const bool vru_pair = is_vru(spec.kinds[0]) || is_vru(spec.kinds[1]);
  const Mover first{Path(0.0, 0.0, 0.0), spec.speeds[0], spec.accelerations[0], spec.t_first};
  const Mover second{is_vru(spec.kinds[1]) ? Path(middle, middle, middle)
                                           : Path(motion_heading(spec.regime.before, middle), middle,
                                                  motion_heading(spec.regime.after, middle)),
                     spec.speeds[1], spec.accelerations[1], spec.t_first + spec.pet_target};

  auto agent_id = [&](std::size_t i) { return spec.kinds[i] == AgentKind::AV ? std::string("AV") : fmt::format("agent_{}", i + 1); };
  std::vector<std::optional<Mover>> movers{first, second};
  for (std::size_t k = 0; k < spec.background; ++k) {
    const double offset = 10.0 * static_cast<double>(k);
    switch (k % 3) {
      case 0: movers.push_back(Mover{Path(0.0, 0.0, 0.0), 8.0, 0.0, 0.0, {0.0, 150.0 + offset}}); break;
      case 1: movers.push_back(Mover{Path(kPi / 2.0, kPi / 2.0, kPi / 2.0), 1.3, 0.0, 0.0, {150.0 + offset, 0.0}}); break;
      default: movers.push_back(std::nullopt); break;
    }
  }

  std::vector<RawTrack> raw;
  for (std::size_t i = 0; i < movers.size(); ++i) {
    if (i < 2) {
      raw.push_back(sample_mover(agent_id(i), spec.kinds[i], *movers[i], spec.samples));
      continue;
    }
    const std::size_t k = i - 2;
    const auto id = fmt::format("bg_{:02}", k);
    if (movers[i]) {
      raw.push_back(sample_mover(id, k % 3 == 0 ? AgentKind::vehicle : AgentKind::pedestrian, *movers[i], spec.samples));
    } else {
      raw.push_back(sample_static(id, AgentKind::vehicle, {-150.0 - 10.0 * static_cast<double>(k), -150.0}, 0.0, spec.samples));
    }
  }

  std::vector<RawTrack> clean = raw;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!movers[i]) continue;
    auto& track = raw[i];
    const bool is_av = track.kind == AgentKind::AV;
    if (spec.noise.boundary_corruption) corrupt_boundaries(track, *movers[i]);
    const bool noise_here = spec.noise.scope == NoiseScope::all || is_av;
    const bool zero_here = spec.noise.scope == NoiseScope::all || !is_av;
    if (spec.noise.speed_noise_sigma > 0.0 && noise_here) add_speed_noise(track, spec.noise.speed_noise_sigma, rng);
    if (spec.noise.zero_fill_probability > 0.0 && zero_here &&
        std::bernoulli_distribution(spec.noise.zero_fill_probability)(rng)) {
      add_zero_fill(track, rng);
    }
  }

  double angle = 0.0;
  Vec2 shift{};
  if (spec.random_pose) {
    angle = std::uniform_real_distribution<double>(-kPi, kPi)(rng);
    shift = {std::uniform_real_distribution<double>(-500.0, 500.0)(rng),
             std::uniform_real_distribution<double>(-500.0, 500.0)(rng)};
  }
  auto place = [&](std::vector<RawTrack>& set) {
    std::vector<Track> out;
    for (auto& rt : set) {
      for (auto& p : rt.points) {
        const Vec2 q = rotate(p.position(), angle) + shift;
        const Vec2 v = rotate(p.velocity(), angle);
        p = {p.t, q.x, q.y, v.x, v.y, wrap_angle(p.heading + angle)};
      }
      out.emplace_back(rt.id, rt.kind, std::move(rt.points));
    }
    return out;
  };

  std::vector<LaneSegment> lanes;
  if (spec.with_map) {
    lanes = four_leg_intersection();
    for (auto& seg : lanes) {
      std::vector<Vec2> vs;
      for (const auto& v : seg.centerline.vertices()) vs.push_back(rotate(v, angle) + shift);
      seg.centerline = Polyline(std::move(vs));
    }
  }

  ConflictTruth truth{agent_id(0), agent_id(1), shift, spec.t_first, spec.t_first + spec.pet_target, std::nullopt};
  if (!vru_pair) truth.regime = spec.regime;
  return {Scenario(spec.scenario_id, place(raw), std::move(lanes)), place(clean), truth};
}

std::vector<SynthScenario> synth_corpus(const CorpusSettings& settings, std::uint64_t seed)
{
  std::vector<SynthScenario> out;
  out.reserve(settings.scenarios);
  for (std::size_t i = 0; i < settings.scenarios; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    auto uniform = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };

    SynthSpec spec;
    spec.scenario_id = fmt::format("synth_{:04}", i);
    spec.regime = RegimeLabel::from_index(static_cast<int>(i % kRegimeCount));
    spec.noise = settings.noise;
    spec.background = settings.background;
    spec.with_map = settings.with_map;
    spec.pet_target = uniform(0.8, 2.8);
    spec.t_first = uniform(4.0, 6.0);
    for (std::size_t a = 0; a < 2; ++a) {
      spec.speeds[a] = uniform(6.0, 11.0);
      spec.accelerations[a] = uniform(-0.4, 0.4);
    }
    if (std::bernoulli_distribution(settings.av_share)(rng)) {
      spec.kinds[std::uniform_int_distribution<std::size_t>(0, 1)(rng)] = AgentKind::AV;
    }
    if (settings.vru_every > 0 && i % settings.vru_every == settings.vru_every - 1) {
      const std::size_t slot = spec.kinds[0] == AgentKind::AV ? 1 : 0;
      spec.kinds[slot] = i % 2 == 0 ? AgentKind::pedestrian : AgentKind::cyclist;
      spec.speeds[slot] = spec.kinds[slot] == AgentKind::pedestrian ? uniform(1.2, 1.8) : uniform(3.5, 5.5);
      spec.accelerations[slot] = 0.0;
    }
    out.push_back(synth(spec, rng()));
  }
  return out;
}

std::vector<LaneSegment> four_leg_intersection(double leg_length)
{
  static const std::array<std::string, 4> names{"W", "S", "E", "N"};
  auto arc = [](Vec2 centre, double radius, double from, double to) {
    std::vector<Vec2> pts;
    constexpr int kSteps = 32;
    for (int k = 0; k <= kSteps; ++k) {
      const double phi = from + (to - from) * k / kSteps;
      pts.push_back(centre + Vec2{std::cos(phi), std::sin(phi)} * radius);
    }
    return pts;
  };

  std::vector<LaneSegment> out;
  for (std::size_t k = 0; k < 4; ++k) {
    // Geometry is written for the west leg (inbound traffic heading east) and rotated.
    const double angle = static_cast<double>(k) * kPi / 2.0;
    auto seg = [&](std::string id, std::vector<Vec2> pts, std::set<std::string> next) {
      for (auto& p : pts) p = rotate(p, angle);
      out.push_back({std::move(id), Polyline(std::move(pts)), std::move(next), {}});
    };
    const std::string& me = names[k];
    const std::string& right = names[(k + 1) % 4];
    const std::string& ahead = names[(k + 2) % 4];
    const std::string& left = names[(k + 3) % 4];
    const double mid = -8.0 - 0.5 * leg_length;
    seg(me + "_in_a", {{-8.0 - leg_length, -2.0}, {mid, -2.0}}, {me + "_in_b"});
    seg(me + "_in_b", {{mid, -2.0}, {-8.0, -2.0}}, {me + ">" + ahead, me + ">" + right, me + ">" + left});
    seg(me + ">" + ahead, {{-8.0, -2.0}, {8.0, -2.0}}, {ahead + "_out"});
    seg(me + ">" + right, arc({-8.0, -8.0}, 6.0, kPi / 2.0, 0.0), {right + "_out"});
    seg(me + ">" + left, arc({-8.0, 8.0}, 10.0, -kPi / 2.0, 0.0), {left + "_out"});
    seg(me + "_out", {{-8.0, 2.0}, {-8.0 - leg_length, 2.0}}, {});
  }
  return out;
}

}  // namespace conflict
