#include "conflict/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace conflict {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::string_view, 9> kTrackColumns{"scenario_id", "track_id", "agent_kind", "t", "x",
                                                         "y",           "vx",       "vy",         "heading"};
constexpr std::array<std::string_view, 5> kMapColumns{"segment_id", "vertex_index", "x", "y", "successors"};
constexpr std::size_t kMaxReported = 20;

std::vector<std::string> split(const std::string& line, char sep)
{
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::optional<double> parse_double(std::string_view s)
{
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Column positions keyed by the expected names; reports unknown and missing columns.
template <std::size_t N>
std::optional<std::array<std::size_t, N>> header_index(const std::string& line, const std::array<std::string_view, N>& expected,
                                                       const std::string& source, std::vector<Diagnostic>& diag)
{
  auto names = split(line, ',');
  if (!names.empty() && !names.back().empty() && names.back().back() == '\r') names.back().pop_back();
  std::array<std::size_t, N> index{};
  std::vector<bool> found(N, false);
  bool ok = true;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto it = std::find(expected.begin(), expected.end(), names[i]);
    if (it == expected.end()) {
      diag.push_back({source, 0, fmt::format("unknown column '{}'", names[i])});
      ok = false;
      continue;
    }
    const auto k = static_cast<std::size_t>(it - expected.begin());
    if (found[k]) {
      diag.push_back({source, 0, fmt::format("duplicate column '{}'", names[i])});
      ok = false;
    }
    found[k] = true;
    index[k] = i;
  }
  for (std::size_t k = 0; k < N; ++k) {
    if (!found[k]) {
      diag.push_back({source, 0, fmt::format("missing column '{}'", expected[k])});
      ok = false;
    }
  }
  if (!ok) return std::nullopt;
  return index;
}

std::vector<LaneSegment> parse_map(std::istream& in, const std::string& source, std::vector<Diagnostic>& diag)
{
  std::string line;
  if (!std::getline(in, line)) {
    diag.push_back({source, 0, "empty map file"});
    return {};
  }
  const auto index = header_index(line, kMapColumns, source, diag);
  if (!index) return {};

  struct Pending
  {
    std::map<long, Vec2> vertices;
    std::set<std::string> successors;
  };
  std::map<std::string, Pending> segments;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != kMapColumns.size()) {
      diag.push_back({source, row, fmt::format("expected {} fields, found {}", kMapColumns.size(), f.size())});
      continue;
    }
    const auto& id = f[(*index)[0]];
    const auto vi = parse_double(f[(*index)[1]]);
    const auto x = parse_double(f[(*index)[2]]);
    const auto y = parse_double(f[(*index)[3]]);
    if (id.empty() || !vi || !x || !y || *vi < 0 || *vi != std::floor(*vi)) {
      diag.push_back({source, row, "malformed segment id, vertex index or coordinate"});
      continue;
    }
    auto& seg = segments[id];
    if (!seg.vertices.emplace(static_cast<long>(*vi), Vec2{*x, *y}).second) {
      diag.push_back({source, row, fmt::format("segment {} repeats vertex {}", id, *vi)});
    }
    for (const auto& s : split(f[(*index)[4]], ';')) {
      if (!s.empty()) seg.successors.insert(s);
    }
  }

  std::vector<LaneSegment> out;
  for (auto& [id, seg] : segments) {
    std::vector<Vec2> pts;
    for (const auto& [_, v] : seg.vertices) pts.push_back(v);
    try {
      out.push_back({id, Polyline(std::move(pts)), std::move(seg.successors), {}});
    } catch (const std::exception& e) {
      diag.push_back({source, 0, fmt::format("segment {}: {}", id, e.what())});
    }
  }
  return out;
}

}  // namespace

IngestError::IngestError(std::vector<Diagnostic> diagnostics)
  : InvalidInput([&] {
      std::string msg = fmt::format("{} input problem(s)", diagnostics.size());
      for (std::size_t i = 0; i < diagnostics.size() && i < kMaxReported; ++i) {
        const auto& d = diagnostics[i];
        msg += d.row > 0 ? fmt::format("\n  {} row {}: {}", d.source, d.row, d.message)
                         : fmt::format("\n  {}: {}", d.source, d.message);
      }
      return msg;
    }()),
    diagnostics_(std::move(diagnostics))
{
}

Scenario parse_scenario(std::istream& tracks, const std::string& source, std::istream* map, const std::string& map_source)
{
  std::vector<Diagnostic> diag;
  std::string line;
  if (!std::getline(tracks, line)) throw IngestError({{source, 0, "empty file"}});
  const auto index = header_index(line, kTrackColumns, source, diag);
  if (!index) throw IngestError(std::move(diag));

  struct Pending
  {
    AgentKind kind;
    std::map<std::int64_t, TrackPoint> points;
  };
  std::optional<std::string> scenario_id;
  std::map<std::string, Pending> by_track;
  std::size_t row = 0;
  while (std::getline(tracks, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != kTrackColumns.size()) {
      diag.push_back({source, row, fmt::format("expected {} fields, found {}", kTrackColumns.size(), f.size())});
      continue;
    }
    auto field = [&](std::size_t k) -> const std::string& { return f[(*index)[k]]; };
    if (!scenario_id) scenario_id = field(0);
    if (field(0) != *scenario_id) {
      diag.push_back({source, row, fmt::format("scenario id '{}' differs from '{}'", field(0), *scenario_id)});
      continue;
    }
    const auto& track_id = field(1);
    if (track_id.empty()) {
      diag.push_back({source, row, "empty track id"});
      continue;
    }
    const auto kind = parse_agent_kind(field(2));
    if (!kind) {
      diag.push_back({source, row, fmt::format("unknown agent kind '{}'", field(2))});
      continue;
    }
    std::array<double, 6> v{};
    bool numeric = true;
    for (std::size_t k = 0; k < 6; ++k) {
      const auto parsed = parse_double(field(3 + k));
      if (!parsed || !std::isfinite(*parsed)) {
        diag.push_back({source, row, fmt::format("column {} is not a finite number: '{}'", kTrackColumns[3 + k], field(3 + k))});
        numeric = false;
        break;
      }
      v[k] = *parsed;
    }
    if (!numeric) continue;
    const auto tick = grid_tick(v[0]);
    if (!tick || v[0] < 0.0) {
      diag.push_back({source, row, fmt::format("scenario {} track {}: t = {} is not on the 0.1 s grid", *scenario_id,
                                               track_id, field(3))});
      continue;
    }
    auto [it, inserted] = by_track.try_emplace(track_id, Pending{*kind, {}});
    if (!inserted && it->second.kind != *kind) {
      diag.push_back({source, row, fmt::format("track {} changes agent kind", track_id)});
      continue;
    }
    if (!it->second.points.emplace(*tick, TrackPoint{v[0], v[1], v[2], v[3], v[4], v[5]}).second) {
      diag.push_back({source, row, fmt::format("duplicate timestamp: scenario {} track {} t = {}", *scenario_id,
                                               track_id, field(3))});
    }
  }

  std::vector<LaneSegment> lanes;
  if (map != nullptr) lanes = parse_map(*map, map_source, diag);
  if (!scenario_id) diag.push_back({source, 0, "no data rows"});
  if (!diag.empty()) throw IngestError(std::move(diag));

  std::vector<Track> built;
  for (auto& [id, pending] : by_track) {
    std::vector<TrackPoint> pts;
    pts.reserve(pending.points.size());
    for (auto& [_, p] : pending.points) pts.push_back(p);
    try {
      built.emplace_back(id, pending.kind, std::move(pts));
    } catch (const std::exception& e) {
      diag.push_back({source, 0, fmt::format("track {}: {}", id, e.what())});
    }
  }
  if (!diag.empty()) throw IngestError(std::move(diag));
  try {
    return Scenario(*scenario_id, std::move(built), std::move(lanes));
  } catch (const std::exception& e) {
    throw IngestError({{source, 0, fmt::format("scenario {}: {}", *scenario_id, e.what())}});
  }
}

std::vector<Scenario> CsvScenarioReader::read(const fs::path& path) const
{
  std::vector<fs::path> files;
  auto is_track_file = [](const fs::path& p) {
    const auto name = p.filename().string();
    return p.extension() == ".csv" && !name.ends_with(".map.csv");
  };
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && is_track_file(entry.path())) files.push_back(entry.path());
    }
  } else if (fs::is_regular_file(path)) {
    files.push_back(path);
  } else {
    throw IngestError({{path.string(), 0, "no such file or directory"}});
  }
  std::sort(files.begin(), files.end());

  std::vector<Scenario> out;
  std::vector<Diagnostic> diag;
  for (const auto& file : files) {
    std::ifstream in(file);
    auto map_path = file;
    map_path.replace_extension(".map.csv");
    std::ifstream map_in;
    if (fs::exists(map_path)) map_in.open(map_path);
    try {
      out.push_back(parse_scenario(in, file.filename().string(), map_in.is_open() ? &map_in : nullptr,
                                   map_path.filename().string()));
    } catch (const IngestError& e) {
      diag.insert(diag.end(), e.diagnostics().begin(), e.diagnostics().end());
    }
  }
  std::set<std::string> ids;
  for (const auto& s : out) {
    if (!ids.insert(s.scenario_id()).second) diag.push_back({path.string(), 0, fmt::format("scenario {} appears twice", s.scenario_id())});
  }
  if (!diag.empty()) throw IngestError(std::move(diag));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.scenario_id() < b.scenario_id(); });
  return out;
}

std::vector<Scenario> ingest(const fs::path& path, const ScenarioReader& reader) { return reader.read(path); }

std::string format_fixed(double value)
{
  auto s = fmt::format("{:.6f}", value);
  if (s == "-0.000000") s.erase(0, 1);
  return s;
}

std::string scenario_csv(const Scenario& scenario)
{
  std::string out = "scenario_id,track_id,agent_kind,t,x,y,vx,vy,heading\n";
  std::vector<const Track*> tracks;
  for (const auto& t : scenario.tracks()) tracks.push_back(&t);
  std::sort(tracks.begin(), tracks.end(), [](auto* a, auto* b) { return a->agent_id() < b->agent_id(); });
  for (const auto* track : tracks) {
    for (const auto& p : track->points()) {
      out += fmt::format("{},{},{},{},{},{},{},{},{}\n", scenario.scenario_id(), track->agent_id(),
                         to_string(track->kind()), format_fixed(p.t), format_fixed(p.x), format_fixed(p.y),
                         format_fixed(p.vx), format_fixed(p.vy), format_fixed(p.heading));
    }
  }
  return out;
}

std::string map_csv(const Scenario& scenario)
{
  if (scenario.lane_segments().empty()) return {};
  std::string out = "segment_id,vertex_index,x,y,successors\n";
  auto segments = scenario.lane_segments();
  std::sort(segments.begin(), segments.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& seg : segments) {
    std::string next;
    for (const auto& s : seg.successors) next += (next.empty() ? "" : ";") + s;
    const auto& vs = seg.centerline.vertices();
    for (std::size_t i = 0; i < vs.size(); ++i) {
      out += fmt::format("{},{},{},{},{}\n", seg.id, i, format_fixed(vs[i].x), format_fixed(vs[i].y), next);
    }
  }
  return out;
}

std::string lane_graph_csv(const Scenario& scenario)
{
  const auto& graph = scenario.lane_graph();
  std::string out = "record,lane_id,index,x,y\n";
  for (const auto& lane : graph.lanes) {
    for (std::size_t k = 0; k < lane.breakpoints.size(); ++k) {
      out += fmt::format("breakpoint,{},{},{},{}\n", lane.id, k, format_fixed(lane.breakpoints[k].x),
                         format_fixed(lane.breakpoints[k].y));
    }
  }
  for (std::size_t i = 0; i < graph.adjacency.size(); ++i) {
    for (std::size_t j = 0; j < graph.adjacency[i].size(); ++j) {
      if (graph.adjacency[i][j]) out += fmt::format("adjacent,{},{},,\n", graph.lanes[i].id, graph.lanes[j].id);
    }
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content)
{
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
    out << content;
    if (!out.flush()) throw std::runtime_error(fmt::format("write failed for {}", tmp.string()));
  }
  fs::rename(tmp, path);
}

void write_scenario(const Scenario& scenario, const fs::path& dir)
{
  fs::create_directories(dir);
  write_file(dir / (scenario.scenario_id() + ".csv"), scenario_csv(scenario));
  if (!scenario.lane_segments().empty()) write_file(dir / (scenario.scenario_id() + ".map.csv"), map_csv(scenario));
}

}  // namespace conflict
