#include "conflict/config.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace conflict {

namespace {

using Setter = std::function<void(PipelineConfig&, std::string_view)>;

std::string_view trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view text)
{
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw ConfigError(fmt::format("'{}' is not a valid number", text));
  return value;
}

bool parse_bool(std::string_view text)
{
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(fmt::format("'{}' is not a boolean", text));
}

template <typename T>
Setter number(T PipelineConfig::*section, double T::*field)
{
  return [=](PipelineConfig& c, std::string_view v) { c.*section.*field = parse_number<double>(v); };
}

const std::map<std::string, Setter, std::less<>>& setters()
{
  static const std::map<std::string, Setter, std::less<>> table = [] {
    using P = PipelineConfig;
    std::map<std::string, Setter, std::less<>> t;
    t["selection.buffer_vehicle"] = number(&P::selection, &SelectionConfig::buffer_vehicle);
    t["selection.buffer_vru"] = number(&P::selection, &SelectionConfig::buffer_vru);
    t["selection.pet_max"] = number(&P::selection, &SelectionConfig::pet_max);
    t["selection.min_sep_max"] = number(&P::selection, &SelectionConfig::min_sep_max);
    t["selection.travel_min"] = number(&P::selection, &SelectionConfig::travel_min);
    t["selection.pet_soft"] = number(&P::selection, &SelectionConfig::pet_soft);
    t["selection.speed_var_min"] = number(&P::selection, &SelectionConfig::speed_var_min);
    t["selection.surround_radius"] = number(&P::selection, &SelectionConfig::surround_radius);

    t["enhance.outlier_accel"] = number(&P::enhance, &EnhanceConfig::outlier_accel);
    t["enhance.zero_window"] = number(&P::enhance, &EnhanceConfig::zero_window);
    t["enhance.fit_samples"] = [](P& c, std::string_view v) { c.enhance.fit_samples = parse_number<std::size_t>(v); };
    t["enhance.min_duration"] = number(&P::enhance, &EnhanceConfig::min_duration);
    t["enhance.min_length"] = number(&P::enhance, &EnhanceConfig::min_length);
    t["enhance.max_inconsistency"] = number(&P::enhance, &EnhanceConfig::max_inconsistency);
    t["enhance.boundary_window"] = number(&P::enhance, &EnhanceConfig::boundary_window);
    t["enhance.static_speed"] = number(&P::enhance, &EnhanceConfig::static_speed);
    t["enhance.wavelet_sigma"] = [](P& c, std::string_view v) { c.enhance.smoothing.sigma = parse_number<double>(v); };
    t["enhance.wavelet_levels"] = [](P& c, std::string_view v) {
      c.enhance.smoothing.levels = parse_number<int>(v);
    };

    t["assess.accel_min"] = number(&P::anomaly, &AnomalyLimits::accel_min);
    t["assess.accel_max"] = number(&P::anomaly, &AnomalyLimits::accel_max);
    t["assess.jerk_abs"] = number(&P::anomaly, &AnomalyLimits::jerk_abs);
    t["assess.jsi_window"] = number(&P::anomaly, &AnomalyLimits::jsi_window);
    t["assess.jerk_deadband"] = number(&P::anomaly, &AnomalyLimits::jerk_deadband);
    t["assess.parallel_max_deg"] = number(&P::regime, &RegimeSettings::parallel_max_deg);
    t["assess.opposite_min_deg"] = number(&P::regime, &RegimeSettings::opposite_min_deg);
    t["assess.direction_window"] = number(&P::regime, &RegimeSettings::direction_window);

    t["metrics.a_max"] = number(&P::metrics, &MetricsConfig::a_max);
    t["metrics.psd_min_speed"] = number(&P::metrics, &MetricsConfig::psd_min_speed);
    auto mrct = [](double MrctParams::*field) -> Setter {
      return [=](P& c, std::string_view v) { c.metrics.mrct.*field = parse_number<double>(v); };
    };
    t["mrct.headway_slope"] = mrct(&MrctParams::headway_slope);
    t["mrct.headway_offset"] = mrct(&MrctParams::headway_offset);
    t["mrct.gap_slope"] = mrct(&MrctParams::gap_slope);
    t["mrct.gap_floor"] = mrct(&MrctParams::gap_floor);
    t["mrct.search_resolution"] = mrct(&MrctParams::search_resolution);
    t["mrct.search_max"] = mrct(&MrctParams::search_max);
    t["mrct.refine_tolerance"] = mrct(&MrctParams::refine_tolerance);

    t["synth.scenarios"] = [](P& c, std::string_view v) { c.corpus.scenarios = parse_number<std::size_t>(v); };
    t["synth.background"] = [](P& c, std::string_view v) { c.corpus.background = parse_number<std::size_t>(v); };
    t["synth.av_share"] = [](P& c, std::string_view v) { c.corpus.av_share = parse_number<double>(v); };
    t["synth.vru_every"] = [](P& c, std::string_view v) { c.corpus.vru_every = parse_number<std::size_t>(v); };
    t["synth.with_map"] = [](P& c, std::string_view v) { c.corpus.with_map = parse_bool(v); };
    t["synth.speed_noise_sigma"] = [](P& c, std::string_view v) {
      c.corpus.noise.speed_noise_sigma = parse_number<double>(v);
    };
    t["synth.zero_fill_probability"] = [](P& c, std::string_view v) {
      c.corpus.noise.zero_fill_probability = parse_number<double>(v);
    };
    t["synth.boundary_corruption"] = [](P& c, std::string_view v) { c.corpus.noise.boundary_corruption = parse_bool(v); };
    t["synth.noise_scope"] = [](P& c, std::string_view v) {
      if (v == "all") c.corpus.noise.scope = NoiseScope::all;
      else if (v == "split_by_kind") c.corpus.noise.scope = NoiseScope::split_by_kind;
      else throw ConfigError(fmt::format("unknown noise scope '{}'", v));
    };

    t["io.input"] = [](P& c, std::string_view v) { c.input = std::string(v); };
    t["io.output"] = [](P& c, std::string_view v) { c.output = std::string(v); };
    t["run.jobs"] = [](P& c, std::string_view v) { c.jobs = parse_number<std::size_t>(v); };
    t["run.seed"] = [](P& c, std::string_view v) { c.seed = parse_number<std::uint64_t>(v); };
    return t;
  }();
  return table;
}

}  // namespace

void PipelineConfig::validate() const
{
  try {
    selection.validate();
    metrics.mrct.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  if (!(metrics.a_max != 0.0)) throw ConfigError("metrics.a_max must be non-zero");
  if (jobs == 0) throw ConfigError("run.jobs must be at least 1");
  if (enhance.fit_samples < 4) throw ConfigError("enhance.fit_samples must be at least 4");
  if (!(corpus.av_share >= 0.0 && corpus.av_share <= 1.0)) throw ConfigError("synth.av_share must lie in [0, 1]");
  if (!input.empty() && std::filesystem::weakly_canonical(input) == std::filesystem::weakly_canonical(output)) {
    throw ConfigError("input and output paths must differ");
  }
}

PipelineConfig parse_config(std::string_view text, PipelineConfig base)
{
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("line {}: expected key = value", line_no));
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key));
    if (!seen.emplace(key).second) throw ConfigError(fmt::format("line {}: key '{}' given twice", line_no, key));
    try {
      it->second(base, value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}: {}", line_no, key, e.what()));
    }
  }
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base)
{
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config {}", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<std::string> config_keys()
{
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

}  // namespace conflict
