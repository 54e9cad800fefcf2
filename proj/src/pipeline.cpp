#include "conflict/pipeline.hpp"

#include "conflict/geometry.hpp"
#include "conflict/io.hpp"
#include "conflict/synth.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <numeric>
#include <omp.h>
#include <set>

namespace conflict {

namespace fs = std::filesystem;

std::string_view to_string(Stage s)
{
  switch (s) {
    case Stage::ingest: return "ingest";
    case Stage::select: return "select";
    case Stage::enhance: return "enhance";
    case Stage::assess: return "assess";
    case Stage::metrics: return "metrics";
    case Stage::report: return "report";
  }
  return "?";
}

StageError::StageError(Stage stage, const std::string& message, bool input_problem)
  : std::runtime_error(fmt::format("[{}] {}", to_string(stage), message)), stage_(stage), input_problem_(input_problem)
{
}

namespace {

template <typename Fn>
void run_stage(Stage stage, const std::string& scenario_id, Fn&& fn)
{
  try {
    fn();
  } catch (const StageError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw StageError(stage, fmt::format("scenario {}: {}", scenario_id, e.what()), true);
  } catch (const std::exception& e) {
    throw StageError(stage, fmt::format("scenario {}: {}", scenario_id, e.what()), false);
  }
}

std::optional<double> raw_consistency(const Track& track)
{
  if (track.size() < 3 || track.has_gaps()) return std::nullopt;
  return speed_consistency_error(track);
}

std::optional<VehicleQuality> raw_quality(const Track& track)
{
  if (track.size() < 3 || track.has_gaps()) return std::nullopt;
  return VehicleQuality{track.kind(), kinematic_profile(track.speeds(), track.times()), speed_consistency_error(track)};
}

std::string optional_field(const std::optional<double>& v) { return v ? format_fixed(*v) : std::string(); }

}  // namespace

ScenarioResult process_scenario(const Scenario& scenario, const PipelineConfig& cfg, Stage last)
{
  ScenarioResult r;
  r.scenario_id = scenario.scenario_id();
  const auto& id = r.scenario_id;

  run_stage(Stage::select, id, [&] { r.cases = select_conflicts(scenario, cfg.selection); });
  if (last == Stage::select) return r;

  std::set<std::string> conflicting;
  for (const auto& c : r.cases) conflicting.insert({c.first_agent, c.second_agent});

  run_stage(Stage::enhance, id, [&] {
    for (const auto& track : scenario.tracks()) {
      const bool in_conflict = conflicting.contains(track.agent_id());
      auto et = enhance_track(track, in_conflict, cfg.enhance);
      TrackOutcome o{track.agent_id(), track.kind(), in_conflict, et.status, et.skip_reason, et.unrepaired.size(),
                     raw_consistency(track), std::nullopt};
      if (et.status == EnhanceStatus::enhanced) o.enhanced_consistency = et.consistency_error();
      r.outcomes.push_back(std::move(o));
      r.enhanced.emplace(track.agent_id(), std::move(et));
    }
  });
  if (last == Stage::enhance) return r;

  run_stage(Stage::assess, id, [&] {
    for (auto& c : r.cases) {
      if (c.pair_kind != PairKind::veh_veh) continue;
      try {
        c.regime = classify_regime(c, r.enhanced.at(c.first_agent).to_track(), r.enhanced.at(c.second_agent).to_track(),
                                   cfg.regime);
      } catch (const DegenerateGeometry&) {
        c.regime.reset();
      }
    }
    for (const auto& agent : conflicting) {
      const auto& et = r.enhanced.at(agent);
      if (!is_vehicle(et.base.kind())) continue;
      const auto raw = raw_quality(et.base);
      if (!raw) continue;
      r.raw_quality.push_back(*raw);
      if (et.status == EnhanceStatus::enhanced) {
        r.enhanced_quality.push_back({et.base.kind(), et.profile, et.consistency_error()});
      } else {
        r.enhanced_quality.push_back(*raw);
      }
    }
  });
  if (last == Stage::assess) return r;

  run_stage(Stage::metrics, id, [&] {
    for (const auto& c : r.cases) {
      auto rec = case_metrics(c, motion_series(r.enhanced.at(c.first_agent)), motion_series(r.enhanced.at(c.second_agent)),
                              cfg.metrics, Execution::serial);
      if (rec.mrct && *rec.mrct < rec.pet) {
        throw std::logic_error(fmt::format("case {}: MRCT {} below PET {}", rec.case_id, *rec.mrct, rec.pet));
      }
      r.metrics.push_back(std::move(rec));
    }
  });
  return r;
}

std::vector<ScenarioResult> process_scenarios(const std::vector<Scenario>& scenarios, const PipelineConfig& cfg,
                                              std::size_t jobs, Stage last)
{
  std::vector<std::size_t> order(scenarios.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return scenarios[a].scenario_id() < scenarios[b].scenario_id(); });

  std::vector<ScenarioResult> results(order.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < order.size(); ++i) results[i] = process_scenario(scenarios[order[i]], cfg, last);
    return results;
  }

  std::vector<std::exception_ptr> errors(order.size());
  const auto n = static_cast<long long>(order.size());
#pragma omp parallel for schedule(dynamic) num_threads(static_cast<int>(jobs))
  for (long long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      results[k] = process_scenario(scenarios[order[k]], cfg, last);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  // The first failure in scenario order is reported, as in the serial loop.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::string case_table_csv(const std::vector<ScenarioResult>& results, const std::vector<Scenario>& scenarios)
{
  std::map<std::string, const Scenario*> by_id;
  for (const auto& s : scenarios) by_id.emplace(s.scenario_id(), &s);
  std::string out = "case_id,scenario_id,first_agent,first_kind,second_agent,second_kind,category,pair_kind,"
                    "conflict_x,conflict_y,t_first,t_second,pet_s,min_sep_m,regime,mrct_status,surrounding\n";
  for (const auto& r : results) {
    const Scenario& s = *by_id.at(r.scenario_id);
    for (std::size_t i = 0; i < r.cases.size(); ++i) {
      const auto& c = r.cases[i];
      std::string around;
      for (const auto& a : c.surrounding) around += (around.empty() ? "" : ";") + a;
      std::string status;
      if (i < r.metrics.size() && r.metrics[i].mrct_status) status = std::string(to_string(*r.metrics[i].mrct_status));
      out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", c.case_id(), r.scenario_id,
                         c.first_agent, to_string(s.find(c.first_agent)->kind()), c.second_agent,
                         to_string(s.find(c.second_agent)->kind()), to_string(c.category), to_string(c.pair_kind),
                         format_fixed(c.conflict.location.x), format_fixed(c.conflict.location.y),
                         format_fixed(c.conflict.t_first), format_fixed(c.conflict.t_second), format_fixed(c.pet),
                         format_fixed(c.min_sep), c.regime ? to_string(*c.regime) : std::string(), status, around);
    }
  }
  return out;
}

std::string enhancement_csv(const std::vector<ScenarioResult>& results)
{
  std::string out = "scenario_id,track_id,agent_kind,conflicting,status,skip_reason,unrepaired_runs,raw_speed_mae,"
                    "enhanced_speed_mae\n";
  for (const auto& r : results) {
    for (const auto& o : r.outcomes) {
      out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.scenario_id, o.track_id, to_string(o.kind),
                         o.conflicting ? 1 : 0, to_string(o.status),
                         o.skip_reason ? std::string(to_string(*o.skip_reason)) : std::string(), o.unrepaired_runs,
                         optional_field(o.raw_consistency), optional_field(o.enhanced_consistency));
    }
  }
  return out;
}

std::string anomaly_csv(const std::vector<ScenarioResult>& results, const AnomalyLimits& limits)
{
  std::string out = "dataset,group,vehicles,samples,delta_v_mps,acc_pct,jerk_pct,jsi_pct\n";
  std::vector<VehicleQuality> raw;
  std::vector<VehicleQuality> enhanced;
  for (const auto& r : results) {
    raw.insert(raw.end(), r.raw_quality.begin(), r.raw_quality.end());
    enhanced.insert(enhanced.end(), r.enhanced_quality.begin(), r.enhanced_quality.end());
  }
  if (raw.empty()) return out;
  auto rows = [&](std::string_view dataset, const AnomalyBreakdown& b) {
    for (const auto& [group, rep] : {std::pair{"AV", &b.av}, std::pair{"HV", &b.hv}, std::pair{"all", &b.all}}) {
      if (rep->vehicles == 0) continue;
      out += fmt::format("{},{},{},{},{},{},{},{}\n", dataset, group, rep->vehicles, rep->samples,
                         format_fixed(rep->delta_v), format_fixed(rep->acc_pct), format_fixed(rep->jerk_pct),
                         format_fixed(rep->jsi_pct));
    }
  };
  rows("raw", anomaly_report(raw, limits));
  rows("enhanced", anomaly_report(enhanced, limits));
  return out;
}

std::string regime_histogram_csv(const std::vector<ScenarioResult>& results)
{
  std::string out = "regime,AV_first,AV_second,AV_free,total\n";
  std::array<std::array<std::size_t, 3>, kRegimeCount> counts{};
  std::size_t classified = 0;
  for (const auto& r : results) {
    for (const auto& c : r.cases) {
      if (!c.regime) continue;
      ++counts[static_cast<std::size_t>(c.regime->index())][static_cast<std::size_t>(c.category)];
      ++classified;
    }
  }
  if (classified == 0) return out;
  for (int k = 0; k < kRegimeCount; ++k) {
    const auto& row = counts[static_cast<std::size_t>(k)];
    out += fmt::format("{},{},{},{},{}\n", to_string(RegimeLabel::from_index(k)), row[0], row[1], row[2],
                       row[0] + row[1] + row[2]);
  }
  return out;
}

std::string metrics_csv(const std::vector<ScenarioResult>& results)
{
  std::string out = "case_id,category,pair_kind,regime,pet_s,min_sep_m,psd_min,max_decel_mps2,decel_lead_s,mrct_s,"
                    "preconf_s,flow_vps\n";
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.metrics.size(); ++i) {
      const auto& m = r.metrics[i];
      const auto& regime = m.regime;
      out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", m.case_id, to_string(m.category),
                         to_string(m.pair_kind), regime ? to_string(*regime) : std::string(), format_fixed(m.pet),
                         format_fixed(m.min_sep), optional_field(m.psd_min), optional_field(m.max_decel),
                         optional_field(m.decel_lead_time), optional_field(m.mrct), optional_field(m.pre_conflict),
                         optional_field(m.flow));
    }
  }
  return out;
}

std::string distributions_csv(const std::vector<ScenarioResult>& results)
{
  struct Binning
  {
    std::string_view metric;
    double lo;
    double hi;
    double width;
    std::optional<double> MetricsRecord::*field;  // null for pet / min_sep
  };
  // Values outside [lo, hi) are counted in the nearest edge bin.
  static const std::array<Binning, 7> binnings{{
      {"pet_s", 0.0, 5.0, 0.25, nullptr},
      {"min_sep_m", 0.0, 8.0, 0.5, nullptr},
      {"psd_min", 0.0, 10.0, 0.5, &MetricsRecord::psd_min},
      {"max_decel_mps2", -8.0, 0.0, 0.5, &MetricsRecord::max_decel},
      {"decel_lead_s", 0.0, 10.0, 0.5, &MetricsRecord::decel_lead_time},
      {"mrct_s", 0.0, 20.0, 0.5, &MetricsRecord::mrct},
      {"preconf_s", 0.0, 15.0, 0.5, &MetricsRecord::pre_conflict},
  }};
  std::string out = "metric,category,bin_lo,bin_hi,count\n";
  std::size_t total = 0;
  for (const auto& r : results) total += r.metrics.size();
  if (total == 0) return out;

  for (const auto& b : binnings) {
    const auto bins = static_cast<std::size_t>(std::lround((b.hi - b.lo) / b.width));
    for (auto cat : {CaseCategory::AV_first, CaseCategory::AV_second, CaseCategory::AV_free}) {
      std::vector<std::size_t> counts(bins, 0);
      for (const auto& r : results) {
        for (const auto& m : r.metrics) {
          if (m.category != cat) continue;
          std::optional<double> v;
          if (b.field != nullptr) v = m.*b.field;
          else v = b.metric == "pet_s" ? m.pet : m.min_sep;
          if (!v) continue;
          const double pos = std::floor((*v - b.lo) / b.width);
          const auto k = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
          ++counts[k];
        }
      }
      for (std::size_t k = 0; k < bins; ++k) {
        const double lo = b.lo + b.width * static_cast<double>(k);
        out += fmt::format("{},{},{},{},{}\n", b.metric, to_string(cat), format_fixed(lo), format_fixed(lo + b.width),
                           counts[k]);
      }
    }
  }
  return out;
}

std::string ground_truth_csv(const std::vector<SynthScenario>& corpus)
{
  std::string out = "scenario_id,first_agent,second_agent,conflict_x,conflict_y,t_first,t_second,pet_s,regime\n";
  for (const auto& s : corpus) {
    const auto& t = s.truth;
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", s.scenario.scenario_id(), t.first, t.second,
                       format_fixed(t.location.x), format_fixed(t.location.y), format_fixed(t.t_first),
                       format_fixed(t.t_second), format_fixed(t.t_second - t.t_first),
                       t.regime ? to_string(*t.regime) : std::string());
  }
  return out;
}

void write_outputs(const fs::path& dir, const std::map<std::string, std::string>& files)
{
  std::vector<fs::path> written;
  try {
    fs::create_directories(dir);
    for (const auto& [name, content] : files) {
      fs::create_directories((dir / name).parent_path());
      write_file(dir / name, content);
      written.push_back(dir / name);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    for (const auto& [name, _] : files) {
      auto tmp = dir / name;
      tmp += ".tmp";
      fs::remove(tmp, ec);
    }
    throw;
  }
}

PipelineInput load_input(const PipelineConfig& cfg)
{
  PipelineInput in;
  run_stage(Stage::ingest, "-", [&] {
    if (!cfg.input.empty()) {
      in.scenarios = ingest(cfg.input);
      return;
    }
    auto corpus = synth_corpus(cfg.corpus, cfg.seed);
    in.ground_truth = ground_truth_csv(corpus);
    for (auto& s : corpus) in.scenarios.push_back(std::move(s.scenario));
  });
  return in;
}

PipelineSummary run_pipeline(const PipelineConfig& cfg)
{
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw StageError(Stage::ingest, e.what(), true);
  }

  const auto input = load_input(cfg);
  const auto results = process_scenarios(input.scenarios, cfg, cfg.jobs, Stage::metrics);

  PipelineSummary summary;
  summary.scenarios = input.scenarios.size();
  for (const auto& r : results) summary.cases += r.cases.size();
  std::map<std::string, std::string> files;
  run_stage(Stage::report, "-", [&] {
    if (input.ground_truth) files["ground_truth.csv"] = *input.ground_truth;
    files["cases.csv"] = case_table_csv(results, input.scenarios);
    files["enhancement.csv"] = enhancement_csv(results);
    files["anomaly.csv"] = anomaly_csv(results, cfg.anomaly);
    files["regime_histogram.csv"] = regime_histogram_csv(results);
    files["metrics.csv"] = metrics_csv(results);
    files["distributions.csv"] = distributions_csv(results);
    write_outputs(cfg.output, files);
  });
  for (const auto& [name, _] : files) summary.files.push_back(name);
  return summary;
}

}  // namespace conflict
