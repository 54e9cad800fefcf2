// Command-line front end: ingest, select, enhance, assess, metrics, report, synth, pipeline.
//
// Exit codes: 0 success, 1 input error, 2 internal invariant violation.

#include "conflict/config.hpp"
#include "conflict/io.hpp"
#include "conflict/pipeline.hpp"
#include "conflict/synth.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <iostream>

namespace {

using namespace conflict;

struct Options
{
  std::string config;
  std::string input;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::size_t> scenarios;
};

void add_common(CLI::App* cmd, Options& o)
{
  cmd->add_option("--config", o.config, "flat key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--in", o.input, "scenario CSV file or directory (default: synthetic corpus)");
  cmd->add_option("--out", o.output, "output directory");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
}

PipelineConfig resolve(const Options& o)
{
  PipelineConfig cfg = o.config.empty() ? PipelineConfig{} : load_config(o.config);
  if (!o.input.empty()) cfg.input = o.input;
  if (!o.output.empty()) cfg.output = o.output;
  if (o.seed) cfg.seed = *o.seed;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.scenarios) cfg.corpus.scenarios = *o.scenarios;
  cfg.validate();
  return cfg;
}

/// Runs the stages up to `last` and writes the reports that stage produces.
void run_until(const PipelineConfig& cfg, Stage last)
{
  const auto input = load_input(cfg);
  const auto results = process_scenarios(input.scenarios, cfg, cfg.jobs, last);
  std::map<std::string, std::string> files;
  files["cases.csv"] = case_table_csv(results, input.scenarios);
  if (last == Stage::enhance) {
    files["enhancement.csv"] = enhancement_csv(results);
    for (const auto& r : results) {
      std::vector<Track> tracks;
      for (const auto& [_, et] : r.enhanced) tracks.push_back(et.to_track());
      files[fmt::format("scenarios/{}.csv", r.scenario_id)] = scenario_csv(Scenario(r.scenario_id, std::move(tracks)));
    }
  }
  if (last == Stage::assess) {
    files["anomaly.csv"] = anomaly_csv(results, cfg.anomaly);
    files["regime_histogram.csv"] = regime_histogram_csv(results);
  }
  if (last == Stage::metrics) files["metrics.csv"] = metrics_csv(results);
  if (last == Stage::report) {
    files["anomaly.csv"] = anomaly_csv(results, cfg.anomaly);
    files["regime_histogram.csv"] = regime_histogram_csv(results);
    files["distributions.csv"] = distributions_csv(results);
  }
  write_outputs(cfg.output, files);
  std::size_t cases = 0;
  for (const auto& r : results) cases += r.cases.size();
  fmt::print("{} scenario(s), {} case(s) -> {}\n", results.size(), cases, cfg.output.string());
}

int run(int argc, char** argv)
{
  CLI::App app{"Conflict-case extraction, trajectory enhancement and PET / PSD / MRCT metrics"};
  app.require_subcommand(1);
  Options o;

  auto* ingest_cmd = app.add_subcommand("ingest", "validate scenario files; with --out, re-export them canonically");
  auto* select_cmd = app.add_subcommand("select", "extract conflict cases");
  auto* enhance_cmd = app.add_subcommand("enhance", "repair and reconstruct trajectories");
  auto* assess_cmd = app.add_subcommand("assess", "anomaly report and regime histogram");
  auto* metrics_cmd = app.add_subcommand("metrics", "PET, PSD, deceleration and MRCT per case");
  auto* report_cmd = app.add_subcommand("report", "aggregate reports and binned distributions");
  auto* synth_cmd = app.add_subcommand("synth", "write a seeded synthetic corpus");
  auto* pipeline_cmd = app.add_subcommand("pipeline", "run every stage and write all reports");
  for (auto* cmd : {ingest_cmd, select_cmd, enhance_cmd, assess_cmd, metrics_cmd, report_cmd, synth_cmd, pipeline_cmd}) {
    add_common(cmd, o);
  }
  synth_cmd->add_option("--scenarios", o.scenarios, "number of scenarios");
  pipeline_cmd->add_option("--scenarios", o.scenarios, "number of synthetic scenarios when --in is absent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const auto cfg = resolve(o);
  if (ingest_cmd->parsed()) {
    if (cfg.input.empty()) throw InvalidInput("ingest needs --in");
    const auto scenarios = ingest(cfg.input);
    std::size_t tracks = 0;
    for (const auto& s : scenarios) tracks += s.tracks().size();
    if (!o.output.empty()) {
      std::map<std::string, std::string> files;
      for (const auto& s : scenarios) {
        files[s.scenario_id() + ".csv"] = scenario_csv(s);
        if (!s.lane_segments().empty()) {
          files[s.scenario_id() + ".map.csv"] = map_csv(s);
          files["lanes/" + s.scenario_id() + ".lanes.csv"] = lane_graph_csv(s);
        }
      }
      write_outputs(cfg.output, files);
    }
    fmt::print("{} scenario(s), {} track(s)\n", scenarios.size(), tracks);
  } else if (synth_cmd->parsed()) {
    const auto corpus = synth_corpus(cfg.corpus, cfg.seed);
    std::map<std::string, std::string> files;
    // Scenarios go to their own directory so it can be passed to --in as is.
    for (const auto& s : corpus) {
      const auto& id = s.scenario.scenario_id();
      files["scenarios/" + id + ".csv"] = scenario_csv(s.scenario);
      if (!s.scenario.lane_segments().empty()) files["scenarios/" + id + ".map.csv"] = map_csv(s.scenario);
    }
    files["ground_truth.csv"] = ground_truth_csv(corpus);
    write_outputs(cfg.output, files);
    fmt::print("{} scenario(s) -> {}\n", corpus.size(), (cfg.output / "scenarios").string());
  } else if (pipeline_cmd->parsed()) {
    const auto summary = run_pipeline(cfg);
    fmt::print("{} scenario(s), {} case(s), {} file(s) -> {}\n", summary.scenarios, summary.cases, summary.files.size(),
               cfg.output.string());
  } else if (select_cmd->parsed()) {
    run_until(cfg, Stage::select);
  } else if (enhance_cmd->parsed()) {
    run_until(cfg, Stage::enhance);
  } else if (assess_cmd->parsed()) {
    run_until(cfg, Stage::assess);
  } else if (metrics_cmd->parsed()) {
    run_until(cfg, Stage::metrics);
  } else if (report_cmd->parsed()) {
    run_until(cfg, Stage::report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  try {
    return run(argc, argv);
  } catch (const conflict::StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.input_problem() ? 1 : 2;
  } catch (const conflict::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
}
