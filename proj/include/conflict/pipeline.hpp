#pragma once
/**
 * @file pipeline.hpp
 * @brief ingest -> select -> enhance -> assess -> metrics -> report.
 *
 * Scenarios are processed independently by an OpenMP worker pool; results are kept in
 * scenario-id order so reports do not depend on the number of workers. jobs = 1 runs the
 * plain serial loop.
 */

#include "conflict/assess.hpp"
#include "conflict/config.hpp"
#include "conflict/enhance.hpp"
#include "conflict/metrics.hpp"
#include "conflict/scenario.hpp"
#include "conflict/selection.hpp"
#include "conflict/synth.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace conflict {

enum class Stage : std::uint8_t
{
  ingest,
  select,
  enhance,
  assess,
  metrics,
  report,
};

std::string_view to_string(Stage s);

class StageError : public std::runtime_error
{
public:
  StageError(Stage stage, const std::string& message, bool input_problem);
  Stage stage() const { return stage_; }
  /// True when the cause is bad input rather than a broken internal guarantee.
  bool input_problem() const { return input_problem_; }

private:
  Stage stage_;
  bool input_problem_;
};

struct TrackOutcome
{
  std::string track_id;
  AgentKind kind = AgentKind::vehicle;
  bool conflicting = false;
  EnhanceStatus status = EnhanceStatus::preserved_raw;
  std::optional<SkipReason> skip_reason;
  std::size_t unrepaired_runs = 0;
  std::optional<double> raw_consistency;       // mean |position-based - given speed|
  std::optional<double> enhanced_consistency;
};

struct ScenarioResult
{
  std::string scenario_id;
  std::vector<ConflictCase> cases;
  std::map<std::string, EnhancedTrack> enhanced;  // by track id (filled from the enhance stage on)
  std::vector<TrackOutcome> outcomes;
  std::vector<VehicleQuality> raw_quality;        // conflicting vehicles
  std::vector<VehicleQuality> enhanced_quality;
  std::vector<MetricsRecord> metrics;             // aligned with cases
};

/// Runs the stages up to and including `last` on one scenario.
ScenarioResult process_scenario(const Scenario& scenario, const PipelineConfig& cfg, Stage last = Stage::metrics);

/// Results in scenario-id order. jobs <= 1 uses the serial loop.
std::vector<ScenarioResult> process_scenarios(const std::vector<Scenario>& scenarios, const PipelineConfig& cfg,
                                              std::size_t jobs, Stage last = Stage::metrics);

std::string case_table_csv(const std::vector<ScenarioResult>& results, const std::vector<Scenario>& scenarios);
std::string enhancement_csv(const std::vector<ScenarioResult>& results);
std::string anomaly_csv(const std::vector<ScenarioResult>& results, const AnomalyLimits& limits);
std::string regime_histogram_csv(const std::vector<ScenarioResult>& results);
std::string metrics_csv(const std::vector<ScenarioResult>& results);
std::string distributions_csv(const std::vector<ScenarioResult>& results);
std::string ground_truth_csv(const std::vector<SynthScenario>& corpus);

/// Writes every named file (relative path) into `dir`; on failure the files written so far are removed.
void write_outputs(const std::filesystem::path& dir, const std::map<std::string, std::string>& files);

struct PipelineSummary
{
  std::size_t scenarios = 0;
  std::size_t cases = 0;
  std::vector<std::string> files;
};

struct PipelineInput
{
  std::vector<Scenario> scenarios;
  std::optional<std::string> ground_truth;  // CSV, set when the corpus was synthesized
};

/// Ingests cfg.input, or synthesizes cfg.corpus from cfg.seed when no input is set.
PipelineInput load_input(const PipelineConfig& cfg);

/// Full run. Ingests cfg.input, or synthesizes cfg.corpus from cfg.seed when no input is set.
PipelineSummary run_pipeline(const PipelineConfig& cfg);

}  // namespace conflict
