#pragma once
/**
 * @file io.hpp
 * @brief Canonical scenario interchange: one CSV per scenario plus an optional lane map.
 *
 * `<scenario>.csv` columns: scenario_id, track_id, agent_kind, t, x, y, vx, vy, heading.
 * `<scenario>.map.csv` columns: segment_id, vertex_index, x, y, successors (';'-separated).
 * Numbers are written with 6 fixed decimals.
 */

#include "conflict/scenario.hpp"

#include <filesystem>
#include <istream>
#include <memory>
#include <string>
#include <vector>

namespace conflict {

struct Diagnostic
{
  std::string source;  // file name
  std::size_t row = 0; // 1-based data row (0 for file-level problems)
  std::string message;
};

/// Rejection of malformed input; what() lists the first diagnostics.
class IngestError : public InvalidInput
{
public:
  explicit IngestError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
  std::vector<Diagnostic> diagnostics_;
};

/// Source-format adapter.
class ScenarioReader
{
public:
  virtual ~ScenarioReader() = default;
  /// Scenarios sorted by id.
  virtual std::vector<Scenario> read(const std::filesystem::path& path) const = 0;
};

class CsvScenarioReader final : public ScenarioReader
{
public:
  /// `path` is one scenario file or a directory of them (map files are picked up beside each scenario).
  std::vector<Scenario> read(const std::filesystem::path& path) const override;
};

std::vector<Scenario> ingest(const std::filesystem::path& path, const ScenarioReader& reader = CsvScenarioReader{});

/// Parses one scenario; `map` may be null.
Scenario parse_scenario(std::istream& tracks, const std::string& source, std::istream* map = nullptr,
                        const std::string& map_source = {});

std::string format_fixed(double value);
std::string scenario_csv(const Scenario& scenario);
/// Empty when the scenario has no lane segments.
std::string map_csv(const Scenario& scenario);
/// Merged lanes as 21 breakpoints each, followed by adjacency pairs.
std::string lane_graph_csv(const Scenario& scenario);

void write_scenario(const Scenario& scenario, const std::filesystem::path& dir);

/// Writes `content` to `path` through a temporary sibling and a rename.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace conflict
