#pragma once
/**
 * @file config.hpp
 * @brief Pipeline configuration in a flat "section.key = value" text format.
 *
 * Blank lines and lines starting with '#' are ignored. Unknown or repeated keys are errors.
 */

#include "conflict/assess.hpp"
#include "conflict/enhance.hpp"
#include "conflict/metrics.hpp"
#include "conflict/selection.hpp"
#include "conflict/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace conflict {

class ConfigError : public InvalidInput
{
public:
  using InvalidInput::InvalidInput;
};

struct PipelineConfig
{
  SelectionConfig selection;
  EnhanceConfig enhance;
  AnomalyLimits anomaly;
  RegimeSettings regime;
  MetricsConfig metrics;
  CorpusSettings corpus;  // used when no input directory is given
  std::filesystem::path input;
  std::filesystem::path output = "out";
  std::size_t jobs = 1;
  std::uint64_t seed = 0;

  /// Throws ConfigError when a section is invalid or input and output coincide.
  void validate() const;
};

/// Applies the assignments in `text` on top of `base`.
PipelineConfig parse_config(std::string_view text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

/// All recognised keys, sorted.
std::vector<std::string> config_keys();

}  // namespace conflict
