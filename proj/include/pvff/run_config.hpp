#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "pvff/forest.hpp"
#include "pvff/pca.hpp"
#include "pvff/pipeline.hpp"
#include "pvff/synth.hpp"

namespace pvff {

/// Settings for one CLI invocation. A JSON config file uses the flat field
/// names below (e.g. "wavelet", "levels", "n_trees", "snail_attenuation");
/// command-line flags are applied on top of it.
struct RunConfig {
  synth::SynthConfig synth;
  PipelineConfig pipeline;
  /// Pipeline fields set explicitly (config file or flags). `pipeline`
  /// already includes them; prediction applies them to the model's settings.
  PipelineOverrides pipeline_overrides;
  double variance_target = pca::kDefaultVarianceTarget;
  forest::ForestParams forest;
  std::uint64_t seed = 42;
  unsigned threads = 1;

  /// Copies `seed` into the synth and forest settings.
  void sync_seed();
};

/// Applies every key of a flat JSON object; unknown keys are an error.
void apply_config_json(RunConfig& config, const nlohmann::json& j);
void apply_config_file(RunConfig& config, const std::string& path);

}  // namespace pvff
