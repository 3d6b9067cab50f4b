#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "pvff/run_config.hpp"
#include "pvff/synth.hpp"

namespace pvff::cli {

/// Stable exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitUsageError = 2;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

int cmd_synth(const RunConfig& config, std::optional<synth::Overlap> overlap,
              const std::string& out_path, Streams io);

/// Writes `band,index,value` rows for one day window (the first one unless
/// `sample_id` selects another).
int cmd_decompose(const RunConfig& config, const std::string& data_csv,
                  const std::optional<std::string>& sample_id, const std::string& out_path,
                  Streams io);

int cmd_features(const RunConfig& config, const std::string& data_csv,
                 const std::string& out_path, Streams io);

int cmd_train(const RunConfig& config, const std::string& data_csv, const std::string& model_out,
              std::optional<double> holdout, Streams io);

/// `overrides` patch the model's stored signal settings before feature
/// extraction; the resulting feature names must still match the model.
int cmd_predict(const std::string& model_file, const std::string& data_csv,
                const std::string& out_path, const PipelineOverrides& overrides,
                unsigned threads, Streams io);

enum class ReportFormat { text, csv };

int cmd_evaluate(const std::string& model_file, const std::string& labeled_csv,
                 ReportFormat format, unsigned threads, Streams io);

/// Full command-line entry point: `pvff <subcommand> [options]`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pvff::cli
