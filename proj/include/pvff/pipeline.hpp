#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pvff/dwt.hpp"
#include "pvff/features.hpp"
#include "pvff/ingest.hpp"

namespace pvff {

/// Signal-to-feature settings shared by training and prediction. Stored in
/// the model so prediction re-extracts features exactly as at train time.
struct PipelineConfig {
  dwt::WaveletName wavelet = dwt::kDefaultWavelet;
  std::size_t levels = dwt::kDefaultLevels;
  dwt::BoundaryMode mode = dwt::BoundaryMode::symmetric;
  std::size_t window_len = ingest::kMinutesPerDay;
  std::size_t max_gap = ingest::kDefaultMaxGap;
  double daylight_threshold = 0.0;  // 0 = trimming off

  features::ExtractionConfig extraction(unsigned threads = 1) const {
    return {wavelet, levels, mode, threads};
  }
};

/// Per-field replacements for a PipelineConfig, e.g. from CLI flags.
struct PipelineOverrides {
  std::optional<dwt::WaveletName> wavelet;
  std::optional<std::size_t> levels;
  std::optional<dwt::BoundaryMode> mode;
  std::optional<std::size_t> window_len;
  std::optional<std::size_t> max_gap;
  std::optional<double> daylight_threshold;

  bool any() const noexcept {
    return wavelet || levels || mode || window_len || max_gap || daylight_threshold;
  }
  void apply(PipelineConfig& config) const;
};

/// Parses a trace CSV and cuts it into (optionally trimmed) day windows.
/// Dropped days are reported on `log` when it is non-null.
std::vector<ingest::DayWindow> load_windows(const std::string& csv_path,
                                            const PipelineConfig& config,
                                            std::ostream* log = nullptr);

std::vector<ingest::DayWindow> to_windows(const std::vector<ingest::CurrentTrace>& traces,
                                          const PipelineConfig& config,
                                          std::ostream* log = nullptr);

}  // namespace pvff
