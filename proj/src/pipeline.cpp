#include "pvff/pipeline.hpp"

namespace pvff {

void PipelineOverrides::apply(PipelineConfig& config) const {
  if (wavelet) config.wavelet = *wavelet;
  if (levels) config.levels = *levels;
  if (mode) config.mode = *mode;
  if (window_len) config.window_len = *window_len;
  if (max_gap) config.max_gap = *max_gap;
  if (daylight_threshold) config.daylight_threshold = *daylight_threshold;
}

std::vector<ingest::DayWindow> to_windows(const std::vector<ingest::CurrentTrace>& traces,
                                          const PipelineConfig& config, std::ostream* log) {
  std::vector<ingest::DayWindow> windows;
  for (const auto& trace : traces) {
    if (trace.timestamps.empty()) continue;
    auto result = ingest::window_daily(trace, config.window_len, config.max_gap);
    if (log) {
      for (const auto& d : result.dropped)
        *log << "dropped " << d.panel_id << "@" << ingest::format_date(d.date) << ": "
             << d.reason << '\n';
    }
    for (auto& w : result.windows) {
      windows.push_back(config.daylight_threshold > 0.0
                            ? ingest::daylight_filter(w, config.daylight_threshold)
                            : std::move(w));
    }
  }
  return windows;
}

std::vector<ingest::DayWindow> load_windows(const std::string& csv_path,
                                            const PipelineConfig& config, std::ostream* log) {
  return to_windows(ingest::parse_trace_csv_file(csv_path), config, log);
}

}  // namespace pvff
