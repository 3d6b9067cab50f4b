#pragma once

#include <chrono>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pvff {

/// Class label: 0 = healthy panel, 1 = snail-trail panel.
using Label = int;

inline constexpr Label kHealthy = 0;
inline constexpr Label kSnailTrail = 1;

namespace ingest {

using Minutes = std::chrono::sys_time<std::chrono::minutes>;

/// Raised for malformed CSV input. Carries the 1-based line number of the
/// offending row (0 when the problem is not tied to a single line).
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// One panel's per-minute current series.
struct CurrentTrace {
  std::string panel_id;
  std::vector<Minutes> timestamps;  // strictly increasing
  std::vector<double> currents;     // amperes, same length as timestamps
  std::optional<Label> label;
};

/// One calendar day of a trace resampled onto a fixed minute grid.
struct DayWindow {
  std::string panel_id;
  std::chrono::year_month_day date;
  std::vector<double> values;
  std::optional<Label> label;

  /// `panel_id@YYYY-MM-DD`
  std::string sample_id() const;
};

struct DroppedDay {
  std::string panel_id;
  std::chrono::year_month_day date;
  std::string reason;
};

struct WindowingResult {
  std::vector<DayWindow> windows;
  std::vector<DroppedDay> dropped;
};

inline constexpr std::size_t kMinutesPerDay = 1440;
inline constexpr std::size_t kDefaultMaxGap = 5;
inline constexpr double kNegativeCurrentTolerance = -0.1;

/// Parses `panel_id,timestamp,current_a[,label]` CSV into one trace per panel,
/// ordered by first appearance of the panel id. Rows are sorted by timestamp.
std::vector<CurrentTrace> parse_trace_csv(std::istream& source);
std::vector<CurrentTrace> parse_trace_csv_file(const std::string& path);

/// Splits a trace into calendar-day windows covering minutes [0, window_len)
/// of each day. Gaps of at most `max_gap` consecutive minutes are repaired
/// (linear interpolation inside the day, nearest value at the day's edges);
/// days with a longer gap, or fewer than window_len - max_gap samples, are
/// reported in `dropped` instead.
WindowingResult window_daily(const CurrentTrace& trace,
                             std::size_t window_len = kMinutesPerDay,
                             std::size_t max_gap = kDefaultMaxGap);

/// Trims leading and trailing samples strictly below `threshold`.
/// A threshold of 0 disables trimming. Throws when nothing is left.
DayWindow daylight_filter(const DayWindow& window, double threshold);

/// Writes windows in the trace CSV schema, one row per minute, currents at
/// 15 significant digits. The label column is always present; unlabeled
/// windows leave it empty.
void write_windows_csv(std::ostream& out, std::span<const DayWindow> windows);

/// `YYYY-MM-DDTHH:MM:SS`
std::string format_timestamp(Minutes t);
Minutes parse_timestamp(std::string_view text);
std::string format_date(std::chrono::year_month_day date);

}  // namespace ingest
}  // namespace pvff
