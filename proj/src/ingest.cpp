#include "pvff/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace pvff::ingest {

namespace {

using namespace std::chrono;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

int parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len) {
  if (pos + len > s.size()) throw std::invalid_argument("truncated timestamp");
  int value = 0;
  auto first = s.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len)
    throw std::invalid_argument("bad digits in timestamp");
  return value;
}

double parse_double(std::string_view s) {
  // from_chars for double is unavailable on older libstdc++; strtod is
  // locale-sensitive but the CLI never changes LC_NUMERIC.
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size())
    throw std::invalid_argument("not a number: '" + tmp + "'");
  return v;
}

struct Row {
  Minutes t;
  double current;
  std::size_t line;
};

struct PanelRows {
  std::string id;
  std::vector<Row> rows;
  std::optional<Label> label;
  bool label_seen = false;
  std::size_t first_line = 0;
};

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

std::string DayWindow::sample_id() const { return panel_id + "@" + format_date(date); }

std::string format_date(year_month_day date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::string format_timestamp(Minutes t) {
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const auto minute_of_day = (t - day).count();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:00", format_date(ymd).c_str(),
                static_cast<int>(minute_of_day / 60), static_cast<int>(minute_of_day % 60));
  return buf;
}

Minutes parse_timestamp(std::string_view text) {
  // YYYY-MM-DD[T ]HH:MM[:SS]
  if (text.size() != 16 && text.size() != 19)
    throw std::invalid_argument("timestamp must be YYYY-MM-DDTHH:MM[:SS], got '" +
                                std::string(text) + "'");
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || (text.size() == 19 && text[16] != ':'))
    throw std::invalid_argument("malformed timestamp '" + std::string(text) + "'");

  const year_month_day ymd{year{parse_fixed_int(text, 0, 4)},
                           month{static_cast<unsigned>(parse_fixed_int(text, 5, 2))},
                           day{static_cast<unsigned>(parse_fixed_int(text, 8, 2))}};
  if (!ymd.ok()) throw std::invalid_argument("invalid date in '" + std::string(text) + "'");
  const int hh = parse_fixed_int(text, 11, 2);
  const int mm = parse_fixed_int(text, 14, 2);
  const int ss = text.size() == 19 ? parse_fixed_int(text, 17, 2) : 0;
  if (hh > 23 || mm > 59 || ss > 59)
    throw std::invalid_argument("time of day out of range in '" + std::string(text) + "'");
  if (ss != 0)
    throw std::invalid_argument("timestamp not on a minute boundary: '" + std::string(text) +
                                "'");
  return sys_days{ymd} + hours{hh} + minutes{mm};
}

std::vector<CurrentTrace> parse_trace_csv(std::istream& source) {
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(source, line)) return {};
  ++line_no;
  std::string_view header = line;
  if (header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
  const auto columns = split_commas(header);
  const bool has_label = columns.size() == 4 && columns[3] == "label";
  if (columns.size() < 3 || columns.size() > 4 || columns[0] != "panel_id" ||
      columns[1] != "timestamp" || columns[2] != "current_a" ||
      (columns.size() == 4 && !has_label)) {
    throw ParseError(1, "expected header 'panel_id,timestamp,current_a[,label]'");
  }

  std::vector<PanelRows> panels;
  std::unordered_map<std::string, std::size_t> panel_index;

  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != columns.size())
      throw ParseError(line_no, "expected " + std::to_string(columns.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    if (fields[0].empty()) throw ParseError(line_no, "empty panel_id");

    Row row{};
    row.line = line_no;
    try {
      row.t = parse_timestamp(fields[1]);
      row.current = parse_double(fields[2]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
    if (!std::isfinite(row.current))
      throw ParseError(line_no, "non-finite current");
    if (row.current < kNegativeCurrentTolerance)
      throw ParseError(line_no, "negative current " + std::string(fields[2]) +
                                    " A below tolerance");

    std::optional<Label> label;
    if (has_label && !fields[3].empty()) {
      if (fields[3] == "0") label = kHealthy;
      else if (fields[3] == "1") label = kSnailTrail;
      else throw ParseError(line_no, "label must be 0 or 1, got '" + std::string(fields[3]) + "'");
    }

    const std::string id(fields[0]);
    auto [it, inserted] = panel_index.try_emplace(id, panels.size());
    if (inserted) {
      panels.push_back(PanelRows{id, {}, label, true, line_no});
    } else if (panels[it->second].label != label) {
      throw ParseError(line_no, "label conflicts with earlier rows of panel '" + id + "'");
    }
    panels[it->second].rows.push_back(row);
  }

  std::vector<CurrentTrace> traces;
  traces.reserve(panels.size());
  for (auto& p : panels) {
    std::stable_sort(p.rows.begin(), p.rows.end(),
                     [](const Row& a, const Row& b) { return a.t < b.t; });
    for (std::size_t i = 1; i < p.rows.size(); ++i) {
      if (p.rows[i].t == p.rows[i - 1].t) {
        const auto later = std::max(p.rows[i].line, p.rows[i - 1].line);
        const auto earlier = std::min(p.rows[i].line, p.rows[i - 1].line);
        throw ParseError(later, "duplicate row for panel '" + p.id + "' at " +
                                    format_timestamp(p.rows[i].t) + " (first seen on line " +
                                    std::to_string(earlier) + ")");
      }
    }
    CurrentTrace trace;
    trace.panel_id = p.id;
    trace.label = p.label;
    trace.timestamps.reserve(p.rows.size());
    trace.currents.reserve(p.rows.size());
    for (const auto& r : p.rows) {
      trace.timestamps.push_back(r.t);
      trace.currents.push_back(r.current);
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

std::vector<CurrentTrace> parse_trace_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
  try {
    return parse_trace_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

WindowingResult window_daily(const CurrentTrace& trace, std::size_t window_len,
                             std::size_t max_gap) {
  if (window_len < 2 || window_len > kMinutesPerDay)
    throw std::invalid_argument("window_len must be in [2, 1440]");
  if (trace.timestamps.empty()) throw std::invalid_argument("window_daily: empty trace");
  if (trace.timestamps.size() != trace.currents.size())
    throw std::invalid_argument("window_daily: timestamps and currents differ in length");

  // Bucket samples by calendar day; map keeps days in chronological order.
  std::map<sys_days, std::vector<std::optional<double>>> days_seen;
  for (std::size_t i = 0; i < trace.timestamps.size(); ++i) {
    const auto t = trace.timestamps[i];
    const auto day = floor<days>(t);
    const auto minute = static_cast<std::size_t>((t - day).count());
    auto& slots = days_seen[day];
    if (slots.empty()) slots.resize(window_len);
    if (minute < window_len) slots[minute] = trace.currents[i];
  }

  WindowingResult result;
  for (auto& [day, slots] : days_seen) {
    const year_month_day date{day};
    const auto present = static_cast<std::size_t>(
        std::count_if(slots.begin(), slots.end(), [](const auto& v) { return v.has_value(); }));

    auto drop = [&](std::string reason) {
      result.dropped.push_back(DroppedDay{trace.panel_id, date, std::move(reason)});
    };

    if (present + max_gap < window_len) {
      drop(std::to_string(window_len - present) + " missing minutes exceeds max_gap " +
           std::to_string(max_gap));
      continue;
    }

    // Walk the runs of missing minutes; each must fit within max_gap.
    std::vector<double> values(window_len);
    bool rejected = false;
    std::size_t i = 0;
    while (i < window_len && !rejected) {
      if (slots[i]) {
        values[i] = *slots[i];
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < window_len && !slots[j]) ++j;
      const std::size_t run = j - i;
      if (run > max_gap) {
        drop("gap of " + std::to_string(run) + " minutes starting at minute " +
             std::to_string(i) + " exceeds max_gap " + std::to_string(max_gap));
        rejected = true;
        break;
      }
      if (i > 0 && j < window_len) {
        const double left = *slots[i - 1];
        const double right = *slots[j];
        const double span = static_cast<double>(j - (i - 1));
        for (std::size_t k = i; k < j; ++k)
          values[k] = left + (right - left) * static_cast<double>(k - (i - 1)) / span;
      } else {
        const double edge = i == 0 ? *slots[j] : *slots[i - 1];
        for (std::size_t k = i; k < j; ++k) values[k] = edge;
      }
      i = j;
    }
    if (rejected) continue;

    result.windows.push_back(DayWindow{trace.panel_id, date, std::move(values), trace.label});
  }
  return result;
}

DayWindow daylight_filter(const DayWindow& window, double threshold) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("daylight threshold must be >= 0");
  if (threshold == 0.0) return window;

  const auto& v = window.values;
  auto below = [threshold](double x) { return x < threshold; };
  const auto first = std::find_if_not(v.begin(), v.end(), below);
  if (first == v.end())
    throw std::runtime_error("daylight filter left window " + window.sample_id() + " empty");
  const auto last = std::find_if_not(v.rbegin(), v.rend(), below).base();

  DayWindow out = window;
  out.values.assign(first, last);
  return out;
}

void write_windows_csv(std::ostream& out, std::span<const DayWindow> windows) {
  out << "panel_id,timestamp,current_a,label\n";
  char buf[64];
  for (const auto& w : windows) {
    const Minutes midnight = sys_days{w.date};
    const std::string label = w.label ? std::to_string(*w.label) : std::string();
    for (std::size_t m = 0; m < w.values.size(); ++m) {
      std::snprintf(buf, sizeof buf, "%.15g", w.values[m]);
      out << w.panel_id << ',' << format_timestamp(midnight + minutes{m}) << ',' << buf << ','
          << label << '\n';
    }
  }
}

}  // namespace pvff::ingest
