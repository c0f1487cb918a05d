#include "phmm/data.hpp"

#include <absl/time/civil_time.h>
#include <absl/time/time.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <utility>
#include <vector>

#include "phmm/errors.hpp"

namespace phmm {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

// Splits one CSV record. Quoted fields may contain commas and "" escapes;
// embedded newlines are not supported.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.emplace_back(trim(field));
  return fields;
}

std::optional<Count> parse_count(std::string_view text) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  Count value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string located(std::string_view source, std::size_t line, const std::string& what) {
  return std::string(source) + ":" + std::to_string(line) + ": " + what;
}

struct Row {
  Date date;
  Count count;
  std::size_t line;
};

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (text[i] < '0' || text[i] > '9') return std::nullopt;
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  const auto y = field(0, 4);
  const auto m = field(5, 2);
  const auto d = field(8, 2);
  if (!y || !m || !d) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y},
                                        std::chrono::month{static_cast<unsigned>(*m)},
                                        std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return std::chrono::sys_days{ymd};
}

std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

ObservationSeries ingest_counts(const std::filesystem::path& path, const IngestOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open " + path.string());
  return parse_counts_csv(in, opts, path.string());
}

ObservationSeries parse_counts_csv(std::istream& in, const IngestOptions& opts,
                                   std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> date_idx;
  std::optional<std::size_t> count_idx;
  std::size_t needed = 0;
  std::vector<Row> rows;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;

    const auto fields = split_record(line);
    if (!date_idx) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == opts.date_column && !date_idx) date_idx = i;
        if (fields[i] == opts.count_column && !count_idx) count_idx = i;
      }
      if (!date_idx || !count_idx) {
        throw IngestError(located(source, line_no,
                                  "header lacks column '" +
                                      (date_idx ? opts.count_column : opts.date_column) + "'"),
                          line_no);
      }
      needed = std::max(*date_idx, *count_idx) + 1;
      continue;
    }

    if (fields.size() < needed) {
      throw IngestError(located(source, line_no, "expected at least " + std::to_string(needed) +
                                                     " fields, got " +
                                                     std::to_string(fields.size())),
                        line_no);
    }
    const auto date = parse_date(fields[*date_idx]);
    if (!date) {
      throw IngestError(located(source, line_no, "unparseable date '" + fields[*date_idx] + "'"),
                        line_no);
    }
    const auto count = parse_count(fields[*count_idx]);
    if (!count) {
      throw IngestError(
          located(source, line_no,
                  "count '" + fields[*count_idx] + "' is not a non-negative integer"),
          line_no);
    }
    rows.push_back({*date, *count, line_no});
  }
  if (in.bad()) throw IngestError(std::string(source) + ": read error");
  if (!date_idx) throw IngestError(std::string(source) + ": missing header row");
  if (rows.empty()) throw IngestError(std::string(source) + ": no data rows");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.date < b.date; });

  std::vector<Count> counts;
  counts.reserve(rows.size());
  counts.push_back(rows.front().count);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const Row& prev = rows[i - 1];
    const Row& cur = rows[i];
    if (cur.date == prev.date) {
      throw IngestError(located(source, cur.line,
                                "duplicate date " + format_date(cur.date) + " (also on line " +
                                    std::to_string(prev.line) + ")"),
                        cur.line);
    }
    const auto gap = (cur.date - prev.date).count() - 1;
    if (gap > 0) {
      if (opts.missing_policy == MissingPolicy::error) {
        const Date first = prev.date + std::chrono::days(1);
        const Date last = cur.date - std::chrono::days(1);
        throw IngestError(std::string(source) + ": missing " + std::to_string(gap) + " day(s) " +
                          format_date(first) + ".." + format_date(last));
      }
      counts.insert(counts.end(), static_cast<std::size_t>(gap), Count{0});
    }
    counts.push_back(cur.count);
  }
  return ObservationSeries(rows.front().date, std::move(counts));
}

void write_counts_csv(std::ostream& out, const ObservationSeries& series) {
  out << "date,count\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_date(series.date_at(i)) << ',' << series[i] << '\n';
  }
}

ObservationSeries aggregate_events(std::span<const std::string> timestamps,
                                   std::string_view time_zone) {
  if (timestamps.empty()) throw IngestError("no timestamps to aggregate");
  absl::TimeZone tz;
  if (!absl::LoadTimeZone(std::string(time_zone), &tz)) {
    throw IngestError("unknown time zone '" + std::string(time_zone) + "'");
  }

  std::vector<Date> days;
  days.reserve(timestamps.size());
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    absl::Time instant;
    std::string err;
    if (!absl::ParseTime(absl::RFC3339_full, timestamps[i], &instant, &err)) {
      throw IngestError("timestamp " + std::to_string(i + 1) + " '" + timestamps[i] +
                            "' is not RFC 3339: " + err,
                        i + 1);
    }
    const absl::CivilDay cd = absl::ToCivilDay(instant, tz);
    days.push_back(std::chrono::sys_days{std::chrono::year_month_day{
        std::chrono::year{static_cast<int>(cd.year())},
        std::chrono::month{static_cast<unsigned>(cd.month())},
        std::chrono::day{static_cast<unsigned>(cd.day())}}});
  }

  const auto [lo, hi] = std::minmax_element(days.begin(), days.end());
  const Date first = *lo;
  std::vector<Count> counts(static_cast<std::size_t>((*hi - first).count()) + 1, 0);
  for (Date d : days) ++counts[static_cast<std::size_t>((d - first).count())];
  return ObservationSeries(first, std::move(counts));
}

}  // namespace phmm
