#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "phmm/model.hpp"

namespace phmm {

enum class MissingPolicy { error, fill_zero };

struct IngestOptions {
  MissingPolicy missing_policy = MissingPolicy::error;
  std::string date_column = "date";
  std::string count_column = "count";
};

/// Strict ISO-8601 calendar date, YYYY-MM-DD.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date date);

/// Reads a daily-count CSV (header row, comma separated, UTF-8). Rows may
/// come in any order; they are sorted by date and must form a contiguous
/// run of days unless the policy is fill_zero. Throws IngestError.
ObservationSeries ingest_counts(const std::filesystem::path& path, const IngestOptions& opts = {});

/// Same as ingest_counts on an already open stream. `source` names the
/// input in error messages.
ObservationSeries parse_counts_csv(std::istream& in, const IngestOptions& opts = {},
                                   std::string_view source = "<input>");

/// Canonical interchange form: "date,count" header then one row per day,
/// LF line endings.
void write_counts_csv(std::ostream& out, const ObservationSeries& series);

/// Bins RFC 3339 instants (e.g. 2023-03-26T01:30:00Z or ...+02:00) by local
/// calendar day in `time_zone` (an IANA name such as "Europe/Rome"). Days
/// between the first and last event with no events get 0.
/// Throws IngestError naming the 1-based index of a bad timestamp.
ObservationSeries aggregate_events(std::span<const std::string> timestamps,
                                   std::string_view time_zone);

}  // namespace phmm
