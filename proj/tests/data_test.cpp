#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "phmm/data.hpp"
#include "phmm/errors.hpp"

namespace phmm {
namespace {

using std::chrono::sys_days;
using std::chrono::year;

Date ymd(int y, unsigned m, unsigned d) {
  return sys_days{year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

ObservationSeries parse(const std::string& text, const IngestOptions& opts = {}) {
  std::istringstream in(text);
  return parse_counts_csv(in, opts, "mem.csv");
}

std::size_t error_line(const std::string& text, const IngestOptions& opts = {}) {
  try {
    parse(text, opts);
  } catch (const IngestError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no IngestError for:\n" << text;
  return 0;
}

TEST(ParseDate, StrictIso) {
  EXPECT_EQ(parse_date("2023-03-27"), ymd(2023, 3, 27));
  EXPECT_EQ(parse_date("2024-02-29"), ymd(2024, 2, 29));
  EXPECT_FALSE(parse_date("2023-02-29"));
  EXPECT_FALSE(parse_date("2023-3-27"));
  EXPECT_FALSE(parse_date("2023/03/27"));
  EXPECT_FALSE(parse_date("2023-03-27T00:00"));
  EXPECT_FALSE(parse_date(""));
  EXPECT_EQ(format_date(ymd(987, 1, 2)), "0987-01-02");
}

TEST(IngestCounts, DirectParse) {
  const auto s = parse("date,count\n2023-03-27,14\n2023-03-28,9\n");
  EXPECT_EQ(s.start_date(), ymd(2023, 3, 27));
  EXPECT_EQ(std::vector<Count>(s.counts().begin(), s.counts().end()), (std::vector<Count>{14, 9}));
}

TEST(IngestCounts, SortsRowsAndFindsNamedColumns) {
  IngestOptions opts;
  opts.date_column = "day";
  opts.count_column = "n";
  const auto s = parse("\xEF\xBB\xBFn,day,note\r\n5,2023-01-03,x\r\n4,2023-01-02,\"a, b\"\r\n\r\n", opts);
  EXPECT_EQ(s.start_date(), ymd(2023, 1, 2));
  EXPECT_EQ(s[0], 4);
  EXPECT_EQ(s[1], 5);
}

TEST(IngestCounts, GapPolicy) {
  const std::string text = "date,count\n2023-01-01,3\n2023-01-04,8\n";
  try {
    parse(text);
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_NE(std::string(e.what()).find("2023-01-02..2023-01-03"), std::string::npos) << e.what();
  }
  IngestOptions fill;
  fill.missing_policy = MissingPolicy::fill_zero;
  const auto s = parse(text, fill);
  EXPECT_EQ(std::vector<Count>(s.counts().begin(), s.counts().end()),
            (std::vector<Count>{3, 0, 0, 8}));
}

TEST(IngestCounts, RowErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("date,count\n2023-01-01,3\n2023-01-02,-1\n"), 3u);
  EXPECT_EQ(error_line("date,count\n2023-01-01,2.5\n"), 2u);
  EXPECT_EQ(error_line("date,count\n2023-01-01,\n"), 2u);
  EXPECT_EQ(error_line("date,count\n01/02/2023,4\n"), 2u);
  EXPECT_EQ(error_line("date,count\n2023-01-01,4\n2023-01-02,5\n2023-01-01,6\n"), 4u);
  EXPECT_EQ(error_line("date,count\n2023-01-01\n"), 2u);
  EXPECT_EQ(error_line("day,count\n2023-01-01,4\n"), 1u);
  EXPECT_EQ(error_line("date,count\n2023-01-01,99999999999999999999999\n"), 2u);
  EXPECT_THROW(parse("date,count\n"), IngestError);
  EXPECT_THROW(parse(""), IngestError);
}

TEST(IngestCounts, MissingFile) {
  EXPECT_THROW(ingest_counts("/nonexistent/counts.csv"), IngestError);
}

TEST(IngestCounts, WriteThenIngestIsIdentity) {
  std::mt19937_64 rng(1);
  const auto dir = std::filesystem::temp_directory_path() / "phmm_data_test";
  std::filesystem::create_directories(dir);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Count> counts(std::uniform_int_distribution<std::size_t>(1, 400)(rng));
    for (auto& c : counts) c = std::uniform_int_distribution<Count>(0, 2'000'000)(rng);
    const ObservationSeries s(ymd(1999 + trial, 12, 30), counts);
    const auto path = dir / ("series" + std::to_string(trial) + ".csv");
    {
      std::ofstream out(path, std::ios::binary);
      write_counts_csv(out, s);
    }
    EXPECT_EQ(ingest_counts(path), s);
  }
  std::filesystem::remove_all(dir);
}

TEST(WriteCounts, CanonicalBytes) {
  std::ostringstream out;
  write_counts_csv(out, ObservationSeries(ymd(2023, 3, 27), {14, 9}));
  EXPECT_EQ(out.str(), "date,count\n2023-03-27,14\n2023-03-28,9\n");
}

TEST(AggregateEvents, SingleDay) {
  const std::vector<std::string> ts = {"2023-05-01T08:00:00Z", "2023-05-01T12:00:00Z",
                                       "2023-05-01T20:00:00+02:00"};
  const auto s = aggregate_events(ts, "Europe/Rome");
  EXPECT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], 3);
  EXPECT_EQ(s.start_date(), ymd(2023, 5, 1));
}

TEST(AggregateEvents, InteriorDaysAreZero) {
  const std::vector<std::string> ts = {"2023-05-03T10:00:00Z", "2023-05-01T10:00:00Z",
                                       "2023-05-01T11:00:00Z", "2023-05-03T12:00:00Z",
                                       "2023-05-03T13:00:00Z"};
  const auto s = aggregate_events(ts, "UTC");
  EXPECT_EQ(std::vector<Count>(s.counts().begin(), s.counts().end()), (std::vector<Count>{2, 0, 3}));
  EXPECT_EQ(s.total(), 5);
}

// Expected local dates come from Python's zoneinfo (tzdata) for Europe/Rome.
TEST(AggregateEvents, DaylightSavingBoundaries) {
  struct Case {
    const char* instant;
    Date local;
  };
  const Case cases[] = {
      {"2023-03-25T22:59:59Z", ymd(2023, 3, 25)}, {"2023-03-25T23:00:00Z", ymd(2023, 3, 26)},
      {"2023-03-26T00:59:59Z", ymd(2023, 3, 26)}, {"2023-03-26T01:00:00Z", ymd(2023, 3, 26)},
      {"2023-03-26T21:59:59Z", ymd(2023, 3, 26)}, {"2023-03-26T22:00:00Z", ymd(2023, 3, 27)},
      {"2023-10-28T21:59:59Z", ymd(2023, 10, 28)}, {"2023-10-28T22:00:00Z", ymd(2023, 10, 29)},
      {"2023-10-29T00:30:00Z", ymd(2023, 10, 29)}, {"2023-10-29T01:30:00Z", ymd(2023, 10, 29)},
      {"2023-10-29T22:59:59Z", ymd(2023, 10, 29)}, {"2023-10-29T23:00:00Z", ymd(2023, 10, 30)},
  };
  for (const auto& c : cases) {
    const std::vector<std::string> one = {c.instant};
    EXPECT_EQ(aggregate_events(one, "Europe/Rome").start_date(), c.local) << c.instant;
  }
}

TEST(AggregateEvents, LengthAndTotalInvariant) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> day(1, 28);
  std::uniform_int_distribution<int> hour(0, 23);
  std::vector<std::string> ts;
  for (int i = 0; i < 500; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "2023-02-%02dT%02d:15:00Z", day(rng), hour(rng));
    ts.emplace_back(buf);
  }
  const auto s = aggregate_events(ts, "America/New_York");
  EXPECT_EQ(s.total(), 500);
  EXPECT_EQ(s.end_date() - s.start_date() + std::chrono::days(1),
            std::chrono::days(static_cast<long>(s.size())));
}

TEST(AggregateEvents, Errors) {
  const std::vector<std::string> bad = {"2023-05-01T08:00:00Z", "yesterday"};
  try {
    aggregate_events(bad, "UTC");
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(aggregate_events({}, "UTC"), IngestError);
  const std::vector<std::string> ok = {"2023-05-01T08:00:00Z"};
  EXPECT_THROW(aggregate_events(ok, "Mars/Olympus_Mons"), IngestError);
}

}  // namespace
}  // namespace phmm
