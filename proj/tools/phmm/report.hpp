#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phmm/fit.hpp"
#include "phmm/inference.hpp"
#include "phmm/model.hpp"

namespace phmm::cli {

inline constexpr const char* kReportSchema = "phmm-report/1";

struct InputDigest {
  std::string path;
  std::size_t num_days = 0;
  Date first_date{};
  Date last_date{};
  Count total_count = 0;
};

struct CandidateRow {
  int num_states;
  double log_marginal;
  bool converged;
  int iterations;
  int best_restart;
  std::vector<double> rates;
};

struct DayRow {
  Date date;
  Count count;
  int state;
  double rate;
  std::vector<double> posterior;
};

struct FittedModel {
  std::vector<double> rates;
  double stay_prob;
  double log_likelihood;
  std::optional<bool> converged;  // absent when the rates were supplied, not fitted
  std::optional<int> iterations;
  std::optional<int> best_restart;
};

/// Everything one invocation reports. Serialized as JSON (report.json),
/// with the day table and candidate table also available as CSV.
struct RunReport {
  std::string command;
  InputDigest input;
  nlohmann::ordered_json config;
  std::vector<CandidateRow> candidates;  // sorted by num_states; empty for decode
  std::optional<int> selected_states;    // select only
  FittedModel model;
  std::string decoder;  // "marginal" or "viterbi"
  std::vector<DayRow> days;
};

enum class Decoder { marginal, viterbi };

InputDigest digest(const std::string& path, const ObservationSeries& series);
CandidateRow candidate_row(int num_states, const FitResult& fit);

/// Decodes every day under `model` and fills report.days and report.decoder.
void decode_days(RunReport& report, const ObservationSeries& series, const PoissonHmm& model,
                 Decoder decoder);

nlohmann::ordered_json to_json(const RunReport& report);
std::string report_text(const RunReport& report);  // pretty JSON + trailing newline

/// date,count,map_state,map_rate,gamma_1..gamma_K
std::string days_csv(const RunReport& report);
/// states,log_marginal,converged,iterations,best_restart,rates
std::string candidates_csv(const RunReport& report);

/// Shortest decimal string that reads back to the same double.
std::string format_real(double v);

}  // namespace phmm::cli
