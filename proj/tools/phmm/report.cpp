#include "phmm/report.hpp"

#include <fmt/format.h>

#include "phmm/data.hpp"

namespace phmm::cli {

std::string format_real(double v) { return fmt::format("{}", v); }

InputDigest digest(const std::string& path, const ObservationSeries& series) {
  return InputDigest{path, series.size(), series.start_date(), series.end_date(), series.total()};
}

CandidateRow candidate_row(int num_states, const FitResult& fit) {
  return CandidateRow{num_states,     fit.final_log_likelihood,
                      fit.converged,  fit.iterations,
                      fit.best_restart, {fit.model.rates().begin(), fit.model.rates().end()}};
}

void decode_days(RunReport& report, const ObservationSeries& series, const PoissonHmm& model,
                 Decoder decoder) {
  const auto marginals = posterior_marginals(series, model);
  const StateSequence states =
      decoder == Decoder::viterbi ? viterbi(series, model) : map_states(marginals);
  const auto rates = rate_path(states, model);

  report.decoder = decoder == Decoder::viterbi ? "viterbi" : "marginal";
  report.days.clear();
  report.days.reserve(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    const auto row = marginals.row(t);
    report.days.push_back(
        DayRow{series.date_at(t), series[t], states[t], rates[t], {row.begin(), row.end()}});
  }
}

nlohmann::ordered_json to_json(const RunReport& report) {
  using json = nlohmann::ordered_json;
  json j;
  j["schema"] = kReportSchema;
  j["command"] = report.command;
  j["input"] = {
      {"path", report.input.path},
      {"num_days", report.input.num_days},
      {"first_date", format_date(report.input.first_date)},
      {"last_date", format_date(report.input.last_date)},
      {"total_count", report.input.total_count},
  };
  j["config"] = report.config;

  if (!report.candidates.empty()) {
    json table = json::array();
    for (const auto& c : report.candidates) {
      table.push_back({{"states", c.num_states},
                       {"log_marginal", c.log_marginal},
                       {"converged", c.converged},
                       {"iterations", c.iterations},
                       {"best_restart", c.best_restart},
                       {"rates", c.rates}});
    }
    j["candidates"] = std::move(table);
  }
  if (report.selected_states) j["selected_states"] = *report.selected_states;

  json model = {{"states", report.model.rates.size()},
                {"rates", report.model.rates},
                {"stay_prob", report.model.stay_prob},
                {"log_likelihood", report.model.log_likelihood}};
  if (report.model.converged) model["converged"] = *report.model.converged;
  if (report.model.iterations) model["iterations"] = *report.model.iterations;
  if (report.model.best_restart) model["best_restart"] = *report.model.best_restart;
  j["model"] = std::move(model);

  j["decoder"] = report.decoder;
  json days = json::array();
  for (const auto& d : report.days) {
    days.push_back({{"date", format_date(d.date)},
                    {"count", d.count},
                    {"state", d.state},
                    {"rate", d.rate},
                    {"posterior", d.posterior}});
  }
  j["days"] = std::move(days);
  return j;
}

std::string report_text(const RunReport& report) { return to_json(report).dump(2) + "\n"; }

std::string days_csv(const RunReport& report) {
  std::string out = "date,count,map_state,map_rate";
  for (std::size_t k = 1; k <= report.model.rates.size(); ++k) out += fmt::format(",gamma_{}", k);
  out += '\n';
  for (const auto& d : report.days) {
    out += fmt::format("{},{},{},{}", format_date(d.date), d.count, d.state, format_real(d.rate));
    for (double g : d.posterior) {
      out += ',';
      out += format_real(g);
    }
    out += '\n';
  }
  return out;
}

std::string candidates_csv(const RunReport& report) {
  std::string out = "states,log_marginal,converged,iterations,best_restart,rates\n";
  for (const auto& c : report.candidates) {
    std::string rates;
    for (double r : c.rates) {
      if (!rates.empty()) rates += ' ';
      rates += format_real(r);
    }
    out += fmt::format("{},{},{},{},{},{}\n", c.num_states, format_real(c.log_marginal),
                       c.converged ? "true" : "false", c.iterations, c.best_restart, rates);
  }
  return out;
}

}  // namespace phmm::cli
