#include "phmm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "phmm/data.hpp"
#include "phmm/errors.hpp"
#include "phmm/fit.hpp"
#include "phmm/report.hpp"
#include "phmm/simulate.hpp"

namespace phmm::cli {

namespace {

namespace fs = std::filesystem;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Writes through a sibling temp file and renames it into place.
void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

fs::path with_suffix(const std::string& prefix, std::string_view suffix) {
  return fs::path(prefix + std::string(suffix));
}

// sim.csv -> sim.states.csv; anything else gets ".states.csv" appended.
fs::path states_sidecar(const std::string& out) {
  if (out.size() > 4 && out.ends_with(".csv")) return out.substr(0, out.size() - 4) + ".states.csv";
  return out + ".states.csv";
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

int fail(std::ostream& err, ExitCode code, std::string_view category, const std::string& what) {
  err << "phmm: error: " << category << ": " << one_line(what) << '\n';
  return code;
}

struct InputFlags {
  std::string path;
  std::string missing = "error";
  std::string date_column = "date";
  std::string count_column = "count";

  void add_to(CLI::App& cmd) {
    cmd.add_option("input", path, "Daily-count CSV (date,count)")->required();
    cmd.add_option("--missing", missing, "Gap policy for absent days")
        ->check(CLI::IsMember({"error", "fill-zero"}))
        ->capture_default_str();
    cmd.add_option("--date-column", date_column, "Header name of the date column")
        ->capture_default_str();
    cmd.add_option("--count-column", count_column, "Header name of the count column")
        ->capture_default_str();
  }

  IngestOptions options() const {
    IngestOptions o;
    o.missing_policy = missing == "fill-zero" ? MissingPolicy::fill_zero : MissingPolicy::error;
    o.date_column = date_column;
    o.count_column = count_column;
    return o;
  }

  void echo(nlohmann::ordered_json& config) const {
    config["missing_policy"] = missing;
    config["date_column"] = date_column;
    config["count_column"] = count_column;
  }
};

struct FitFlags {
  FitConfig config;
  std::string decoder = "marginal";
  std::string out;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--stay-prob", config.stay_prob, "Probability of staying in the same state")
        ->capture_default_str();
    cmd.add_option("--restarts", config.restarts, "EM restarts per number of states")
        ->capture_default_str();
    cmd.add_option("--seed", config.seed, "Seed for restart jitter")->capture_default_str();
    cmd.add_option("--max-iters", config.max_iters, "EM iteration cap")->capture_default_str();
    cmd.add_option("--tol", config.rel_tol, "Relative log-likelihood tolerance")
        ->capture_default_str();
    cmd.add_option("--rate-tol", config.rate_tol, "Relative rate-change tolerance")
        ->capture_default_str();
    cmd.add_option("--threads", config.threads, "Worker threads (does not change results)")
        ->capture_default_str();
    cmd.add_option("--decoder", decoder, "Per-day decoding")
        ->check(CLI::IsMember({"marginal", "viterbi"}))
        ->capture_default_str();
    cmd.add_option("--out", out,
                   "Output prefix: writes PREFIX.report.json, PREFIX.days.csv, "
                   "PREFIX.candidates.csv (report goes to stdout when omitted)");
  }

  void echo(nlohmann::ordered_json& c) const {
    c["stay_prob"] = config.stay_prob;
    c["restarts"] = config.restarts;
    c["seed"] = config.seed;
    c["max_iters"] = config.max_iters;
    c["rel_tol"] = config.rel_tol;
    c["rate_tol"] = config.rate_tol;
    c["decoder"] = decoder;
  }

  Decoder decoder_kind() const { return decoder == "viterbi" ? Decoder::viterbi : Decoder::marginal; }
};

void emit(const RunReport& report, const std::string& out_prefix, std::ostream& out) {
  if (out_prefix.empty()) {
    out << report_text(report);
    return;
  }
  write_file_atomic(with_suffix(out_prefix, ".report.json"), report_text(report));
  write_file_atomic(with_suffix(out_prefix, ".days.csv"), days_csv(report));
  if (!report.candidates.empty()) {
    write_file_atomic(with_suffix(out_prefix, ".candidates.csv"), candidates_csv(report));
  }
}

FittedModel fitted(const FitResult& fit) {
  return FittedModel{{fit.model.rates().begin(), fit.model.rates().end()},
                     fit.model.stay_prob(),
                     fit.final_log_likelihood,
                     fit.converged,
                     fit.iterations,
                     fit.best_restart};
}

void cmd_fit(const InputFlags& in, const FitFlags& flags, int states, std::ostream& out) {
  if (states < 1) throw DomainError("--states must be >= 1");
  const auto series = ingest_counts(in.path, in.options());
  const FitResult fit = em_fit(series, states, flags.config);

  RunReport report;
  report.command = "fit";
  report.input = digest(in.path, series);
  report.config["states"] = states;
  flags.echo(report.config);
  in.echo(report.config);
  report.candidates.push_back(candidate_row(states, fit));
  report.model = fitted(fit);
  decode_days(report, series, fit.model, flags.decoder_kind());
  emit(report, flags.out, out);
}

void cmd_select(const InputFlags& in, const FitFlags& flags, int max_states, std::ostream& out) {
  const auto series = ingest_counts(in.path, in.options());
  const ModelSelectionReport selection = select_num_states(series, max_states, flags.config);

  RunReport report;
  report.command = "select";
  report.input = digest(in.path, series);
  report.config["max_states"] = max_states;
  flags.echo(report.config);
  in.echo(report.config);
  for (const auto& c : selection.candidates) {
    report.candidates.push_back(candidate_row(c.num_states, c.fit));
  }
  report.selected_states = selection.selected_num_states;
  const FitResult& best = selection.selected().fit;
  report.model = fitted(best);
  decode_days(report, series, best.model, flags.decoder_kind());
  emit(report, flags.out, out);
}

void cmd_decode(const InputFlags& in, const std::vector<double>& rates, double stay_prob,
                const std::string& decoder, const std::string& out_prefix, std::ostream& out) {
  const auto series = ingest_counts(in.path, in.options());
  const PoissonHmm model(rates, stay_prob);

  RunReport report;
  report.command = "decode";
  report.input = digest(in.path, series);
  report.config["rates"] = rates;
  report.config["stay_prob"] = stay_prob;
  report.config["decoder"] = decoder;
  in.echo(report.config);
  report.model = FittedModel{rates, stay_prob, log_marginal_likelihood(series, model), {}, {}, {}};
  decode_days(report, series, model, decoder == "viterbi" ? Decoder::viterbi : Decoder::marginal);
  emit(report, out_prefix, out);
}

void cmd_simulate(std::vector<double> rates, int states, double stay_prob, std::size_t days,
                  std::uint64_t seed, const std::string& start, const std::string& out_path) {
  if (states != 0 && static_cast<std::size_t>(states) != rates.size()) {
    throw DomainError("--states " + std::to_string(states) + " disagrees with " +
                      std::to_string(rates.size()) + " --rates values");
  }
  const auto start_date = parse_date(start);
  if (!start_date) throw DomainError("--start '" + start + "' is not YYYY-MM-DD");
  const PoissonHmm model(std::move(rates), stay_prob);
  const Simulation sim = simulate(model, days, seed, *start_date);

  std::ostringstream counts;
  write_counts_csv(counts, sim.series);
  std::string truth = "date,state,rate\n";
  for (std::size_t t = 0; t < sim.states.size(); ++t) {
    truth += format_date(sim.series.date_at(t)) + "," + std::to_string(sim.states[t]) + "," +
             format_real(model.rate(sim.states[t])) + "\n";
  }
  write_file_atomic(out_path, counts.str());
  write_file_atomic(states_sidecar(out_path), truth);
}

void cmd_aggregate(const std::string& path, const std::string& tz, const std::string& out_path,
                   std::ostream& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open " + path);
  std::vector<std::string> stamps;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    stamps.push_back(line.substr(first, line.find_last_not_of(" \t") - first + 1));
  }
  std::ostringstream csv;
  write_counts_csv(csv, aggregate_events(stamps, tz));
  if (out_path.empty()) {
    out << csv.str();
  } else {
    write_file_atomic(out_path, csv.str());
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Switching-Poisson hidden Markov models for daily count series", "phmm"};
  app.require_subcommand(1);

  InputFlags fit_in;
  FitFlags fit_flags;
  int fit_states = 0;
  auto* fit = app.add_subcommand("fit", "Fit rates for a fixed number of states and decode each day");
  fit_in.add_to(*fit);
  fit->add_option("--states", fit_states, "Number of latent states")->required();
  fit_flags.add_to(*fit);

  InputFlags sel_in;
  FitFlags sel_flags;
  int max_states = 10;
  auto* sel = app.add_subcommand("select", "Fit K = 1..max-states and pick K by maximized likelihood");
  sel_in.add_to(*sel);
  sel->add_option("--max-states", max_states, "Largest number of states to try")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  sel_flags.add_to(*sel);

  InputFlags dec_in;
  std::vector<double> dec_rates;
  double dec_stay = kDefaultStayProb;
  std::string dec_decoder = "marginal";
  std::string dec_out;
  auto* dec = app.add_subcommand("decode", "Decode each day under given rates");
  dec_in.add_to(*dec);
  dec->add_option("--rates", dec_rates, "Comma-separated state rates")->required()->delimiter(',');
  dec->add_option("--stay-prob", dec_stay, "Probability of staying in the same state")
      ->capture_default_str();
  dec->add_option("--decoder", dec_decoder, "Per-day decoding")
      ->check(CLI::IsMember({"marginal", "viterbi"}))
      ->capture_default_str();
  dec->add_option("--out", dec_out, "Output prefix (report goes to stdout when omitted)");

  std::vector<double> sim_rates;
  int sim_states = 0;
  double sim_stay = kDefaultStayProb;
  std::size_t sim_days = 0;
  std::uint64_t sim_seed = 0;
  std::string sim_start = format_date(kDefaultSimulationStart);
  std::string sim_out;
  auto* sim = app.add_subcommand("simulate", "Draw a synthetic count series and its true states");
  sim->add_option("--rates", sim_rates, "Comma-separated state rates")->required()->delimiter(',');
  sim->add_option("--states", sim_states, "Number of states (must match --rates)");
  sim->add_option("--stay-prob", sim_stay, "Probability of staying in the same state")
      ->capture_default_str();
  sim->add_option("--days", sim_days, "Series length")->required()->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  sim->add_option("--start", sim_start, "First date, YYYY-MM-DD")->capture_default_str();
  sim->add_option("--out", sim_out, "Counts CSV; true states go to <stem>.states.csv")->required();

  std::string agg_path;
  std::string agg_tz = "UTC";
  std::string agg_out;
  auto* agg = app.add_subcommand("aggregate", "Bin RFC 3339 timestamps (one per line) into daily counts");
  agg->add_option("input", agg_path, "Timestamp file")->required();
  agg->add_option("--tz", agg_tz, "IANA time zone defining calendar days")->capture_default_str();
  agg->add_option("--out", agg_out, "Counts CSV (stdout when omitted)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (e.get_name() == "CallForAllHelp" ? app.help("", CLI::AppFormatMode::All)
                                                : (app.get_subcommands().empty()
                                                       ? app.help()
                                                       : app.get_subcommands().front()->help()));
      return kOk;
    }
    return fail(err, kUsageError, "usage", e.what());
  }

  try {
    if (*fit) cmd_fit(fit_in, fit_flags, fit_states, out);
    else if (*sel) cmd_select(sel_in, sel_flags, max_states, out);
    else if (*dec) cmd_decode(dec_in, dec_rates, dec_stay, dec_decoder, dec_out, out);
    else if (*sim) cmd_simulate(sim_rates, sim_states, sim_stay, sim_days, sim_seed, sim_start, sim_out);
    else if (*agg) cmd_aggregate(agg_path, agg_tz, agg_out, out);
  } catch (const IngestError& e) {
    return fail(err, kInputError, "input", e.what());
  } catch (const DomainError& e) {
    return fail(err, kDomainError, "domain", e.what());
  } catch (const IoError& e) {
    return fail(err, kIoError, "io", e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(err, kIoError, "io", e.what());
  } catch (const std::exception& e) {
    return fail(err, kInternalError, "internal", e.what());
  }
  return kOk;
}

}  // namespace phmm::cli
