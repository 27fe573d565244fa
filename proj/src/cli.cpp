#include "crowdest/cli.hpp"

#include "crowdest/error.hpp"
#include "crowdest/estimators.hpp"
#include "crowdest/heuristics.hpp"
#include "crowdest/listwalk.hpp"
#include "crowdest/paygo.hpp"
#include "crowdest/series.hpp"
#include "crowdest/simulator.hpp"
#include "crowdest/stream.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace crowdest::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  std::string input;
  std::string output;
  std::size_t step = 50;
  std::string estimators = "uniform,chao84,chao92";
  std::string heuristic = "none";
  std::size_t t = 10;
  double r = 0.40;
  std::size_t repetitions = 1;
  std::string m_values = "10,20,50,100,200";
  std::size_t permutations = 100;
  double beta = 0.5;
  double h = 0.2;
  double threshold = 0.01;
  std::size_t s_min = 5;
  std::optional<std::uint64_t> seed;
  std::string dist = "uniform";
  std::size_t n_items = 50;
  double zipf_s = 1.0;
  std::size_t workers = 1;
  std::size_t hits = 400;
  bool with_replacement = false;
  std::optional<double> streaker_exponent;
  std::string interleave = "random";
  std::size_t list_walkers = 0;
  std::size_t list_length = 10;
  std::size_t list_offset = 0;
  std::string worker_counts = "1,2,5,10,20";
  std::size_t study_repetitions = 20;
};

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

std::string number(const std::optional<double>& v) { return v ? number(*v) : std::string(); }

json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

json json_number(const std::optional<double>& v) { return v ? json_number(*v) : json(nullptr); }

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::size_t> parse_counts(const std::string& text, std::string_view flag) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text)) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || item.front() == '-') {
      throw DomainError(fmt::format("{}: '{}' is not a non-negative integer", flag, item));
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw DomainError(fmt::format("{}: empty list", flag));
  return out;
}

std::string read_file(const std::string& path) {
  if (path.empty()) throw DomainError("--input is required");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError(fmt::format("cannot open input file '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path output_dir(const Options& o) {
  if (o.output.empty()) throw DomainError("--output is required");
  fs::path dir(o.output);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DomainError(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw DomainError(fmt::format("failed writing '{}'", path.string()));
}

std::uint64_t require_seed(const Options& o, std::string_view command) {
  if (!o.seed) throw DomainError(fmt::format("{}: --seed is required", command));
  return *o.seed;
}

std::optional<HeuristicConfig> heuristic_config(const Options& o, std::string_view command) {
  if (o.heuristic == "none") return std::nullopt;
  HeuristicConfig cfg;
  if (o.heuristic == "cluster") {
    cfg.kind = HeuristicKind::cluster;
  } else if (o.heuristic == "f1") {
    cfg.kind = HeuristicKind::f1;
  } else {
    throw DomainError(fmt::format("--heuristic must be none, cluster or f1 (got '{}')", o.heuristic));
  }
  cfg.t = o.t;
  cfg.r = o.r;
  cfg.repetitions = o.repetitions;
  cfg.seed = require_seed(o, command);
  cfg.validate();
  return cfg;
}

ItemDistribution distribution(const Options& o) {
  if (o.dist == "uniform") return ItemDistribution::uniform(o.n_items);
  if (o.dist == "zipf") return ItemDistribution::zipf(o.n_items, o.zipf_s);
  if (o.dist == "selfsimilar") return ItemDistribution::self_similar(o.n_items, o.h);
  if (o.dist == "geometric") return ItemDistribution::geometric(o.n_items, o.h);
  throw DomainError(fmt::format("--dist must be uniform, zipf, selfsimilar or geometric (got '{}')", o.dist));
}

ListWalkConfig listwalk_config(const Options& o) {
  ListWalkConfig cfg{o.s_min, o.beta, o.h, o.threshold};
  cfg.validate();
  return cfg;
}

std::vector<std::string> series_header(const EstimateSeries& series) {
  std::vector<std::string> cols = {"hits", "unique", "f1_ratio"};
  for (auto kind : series.estimators) cols.emplace_back(to_string(kind));
  cols.emplace_back("coverage");
  cols.emplace_back("cv_squared");
  return cols;
}

std::string series_csv_row(const SeriesRow& row) {
  std::string line = fmt::format("{},{},{}", row.hits, row.unique, number(row.f1_ratio));
  for (const auto& e : row.estimates) line += "," + number(e);
  line += "," + number(row.coverage) + "," + number(row.cv_squared);
  return line;
}

std::string join(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out.push_back(',');
    out += cols[i];
  }
  return out;
}

SeriesOptions series_options(const Options& o, std::string_view command) {
  SeriesOptions so;
  if (o.step < 1) throw DomainError("--step must be >= 1");
  so.step = o.step;
  so.estimators.clear();
  for (const auto& name : split_list(o.estimators)) so.estimators.push_back(parse_estimator_kind(name));
  if (so.estimators.empty()) throw DomainError("--estimators: empty list");
  so.heuristic = heuristic_config(o, command);
  return so;
}

json series_json(const EstimateSeries& series, const SeriesOptions& so) {
  json rows = json::array();
  for (const auto& row : series.rows) {
    json est = json::object();
    json comp = json::object();
    for (std::size_t i = 0; i < series.estimators.size(); ++i) {
      const std::string name(to_string(series.estimators[i]));
      est[name] = json_number(row.estimates[i]);
      if (row.estimates[i]) {
        const double v = *row.estimates[i];
        comp[name] = std::isinf(v) || v <= 0.0 ? 0.0 : std::min(1.0, static_cast<double>(row.unique) / v);
      } else {
        comp[name] = nullptr;
      }
    }
    rows.push_back({{"hits", row.hits},
                    {"unique", row.unique},
                    {"f1_ratio", row.f1_ratio},
                    {"estimates", std::move(est)},
                    {"completeness", std::move(comp)},
                    {"coverage", json_number(row.coverage)},
                    {"cv_squared", json_number(row.cv_squared)}});
  }
  json heuristic = nullptr;
  if (so.heuristic) {
    heuristic = {{"kind", to_string(so.heuristic->kind)},
                 {"t", so.heuristic->t},
                 {"r", so.heuristic->r},
                 {"repetitions", so.heuristic->repetitions},
                 {"seed", so.heuristic->seed}};
  }
  json names = json::array();
  for (auto kind : series.estimators) names.push_back(to_string(kind));
  return {{"step", so.step}, {"estimators", names}, {"heuristic", heuristic}, {"rows", rows}};
}

void cmd_simulate(const Options& o) {
  const std::uint64_t seed = require_seed(o, "simulate");
  const ItemDistribution dist = distribution(o);
  WorkerModel model;
  model.num_workers = o.workers;
  model.without_replacement = !o.with_replacement;
  if (o.interleave == "random") {
    model.interleaving = Interleaving::random;
  } else if (o.interleave == "round_robin") {
    model.interleaving = Interleaving::round_robin;
  } else {
    throw DomainError("--interleave must be random or round_robin");
  }
  if (o.workers < 1) throw DomainError("--workers must be >= 1");
  if (o.streaker_exponent) {
    model.count_model = CountModel::power_law;
    model.streaker_exponent = *o.streaker_exponent;
    model.min_answers = 1;
    model.max_answers = std::max<std::size_t>(1, model.without_replacement ? std::min(o.hits, o.n_items) : o.hits);
  } else {
    if (o.hits < o.workers) throw DomainError("--hits must be at least --workers");
    model.count_model = CountModel::explicit_counts;
    model.counts.assign(o.workers, o.hits / o.workers);
    for (std::size_t i = 0; i < o.hits % o.workers; ++i) ++model.counts[i];
  }
  std::optional<ListWalkerSpec> lists;
  if (o.list_walkers > 0) {
    lists = ListWalkerSpec{o.list_walkers, {}, {o.list_offset}, o.list_length};
  }
  const SimulationOutput sim = simulate(dist, model, lists, seed);
  const fs::path dir = output_dir(o);
  write_file(dir / "stream.csv", serialize_stream(sim.stream));
  write_file(dir / "truth.json", truth_to_json(sim.truth).dump(2) + "\n");
}

void cmd_estimate(const Options& o) {
  const AnswerStream stream = parse_stream(read_file(o.input));
  const SeriesOptions so = series_options(o, "estimate");
  const EstimateSeries series = estimate_series(stream, so);
  const fs::path dir = output_dir(o);
  std::string csv = join(series_header(series)) + "\n";
  for (const auto& row : series.rows) csv += series_csv_row(row) + "\n";
  write_file(dir / "series.csv", csv);
  write_file(dir / "series.json", series_json(series, so).dump(2) + "\n");
}

void cmd_replay(const Options& o, std::ostream& out) {
  const AnswerStream stream = parse_stream(read_file(o.input));
  const SeriesOptions so = series_options(o, "replay");
  EstimateSeries header_only;
  header_only.estimators = so.estimators;
  out << join(series_header(header_only)) << '\n' << std::flush;
  (void)estimate_series(stream, so, [&](const SeriesRow& row) { out << series_csv_row(row) << '\n' << std::flush; });
}

void cmd_paygo(const Options& o) {
  const AnswerStream stream = parse_stream(read_file(o.input));
  PaygoOptions po;
  po.m_values = parse_counts(o.m_values, "--m");
  if (o.permutations < 1) throw DomainError("--permutations must be >= 1");
  po.permutations = o.permutations;
  po.seed = require_seed(o, "paygo");
  po.heuristic = heuristic_config(o, "paygo");
  const auto predictions = paygo_predict(stream, po);

  const fs::path dir = output_dir(o);
  std::string csv = "hits,m,method,expected_new_uniques\n";
  json rows = json::array();
  for (const auto& p : predictions) {
    csv += fmt::format("{},{},{},{}\n", stream.size(), p.m, to_string(p.method), number(p.expected_new_uniques));
    rows.push_back({{"m", p.m}, {"method", to_string(p.method)}, {"expected_new_uniques", json_number(p.expected_new_uniques)}});
  }
  write_file(dir / "paygo.csv", csv);
  const json doc = {{"hits", stream.size()},
                    {"permutations", po.permutations},
                    {"seed", po.seed},
                    {"heuristic", o.heuristic},
                    {"predictions", rows}};
  write_file(dir / "paygo.json", doc.dump(2) + "\n");
}

void cmd_detect_lists(const Options& o) {
  const AnswerStream stream = parse_stream(read_file(o.input));
  const ListWalkConfig cfg = listwalk_config(o);
  if (o.step < 1) throw DomainError("--step must be >= 1");
  ListWalkReport report = scan(stream, cfg);
  report.affected_series = affected_series(stream, cfg, o.step);

  const fs::path dir = output_dir(o);
  write_file(dir / "listwalk.json", to_json(report, cfg).dump(2) + "\n");
  std::string csv = "hits,affected\n";
  for (const auto& p : report.affected_series) csv += fmt::format("{},{}\n", p.hits, p.affected);
  write_file(dir / "affected_series.csv", csv);
}

void cmd_streaker_study(const Options& o) {
  const std::uint64_t seed = require_seed(o, "streaker-study");
  StreakerStudyConfig cfg;
  cfg.hits = o.hits;
  cfg.repetitions = o.study_repetitions;
  cfg.without_replacement = !o.with_replacement;
  const auto rows = streaker_impact_study(distribution(o), parse_counts(o.worker_counts, "--worker-counts"), cfg, seed);
  const fs::path dir = output_dir(o);
  std::string csv = "num_workers,mean_chao92_error,flagged_runs,runs\n";
  for (const auto& row : rows) {
    csv += fmt::format("{},{},{},{}\n", row.num_workers, number(row.mean_error), row.flagged_runs, row.runs);
  }
  write_file(dir / "streaker_study.csv", csv);
}

void add_input(CLI::App* cmd, Options& o) {
  cmd->add_option("--input", o.input, "Answer stream CSV (hit_index,worker_id,answer)")->required();
}

void add_output(CLI::App* cmd, Options& o) {
  cmd->add_option("--output", o.output, "Output directory")->required();
}

void add_seed(CLI::App* cmd, Options& o) { cmd->add_option("--seed", o.seed, "RNG seed"); }

void add_series(CLI::App* cmd, Options& o) {
  cmd->add_option("--step", o.step, "Evaluate every K records")->capture_default_str();
  cmd->add_option("--estimators", o.estimators, "Comma list of uniform, chao84, chao92")->capture_default_str();
  cmd->add_option("--heuristic", o.heuristic, "none | cluster | f1")->capture_default_str();
  cmd->add_option("--t", o.t, "Top-worker count for the quota")->capture_default_str();
  cmd->add_option("--r", o.r, "Maximum removal fraction per worker")->capture_default_str();
  cmd->add_option("--repetitions", o.repetitions, "Heuristic resamples averaged per prefix")->capture_default_str();
}

void add_distribution(CLI::App* cmd, Options& o) {
  cmd->add_option("--dist", o.dist, "uniform | zipf | selfsimilar | geometric")->capture_default_str();
  cmd->add_option("--n-items", o.n_items, "True number of items N")->capture_default_str();
  cmd->add_option("--zipf-s", o.zipf_s, "Zipf exponent")->capture_default_str();
  cmd->add_option("--h", o.h, "Self-similar skew h")->capture_default_str();
  cmd->add_option("--hits", o.hits, "Total answers")->capture_default_str();
  cmd->add_flag("--with-replacement", o.with_replacement, "Workers may repeat answers");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Completeness estimation for crowdsourced set enumeration", "crowdest"};
  // --h is the skew parameter, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a ground-truth answer stream");
  add_output(simulate_cmd, o);
  add_seed(simulate_cmd, o);
  add_distribution(simulate_cmd, o);
  simulate_cmd->add_option("--workers", o.workers, "Sampling workers")->capture_default_str();
  simulate_cmd->add_option("--streaker-exponent", o.streaker_exponent,
                           "Draw per-worker answer counts from a power law with this exponent");
  simulate_cmd->add_option("--interleave", o.interleave, "random | round_robin")->capture_default_str();
  simulate_cmd->add_option("--list-walkers", o.list_walkers, "Workers copying one list verbatim")->capture_default_str();
  simulate_cmd->add_option("--list-length", o.list_length, "Answers per list walker")->capture_default_str();
  simulate_cmd->add_option("--list-offset", o.list_offset, "List position where walkers start")->capture_default_str();

  auto* estimate_cmd = app.add_subcommand("estimate", "Cardinality estimates over stream prefixes");
  add_input(estimate_cmd, o);
  add_output(estimate_cmd, o);
  add_seed(estimate_cmd, o);
  add_series(estimate_cmd, o);

  auto* replay_cmd = app.add_subcommand("replay", "Stream estimate rows to stdout as prefixes are processed");
  add_input(replay_cmd, o);
  add_seed(replay_cmd, o);
  add_series(replay_cmd, o);

  auto* paygo_cmd = app.add_subcommand("paygo", "Predict new distinct answers from m more HITs");
  add_input(paygo_cmd, o);
  add_output(paygo_cmd, o);
  add_seed(paygo_cmd, o);
  paygo_cmd->add_option("--m", o.m_values, "Comma list of additional HIT counts")->capture_default_str();
  paygo_cmd->add_option("--permutations", o.permutations, "Permutations for the mean curve")->capture_default_str();
  paygo_cmd->add_option("--heuristic", o.heuristic, "none | cluster | f1 (opt-in)")->capture_default_str();
  paygo_cmd->add_option("--t", o.t)->capture_default_str();
  paygo_cmd->add_option("--r", o.r)->capture_default_str();

  auto* detect_cmd = app.add_subcommand("detect-lists", "Detect workers walking the same list");
  add_input(detect_cmd, o);
  add_output(detect_cmd, o);
  detect_cmd->add_option("--beta", o.beta, "Weight on observed positional frequencies")->capture_default_str();
  detect_cmd->add_option("--h", o.h, "Skew of the self-similar prior")->capture_default_str();
  detect_cmd->add_option("--threshold", o.threshold, "Detection probability cutoff")->capture_default_str();
  detect_cmd->add_option("--s-min", o.s_min, "Shortest window")->capture_default_str();
  detect_cmd->add_option("--step", o.step, "Prefix step for the affected-HIT series")->capture_default_str();

  auto* study_cmd = app.add_subcommand("streaker-study", "Chao92 error versus number of equally active workers");
  add_output(study_cmd, o);
  add_seed(study_cmd, o);
  add_distribution(study_cmd, o);
  study_cmd->add_option("--worker-counts", o.worker_counts, "Comma list of worker counts")->capture_default_str();
  study_cmd->add_option("--repetitions", o.study_repetitions, "Simulations per worker count")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "crowdest: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*simulate_cmd) {
      cmd_simulate(o);
    } else if (*estimate_cmd) {
      cmd_estimate(o);
    } else if (*replay_cmd) {
      cmd_replay(o, out);
    } else if (*paygo_cmd) {
      cmd_paygo(o);
    } else if (*detect_cmd) {
      cmd_detect_lists(o);
    } else if (*study_cmd) {
      cmd_streaker_study(o);
    }
  } catch (const std::exception& e) {
    err << "crowdest: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace crowdest::cli
