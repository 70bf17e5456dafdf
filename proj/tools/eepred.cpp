// eepred command-line front end.
//
//   eepred [--config FILE] [--desk-scale] [--set key=value]... [--workers N]
//          <simulate|gen-data|split|train|experiment|plot> ...
//
// Exit codes: 0 success, 1 usage error, 2 domain error, 3 I/O error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "eepred/config.hpp"
#include "eepred/error.hpp"
#include "eepred/version.hpp"

namespace fs = std::filesystem;
using namespace eepred;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDomain = 2, kIo = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string config_path;
  bool desk_scale = false;
  std::vector<std::string> overrides;
  std::size_t workers = 1;
  std::string out_dir;
};

RunConfig load_config(const GlobalOptions& g) {
  try {
    RunConfig c = g.config_path.empty() ? RunConfig{} : read_run_config(g.config_path);
    if (g.desk_scale) apply_desk_scale(c);
    for (const auto& s : g.overrides) apply_override(c, s);
    if (!g.out_dir.empty()) c.output_dir = g.out_dir;
    c.workers = g.workers;
    return c;
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

fs::path out_path(const RunConfig& c, const std::string& name) {
  fs::path dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir / name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_json(const fs::path& path, const Json& doc) { write_text(path, doc.dump(2) + "\n"); }

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

Dataset load_dataset(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  return read_dataset_csv(in);
}

Json artifact_header(const RunConfig& c) {
  return {{"tool_version", kVersion}, {"config_digest", config_digest(c)}};
}

void announce(const fs::path& path) { std::cout << "wrote " << path.string() << '\n'; }

// simulate

struct SimulateOptions {
  std::optional<double> f, epsilon, delta;
};

int cmd_simulate(const RunConfig& base, const SimulateOptions& opt) {
  RunConfig c = base;
  if (opt.f) c.system.f = *opt.f;
  if (opt.epsilon) c.system.epsilon = *opt.epsilon;
  if (opt.delta) c.system.delta = *opt.delta;

  const Trajectory traj = integrate(c.system, c.sim);
  const QualifierResult q = classify_trajectory(traj, c.qualifier);

  const fs::path traj_path = out_path(c, "trajectory.txt");
  {
    std::ofstream out(traj_path);
    if (!out) throw IoError("cannot write " + traj_path.string());
    out << "# config_digest=" << config_digest(c) << '\n';
    write_trajectory(out, traj, c.system, c.sim);
    if (!out) throw IoError("failed writing " + traj_path.string());
  }
  Json doc = artifact_header(c);
  doc["params"] = to_json(c.system);
  doc["sim"] = to_json(c.sim);
  doc["qualifier"] = to_json(q);
  const fs::path q_path = out_path(c, "qualifier.json");
  write_json(q_path, doc);

  announce(traj_path);
  announce(q_path);
  std::cout << "label " << (q.extreme ? "extreme" : "non-extreme") << " threshold "
            << format_double(q.threshold) << " exceedances " << q.n_exceedances << '/' << q.n_peaks
            << '\n';
  return kOk;
}

// gen-data

Json distribution_json(const RunConfig& c, const Dataset& d) {
  const Split split = shuffle_split(d.size(), c.shuffle_seeds.front(), c.train_fraction);
  Json doc = artifact_header(c);
  doc["dataset_digest"] = d.config_digest;
  doc["seed"] = d.seed;
  doc["rows"] = d.size();
  doc["split_seed"] = split.seed;
  doc["distribution"] = to_json(distribution_report(d, split));
  Json attempts = Json::object();
  for (std::size_t i = 0; i < kCombinations.size(); ++i) {
    attempts[std::string(1, kCombinations[i].tag)] = {{"attempts", d.stats.attempts[i]},
                                                      {"diverged", d.stats.diverged[i]}};
  }
  doc["generation"] = attempts;
  return doc;
}

int cmd_gen_data(const RunConfig& c, bool quiet) {
  ProgressFn progress;
  if (!quiet) progress = [](const std::string& msg) { std::cerr << msg << '\n'; };
  const Dataset d = generate_dataset(c.generation(), progress);

  const fs::path csv = out_path(c, "dataset.csv");
  {
    std::ofstream out(csv);
    if (!out) throw IoError("cannot write " + csv.string());
    write_dataset_csv(out, d);
    if (!out) throw IoError("failed writing " + csv.string());
  }
  const fs::path dist = out_path(c, "distribution.json");
  write_json(dist, distribution_json(c, d));
  announce(csv);
  announce(dist);
  return kOk;
}

// split

int cmd_split(const RunConfig& c, const std::string& data, std::optional<std::uint64_t> seed) {
  const Dataset d = load_dataset(data);
  const Split split = shuffle_split(d.size(), seed.value_or(c.shuffle_seeds.front()), c.train_fraction);
  Json doc = artifact_header(c);
  doc["dataset_digest"] = d.config_digest;
  doc["split"] = to_json(split);
  doc["distribution"] = to_json(distribution_report(d, split));
  const fs::path path = out_path(c, "split.json");
  write_json(path, doc);
  announce(path);
  return kOk;
}

// train

int cmd_train(const RunConfig& c, const std::string& data, const std::string& model_name,
              std::optional<std::uint64_t> seed) {
  ModelKind kind;
  try {
    kind = parse_model_kind(model_name);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const Dataset d = load_dataset(data);
  const Split split = shuffle_split(d.size(), seed.value_or(c.shuffle_seeds.front()), c.train_fraction);
  const Matrix X = d.features();
  const Labels y = d.labels();
  const Matrix X_train = X.select_rows(split.train);
  const Matrix X_test = X.select_rows(split.test);
  Labels y_train, y_test;
  for (std::size_t i : split.train) y_train.push_back(y[i]);
  for (std::size_t i : split.test) y_test.push_back(y[i]);
  const Scaler scaler = fit_scaler(X_train);
  ModelConfigs configs = c.model_configs;
  configs.rf.workers = c.workers;
  const TrainedModel model = train_model(kind, configs, scaler.apply(X_train), y_train);
  const ConfusionMatrix cm = confusion(predict_labels(model, scaler.apply(X_test)), y_test);

  const std::string tag = to_string(kind);
  const fs::path model_path = out_path(c, "model_" + tag + ".json");
  write_model(model_path, model);
  announce(model_path);
  if (model.log) {
    const fs::path log_path = out_path(c, "trainlog_" + tag + ".csv");
    write_train_log_csv(log_path, *model.log, config_digest(c));
    announce(log_path);
  }
  Json doc = artifact_header(c);
  doc["dataset_digest"] = d.config_digest;
  doc["model_type"] = tag;
  doc["split_seed"] = split.seed;
  doc["scaler"] = {{"mean", scaler.mean}, {"variance", scaler.variance}};
  doc["confusion"] = to_json(cm);
  doc["metrics"] = to_json(metrics(cm));
  const fs::path summary = out_path(c, "train_" + tag + ".json");
  write_json(summary, doc);
  announce(summary);
  const MetricSet m = metrics(cm);
  std::cout << tag << " test accuracy " << format_double(m.accuracy) << '\n';
  return kOk;
}

// experiment

int cmd_experiment(const RunConfig& c, const std::string& data) {
  const Dataset d = load_dataset(data);
  const fs::path model_dir = out_path(c, "models");
  fs::create_directories(model_dir);
  const std::string run_digest = config_digest(c);
  auto observer = [&](const ExperimentCell& cell, const TrainedModel& model) {
    const std::string stem = "shuffle" + std::to_string(cell.shuffle) + "_" + to_string(cell.model);
    write_model(model_dir / (stem + ".json"), model);
    if (model.log) write_train_log_csv(model_dir / (stem + "_trainlog.csv"), *model.log, run_digest);
  };
  const ExperimentReport report = run_experiment(d, c.experiment(), observer);

  Json doc = to_json(report);
  doc["run_config_digest"] = run_digest;
  const fs::path json_path = out_path(c, "report.json");
  write_json(json_path, doc);
  const std::string table = render_report_table(report);
  const fs::path txt_path = out_path(c, "report.txt");
  write_text(txt_path, "# config_digest=" + run_digest + "\n" + table);
  const auto bars = write_metric_bars(report, out_path(c, "bars"));

  std::cout << table;
  announce(json_path);
  announce(txt_path);
  for (const auto& p : bars) announce(p);
  announce(model_dir);
  return kOk;
}

// plot

int plot_trajectory(const RunConfig& c, const fs::path& input) {
  std::ifstream in(input);
  if (!in) throw IoError("cannot open trajectory " + input.string());
  const Trajectory traj = read_trajectory(in);
  QualifierResult q;
  try {
    q = classify_trajectory(traj, c.qualifier);
  } catch (const DomainError& e) {
    throw IoError(std::string("trajectory cannot be qualified: ") + e.what());
  }
  const fs::path path = out_path(c, "trajectory_plot.csv");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# eepred trajectory_plot config_digest=" << config_digest(c)
      << " observable=" << to_string(q.observable) << '\n';
  out << "t,x,v,x_ee\n";
  const std::string ee = format_double(q.threshold);
  for (std::size_t i = traj.transient_cut_index; i < traj.size(); ++i) {
    out << format_double(traj.t[i]) << ',' << format_double(traj.x[i]) << ','
        << format_double(traj.v[i]) << ',' << ee << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
  announce(path);
  return kOk;
}

int plot_trainlog(const RunConfig& c, const fs::path& input) {
  const TrainLog log = read_train_log_csv(input);
  if (log.empty()) throw IoError("train log " + input.string() + " has no epochs");
  const fs::path path = out_path(c, "training_curve.csv");
  write_train_log_csv(path, log, config_digest(c));
  announce(path);
  return kOk;
}

int plot_report(const RunConfig& c, const fs::path& input) {
  const ExperimentReport report = report_from_json(read_json(input));
  try {
    for (const auto& p : write_metric_bars(report, out_path(c, "bars"))) announce(p);
  } catch (const DomainError& e) {
    throw IoError(e.what());
  }
  return kOk;
}

int cmd_plot(const RunConfig& c, const std::string& kind, const std::string& input) {
  if (kind == "trajectory") return plot_trajectory(c, input);
  if (kind == "trainlog") return plot_trainlog(c, input);
  if (kind == "report") return plot_report(c, input);
  throw UsageError("plot kind must be trajectory, trainlog or report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extreme-event labeling and classification for a driven parabolic oscillator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_flag("--desk-scale", g.desk_scale, "small quotas, horizon, trees and epochs");
  app.add_option("--set", g.overrides, "override a config key, e.g. data.quota=2")
      ->allow_extra_args(false);
  app.add_option("--workers", g.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out_dir, "output directory (overrides output_dir)");

  auto* simulate = app.add_subcommand("simulate", "integrate one parameter point and qualify it");
  SimulateOptions sim_opt;
  simulate->add_option("--f", sim_opt.f, "forcing strength");
  simulate->add_option("--epsilon", sim_opt.epsilon, "parametric drive strength");
  simulate->add_option("--delta", sim_opt.delta, "delay feedback strength");

  auto* gen = app.add_subcommand("gen-data", "generate the labeled dataset");
  bool quiet = false;
  gen->add_flag("--quiet", quiet, "suppress progress messages");

  std::string data = "out/dataset.csv";
  std::optional<std::uint64_t> seed;
  auto* split = app.add_subcommand("split", "shuffle-split a dataset and report class counts");
  split->add_option("--data", data, "dataset CSV")->required();
  split->add_option("--seed", seed, "shuffle seed (default: first experiment seed)");

  std::string model_name;
  auto* train = app.add_subcommand("train", "train one model on one split");
  train->add_option("--data", data, "dataset CSV")->required();
  train->add_option("--model", model_name, "LR, SVM, RF or MLP")->required();
  train->add_option("--seed", seed, "shuffle seed (default: first experiment seed)");

  auto* experiment = app.add_subcommand("experiment", "run every model on every shuffle");
  experiment->add_option("--data", data, "dataset CSV")->required();

  std::string plot_kind, plot_input;
  auto* plot = app.add_subcommand("plot", "export plot data from an artifact");
  plot->add_option("kind", plot_kind, "trajectory, trainlog or report")->required();
  plot->add_option("input", plot_input, "artifact path")->required();

  auto* dump = app.add_subcommand("config", "print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const RunConfig c = load_config(g);
    if (*simulate) return cmd_simulate(c, sim_opt);
    if (*gen) return cmd_gen_data(c, quiet);
    if (*split) return cmd_split(c, data, seed);
    if (*train) return cmd_train(c, data, model_name, seed);
    if (*experiment) return cmd_experiment(c, data);
    if (*plot) return cmd_plot(c, plot_kind, plot_input);
    if (*dump) {
      Json doc = to_json(c);
      std::cout << doc.dump(2) << "\n# config_digest=" << config_digest(c) << '\n';
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return kUsage;
}
