#include "eepred/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include "eepred/parallel.hpp"
#include "eepred/version.hpp"

namespace eepred {

ConfusionMatrix confusion(std::span<const int> predicted, std::span<const int> actual) {
  if (predicted.size() != actual.size()) {
    throw DomainError("confusion: predicted and actual labels differ in length");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const int p = predicted[i];
    const int a = actual[i];
    if ((p != 0 && p != 1) || (a != 0 && a != 1)) throw DomainError("confusion: labels must be 0 or 1");
    if (a == 1) (p == 1 ? cm.tp : cm.fn)++;
    else (p == 1 ? cm.fp : cm.tn)++;
  }
  return cm;
}

MetricSet metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw DomainError("metrics: empty confusion matrix");
  MetricSet m;
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / cm.total();
  if (cm.tp + cm.fp == 0) m.precision_undefined = true;
  else m.precision = static_cast<double>(cm.tp) / (cm.tp + cm.fp);
  if (cm.tp + cm.fn == 0) m.recall_undefined = true;
  else m.recall = static_cast<double>(cm.tp) / (cm.tp + cm.fn);
  if (m.precision + m.recall == 0.0) m.f1_undefined = true;
  else m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

const ExperimentCell& ExperimentReport::cell(std::size_t shuffle, ModelKind model) const {
  for (const auto& c : cells) {
    if (c.shuffle == shuffle && c.model == model) return c;
  }
  throw DomainError("report has no cell for shuffle " + std::to_string(shuffle) + " / " +
                    to_string(model));
}

const ModelSummary& ExperimentReport::summary(ModelKind model) const {
  for (const auto& s : summaries) {
    if (s.model == model) return s;
  }
  throw DomainError("report has no summary for " + to_string(model));
}

namespace {

MetricRange range_of(const std::vector<double>& values) {
  MetricRange r;
  if (values.empty()) return r;
  r.min = *std::min_element(values.begin(), values.end());
  r.max = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / values.size();
  return r;
}

void summarize(ExperimentReport& report, const std::vector<ModelKind>& models) {
  report.summaries.clear();
  for (ModelKind kind : models) {
    std::vector<double> acc, prec, rec, f1;
    for (const auto& c : report.cells) {
      if (c.model != kind) continue;
      acc.push_back(c.metrics.accuracy);
      prec.push_back(c.metrics.precision);
      rec.push_back(c.metrics.recall);
      f1.push_back(c.metrics.f1);
    }
    report.summaries.push_back({kind, range_of(acc), range_of(prec), range_of(rec), range_of(f1)});
  }
}

Json range_json(const MetricRange& r) { return {{"min", r.min}, {"max", r.max}, {"mean", r.mean}}; }

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

ExperimentReport run_experiment(const Dataset& dataset, const ExperimentConfig& config,
                                const CellObserver& observer) {
  if (dataset.size() == 0) throw DomainError("run_experiment: empty dataset");
  if (config.shuffle_seeds.empty() || config.models.empty()) {
    throw DomainError("run_experiment: need at least one seed and one model");
  }
  for (std::size_t i = 0; i < config.shuffle_seeds.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (config.shuffle_seeds[i] == config.shuffle_seeds[j]) {
        throw DomainError("run_experiment: shuffle seeds must be distinct");
      }
    }
  }

  const Matrix X = dataset.features();
  const Labels y = dataset.labels();
  const std::size_t n_shuffles = config.shuffle_seeds.size();
  const std::size_t n_models = config.models.size();

  struct Prepared {
    Split split;
    Matrix train_x, test_x;
    Labels train_y, test_y;
  };
  std::vector<Prepared> prepared(n_shuffles);
  ExperimentReport report;
  report.dataset_digest = dataset.config_digest;
  report.config_digest = digest(experiment_config_json(config));
  for (std::size_t s = 0; s < n_shuffles; ++s) {
    Prepared& p = prepared[s];
    p.split = shuffle_split(dataset.size(), config.shuffle_seeds[s], config.train_fraction);
    const Scaler scaler = fit_scaler(X.select_rows(p.split.train));
    p.train_x = scaler.apply(X.select_rows(p.split.train));
    p.test_x = scaler.apply(X.select_rows(p.split.test));
    for (std::size_t i : p.split.train) p.train_y.push_back(y[i]);
    for (std::size_t i : p.split.test) p.test_y.push_back(y[i]);
    report.distributions.push_back(distribution_report(dataset, p.split));
  }

  report.cells.resize(n_shuffles * n_models);
  ModelConfigs configs = config.model_configs;
  const std::size_t cell_count = n_shuffles * n_models;
  const std::size_t outer = std::min(config.workers, cell_count);
  configs.rf.workers = outer <= 1 ? std::max<std::size_t>(1, config.workers) : 1;
  std::mutex observer_mutex;
  parallel_for(cell_count, config.workers, [&](std::size_t k) {
    const std::size_t s = k / n_models;
    const ModelKind kind = config.models[k % n_models];
    const Prepared& p = prepared[s];
    ExperimentCell cell;
    cell.shuffle = s + 1;
    cell.seed = config.shuffle_seeds[s];
    cell.model = kind;
    TrainedModel model;
    try {
      model = train_model(kind, configs, p.train_x, p.train_y);
    } catch (const DomainError& e) {
      throw DomainError("shuffle " + std::to_string(s + 1) + " / " + to_string(kind) + ": " +
                        e.what());
    }
    cell.confusion = confusion(predict_labels(model, p.test_x), p.test_y);
    cell.metrics = metrics(cell.confusion);
    report.cells[k] = cell;
    if (observer) {
      std::lock_guard lock(observer_mutex);
      observer(cell, model);
    }
  });
  summarize(report, config.models);
  return report;
}

Json experiment_config_json(const ExperimentConfig& config) {
  Json models = Json::array();
  Json hyper = Json::object();
  for (ModelKind k : config.models) {
    models.push_back(to_string(k));
    hyper[to_string(k)] = hyperparams_json(k, config.model_configs);
  }
  return {{"shuffle_seeds", config.shuffle_seeds},
          {"models", models},
          {"train_fraction", config.train_fraction},
          {"hyperparams", hyper}};
}

Json to_json(const ConfusionMatrix& cm) {
  return {{"tn", cm.tn}, {"fp", cm.fp}, {"fn", cm.fn}, {"tp", cm.tp}};
}

Json to_json(const MetricSet& m) {
  Json out = {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
  Json undefined = Json::array();
  if (m.precision_undefined) undefined.push_back("precision");
  if (m.recall_undefined) undefined.push_back("recall");
  if (m.f1_undefined) undefined.push_back("f1");
  out["undefined"] = undefined;
  return out;
}

Json to_json(const ExperimentReport& report) {
  Json cells = Json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"shuffle", c.shuffle},
                     {"seed", c.seed},
                     {"model", to_string(c.model)},
                     {"confusion", to_json(c.confusion)},
                     {"metrics", to_json(c.metrics)}});
  }
  Json summaries = Json::array();
  for (const auto& s : report.summaries) {
    summaries.push_back({{"model", to_string(s.model)},
                         {"accuracy", range_json(s.accuracy)},
                         {"precision", range_json(s.precision)},
                         {"recall", range_json(s.recall)},
                         {"f1", range_json(s.f1)}});
  }
  Json distributions = Json::array();
  for (const auto& d : report.distributions) distributions.push_back(to_json(d));
  return {{"tool_version", kVersion},
          {"dataset_digest", report.dataset_digest},
          {"config_digest", report.config_digest},
          {"cells", cells},
          {"summaries", summaries},
          {"distributions", distributions}};
}

ExperimentReport report_from_json(const Json& doc) {
  try {
    ExperimentReport report;
    report.dataset_digest = doc.value("dataset_digest", std::string{});
    report.config_digest = doc.value("config_digest", std::string{});
    std::vector<ModelKind> models;
    for (const auto& c : doc.at("cells")) {
      ExperimentCell cell;
      cell.shuffle = c.at("shuffle").get<std::size_t>();
      cell.seed = c.value("seed", std::uint64_t{0});
      cell.model = parse_model_kind(c.at("model").get<std::string>());
      const auto& cm = c.at("confusion");
      cell.confusion = {cm.at("tn").get<std::size_t>(), cm.at("fp").get<std::size_t>(),
                        cm.at("fn").get<std::size_t>(), cm.at("tp").get<std::size_t>()};
      cell.metrics = metrics(cell.confusion);
      if (std::find(models.begin(), models.end(), cell.model) == models.end()) {
        models.push_back(cell.model);
      }
      report.cells.push_back(cell);
    }
    summarize(report, models);
    return report;
  } catch (const Json::exception& e) {
    throw IoError(std::string("report: ") + e.what());
  } catch (const DomainError& e) {
    throw IoError(std::string("report: ") + e.what());
  }
}

std::string render_report_table(const ExperimentReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-6s %-8s %-22s %9s %9s %9s %9s\n", "Model", "Shuffle",
                "Confusion [[TN,FP],[FN,TP]]", "Accuracy", "Precision", "Recall", "F1");
  out << line;
  out << std::string(77, '-') << '\n';
  for (const auto& summary : report.summaries) {
    for (const auto& c : report.cells) {
      if (c.model != summary.model) continue;
      const std::string cm = "[[" + std::to_string(c.confusion.tn) + "," +
                             std::to_string(c.confusion.fp) + "],[" +
                             std::to_string(c.confusion.fn) + "," +
                             std::to_string(c.confusion.tp) + "]]";
      std::snprintf(line, sizeof line, "%-6s %-8zu %-22s %9s %9s %9s %9s\n",
                    to_string(c.model).c_str(), c.shuffle, cm.c_str(),
                    fixed3(c.metrics.accuracy).c_str(), fixed3(c.metrics.precision).c_str(),
                    fixed3(c.metrics.recall).c_str(), fixed3(c.metrics.f1).c_str());
      out << line;
    }
  }
  out << std::string(77, '-') << '\n';
  for (const auto& s : report.summaries) {
    out << to_string(s.model) << " accuracy " << fixed3(s.accuracy.min) << "-"
        << fixed3(s.accuracy.max) << " (mean " << fixed3(s.accuracy.mean) << ")\n";
  }
  return out.str();
}

std::vector<std::filesystem::path> write_metric_bars(const ExperimentReport& report,
                                                     const std::filesystem::path& dir) {
  if (report.cells.empty()) throw DomainError("report has no cells to plot");
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const char* names[] = {"accuracy", "precision", "recall", "f1"};
  for (int k = 0; k < 4; ++k) {
    const auto path = dir / (std::string(names[k]) + ".csv");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "# eepred metric_bars metric=" << names[k] << " config_digest=" << report.config_digest
        << " dataset_digest=" << report.dataset_digest << '\n';
    out << "model,shuffle,value\n";
    for (const auto& s : report.summaries) {
      for (const auto& c : report.cells) {
        if (c.model != s.model) continue;
        const double values[] = {c.metrics.accuracy, c.metrics.precision, c.metrics.recall,
                                 c.metrics.f1};
        out << to_string(c.model) << ',' << c.shuffle << ',' << format_double(values[k]) << '\n';
      }
    }
    if (!out) throw IoError("failed writing " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace eepred
