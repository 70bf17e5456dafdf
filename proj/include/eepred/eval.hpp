#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eepred/datagen.hpp"
#include "eepred/models.hpp"

namespace eepred {

// Positive class is extreme (1). Displayed as [[TN, FP], [FN, TP]].
struct ConfusionMatrix {
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tp = 0;

  std::size_t total() const { return tn + fp + fn + tp; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricSet {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Set when the ratio had a zero denominator and was reported as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
};

// Throws DomainError on a length mismatch or labels outside {0, 1}.
ConfusionMatrix confusion(std::span<const int> predicted, std::span<const int> actual);

// Throws DomainError for an empty matrix.
MetricSet metrics(const ConfusionMatrix& cm);

struct ExperimentConfig {
  std::vector<std::uint64_t> shuffle_seeds{1, 2, 3, 4, 5};
  std::vector<ModelKind> models{kAllModels.begin(), kAllModels.end()};
  ModelConfigs model_configs;
  double train_fraction = 0.75;
  std::size_t workers = 1;
};

struct ExperimentCell {
  std::size_t shuffle = 0;  // 1-based position in shuffle_seeds
  std::uint64_t seed = 0;
  ModelKind model = ModelKind::kLR;
  ConfusionMatrix confusion;
  MetricSet metrics;
};

struct MetricRange {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct ModelSummary {
  ModelKind model = ModelKind::kLR;
  MetricRange accuracy;
  MetricRange precision;
  MetricRange recall;
  MetricRange f1;
};

struct ExperimentReport {
  std::string dataset_digest;
  std::string config_digest;
  std::vector<ExperimentCell> cells;  // shuffle-major, models in config order
  std::vector<ModelSummary> summaries;
  std::vector<DistributionReport> distributions;  // one per shuffle

  const ExperimentCell& cell(std::size_t shuffle, ModelKind model) const;
  const ModelSummary& summary(ModelKind model) const;
};

// Hook invoked once per trained cell (for example to persist the model).
using CellObserver = std::function<void(const ExperimentCell&, const TrainedModel&)>;

// For each seed: split, fit the scaler on train, train every model, score
// the test rows. Cells run concurrently on `workers` threads; the report
// does not depend on scheduling. Training failures are rethrown as
// DomainError naming the cell.
ExperimentReport run_experiment(const Dataset& dataset, const ExperimentConfig& config,
                                const CellObserver& observer = {});

Json experiment_config_json(const ExperimentConfig& config);
Json to_json(const ConfusionMatrix& cm);
Json to_json(const MetricSet& m);
Json to_json(const ExperimentReport& report);

// Aligned text table with three-decimal metrics.
std::string render_report_table(const ExperimentReport& report);

// One CSV per metric (accuracy.csv, ...) with rows model,shuffle,value.
// Throws DomainError when the report has no cells.
std::vector<std::filesystem::path> write_metric_bars(const ExperimentReport& report,
                                                     const std::filesystem::path& dir);

ExperimentReport report_from_json(const Json& doc);  // throws IoError when malformed

}  // namespace eepred
