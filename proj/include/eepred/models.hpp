#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "eepred/forest.hpp"
#include "eepred/logistic.hpp"
#include "eepred/mlp.hpp"
#include "eepred/serialize.hpp"
#include "eepred/svm.hpp"

namespace eepred {

enum class ModelKind { kLR, kSVM, kRF, kMLP };

inline constexpr std::array<ModelKind, 4> kAllModels{ModelKind::kLR, ModelKind::kSVM,
                                                     ModelKind::kRF, ModelKind::kMLP};

std::string to_string(ModelKind kind);  // "LR", "SVM", "RF", "MLP"
ModelKind parse_model_kind(std::string_view name);  // case-insensitive; throws DomainError

struct ModelConfigs {
  LRConfig lr;
  SVMConfig svm;
  RFConfig rf;
  MLPConfig mlp;
};

using ModelParameters = std::variant<LRModel, SVMModel, RFModel, MLPModel>;

struct TrainedModel {
  ModelKind kind = ModelKind::kLR;
  Json hyperparams = Json::object();
  std::uint64_t seed = 0;
  ModelParameters parameters;
  std::optional<TrainLog> log;  // MLP only
};

TrainedModel train_model(ModelKind kind, const ModelConfigs& configs, const Matrix& X,
                         const Labels& y);
Prediction predict(const TrainedModel& model, std::span<const double> x);
Labels predict_labels(const TrainedModel& model, const Matrix& X);

Json hyperparams_json(ModelKind kind, const ModelConfigs& configs);
ModelConfigs model_configs_from_json(const Json& doc, ModelConfigs base = {});

// Versioned envelope {format_version, model_type, hyperparams, seed, parameters}.
Json to_json(const TrainedModel& model);
TrainedModel model_from_json(const Json& doc);  // throws IoError when malformed

void write_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel read_model(const std::filesystem::path& path);

// Columns epoch,loss,train_accuracy preceded by a '#' metadata line.
void write_train_log_csv(const std::filesystem::path& path, const TrainLog& log,
                         std::string_view config_digest = {});
TrainLog read_train_log_csv(const std::filesystem::path& path);

}  // namespace eepred
