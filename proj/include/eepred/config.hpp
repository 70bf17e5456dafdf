#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "eepred/datagen.hpp"
#include "eepred/eval.hpp"
#include "eepred/serialize.hpp"

namespace eepred {

// Everything a reproducible run needs. The defaults are the full-size
// experiment; desk_scale() shrinks it for quick runs.
struct RunConfig {
  SystemParams system;  // f, epsilon, delta used by `simulate`
  SimConfig sim;
  QualifierConfig qualifier{Observable::kPosition, 1e-6, FewPeaksPolicy::kNonExtreme};

  // Labeling horizon for generated data; the remaining integrator settings
  // come from `sim`.
  double data_t_end = 50000.0;
  double data_t_transient = 2500.0;
  RangeTable ranges = default_ranges();
  std::size_t quota = 50;
  std::size_t max_attempts = 20000;
  std::uint64_t data_seed = 2022;

  std::vector<std::uint64_t> shuffle_seeds{1, 2, 3, 4, 5};
  std::vector<ModelKind> models{kAllModels.begin(), kAllModels.end()};
  ModelConfigs model_configs;
  double train_fraction = 0.75;

  std::string output_dir = "out";

  // Not part of the document: results never depend on it.
  std::size_t workers = 1;

  GenerationConfig generation() const;
  ExperimentConfig experiment() const;
};

void apply_desk_scale(RunConfig& config);

Json to_json(const RunConfig& config);
// Overlays `doc` on `base`. Unknown keys and ill-typed values throw
// DomainError naming the key.
RunConfig run_config_from_json(const Json& doc, RunConfig base = {});
std::string config_digest(const RunConfig& config);

RunConfig read_run_config(const std::filesystem::path& path, RunConfig base = {});
void write_run_config(const std::filesystem::path& path, const RunConfig& config);

// `assignment` is "dotted.key=value"; the value is parsed as JSON and taken
// as a plain string when that fails.
void apply_override(RunConfig& config, std::string_view assignment);

}  // namespace eepred
