#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eepred/matrix.hpp"
#include "eepred/prediction.hpp"

namespace eepred {

// 3 inputs, hidden widths 8-16-32-32-32-16-8, one sigmoid output.
inline const std::vector<std::size_t> kDefaultLayers{3, 8, 16, 32, 32, 32, 16, 8, 1};

// Fully connected ReLU network with a sigmoid output unit. All weights and
// biases live in one flat vector: for each layer l = 1..L-1 the row-major
// W^(l,l-1) (out x in) followed by b^(l).
class MLPModel {
 public:
  MLPModel() = default;
  // Zero-initialized. Throws DomainError unless there are at least two
  // layers, all widths are positive and the last is 1.
  explicit MLPModel(std::vector<std::size_t> layer_sizes);

  // Uniform Glorot initialization (biases zero) under `seed`.
  static MLPModel glorot(std::vector<std::size_t> layer_sizes, std::uint64_t seed);

  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t n_layers() const { return sizes_.size(); }
  std::size_t n_params() const { return params_.size(); }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  // Layer l in 1..L-1.
  std::span<double> weights(std::size_t l);
  std::span<const double> weights(std::size_t l) const;
  std::span<double> biases(std::size_t l);
  std::span<const double> biases(std::size_t l) const;
  std::size_t weight_offset(std::size_t l) const { return offsets_[l - 1]; }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

struct ForwardPass {
  double probability = 0.5;
  // pre[l], post[l] for l = 0..L-1; pre[0] is unused and post[0] = x.
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;
};

ForwardPass mlp_forward(const MLPModel& model, std::span<const double> x);
Prediction mlp_predict(const MLPModel& model, std::span<const double> x);

// Mean binary cross-entropy with probabilities clipped into
// [1e-7, 1 - 1e-7]. Throws DomainError on a length mismatch.
double bce_loss(std::span<const double> probabilities, std::span<const int> labels);
inline constexpr double kProbabilityClip = 1e-7;

struct GradientResult {
  std::vector<double> gradient;  // same layout as MLPModel::params()
  double loss = 0.0;
  std::size_t correct = 0;  // predictions matching labels before any update
};

// Exact gradient of the mean loss over the rows of `batch` (or the subset
// `rows` of it).
GradientResult mlp_grad(const MLPModel& model, const Matrix& batch, const Labels& labels);
GradientResult mlp_grad(const MLPModel& model, const Matrix& X, const Labels& y,
                        std::span<const std::size_t> rows);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// One bias-corrected update in place. Throws DomainError on size mismatch.
void adam_step(std::span<double> params, std::span<const double> gradient, AdamState& state,
               const AdamConfig& config = {});

struct MLPConfig {
  std::vector<std::size_t> layers = kDefaultLayers;
  std::size_t epochs = 100;
  std::size_t batch_size = 10;
  AdamConfig adam;
  std::uint64_t seed = 11;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double train_accuracy = 0.0;
};

// Epoch loss and accuracy aggregate the mini-batch forward passes made while
// training (each batch evaluated just before its update).
using TrainLog = std::vector<EpochRecord>;

struct MLPTrainResult {
  MLPModel model;
  TrainLog log;
};

// Initialization and the per-epoch mini-batch order derive from `seed`.
MLPTrainResult mlp_train(const Matrix& X, const Labels& y, const MLPConfig& config = {});

}  // namespace eepred
