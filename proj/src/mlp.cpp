#include "eepred/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "eepred/activation.hpp"
#include "eepred/random.hpp"

namespace eepred {

MLPModel::MLPModel(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw DomainError("MLP needs at least an input and an output layer");
  for (std::size_t s : sizes_) {
    if (s == 0) throw DomainError("MLP layer widths must be positive");
  }
  if (sizes_.back() != 1) throw DomainError("MLP output layer must have width 1");
  std::size_t offset = 0;
  for (std::size_t l = 1; l < sizes_.size(); ++l) {
    offsets_.push_back(offset);
    offset += sizes_[l] * sizes_[l - 1] + sizes_[l];
  }
  params_.assign(offset, 0.0);
}

MLPModel MLPModel::glorot(std::vector<std::size_t> layer_sizes, std::uint64_t seed) {
  MLPModel model(std::move(layer_sizes));
  Rng rng(seed);
  for (std::size_t l = 1; l < model.n_layers(); ++l) {
    const double fan = static_cast<double>(model.sizes_[l] + model.sizes_[l - 1]);
    const double limit = std::sqrt(6.0 / fan);
    for (double& w : model.weights(l)) w = rng.uniform(-limit, limit);
  }
  return model;
}

std::span<double> MLPModel::weights(std::size_t l) {
  return {params_.data() + offsets_.at(l - 1), sizes_[l] * sizes_[l - 1]};
}
std::span<const double> MLPModel::weights(std::size_t l) const {
  return {params_.data() + offsets_.at(l - 1), sizes_[l] * sizes_[l - 1]};
}
std::span<double> MLPModel::biases(std::size_t l) {
  return {params_.data() + offsets_.at(l - 1) + sizes_[l] * sizes_[l - 1], sizes_[l]};
}
std::span<const double> MLPModel::biases(std::size_t l) const {
  return {params_.data() + offsets_.at(l - 1) + sizes_[l] * sizes_[l - 1], sizes_[l]};
}

ForwardPass mlp_forward(const MLPModel& model, std::span<const double> x) {
  const auto& sizes = model.layer_sizes();
  if (sizes.empty()) throw DomainError("MLP model is empty");
  if (x.size() != sizes[0]) {
    throw DomainError("MLP input width " + std::to_string(x.size()) + " does not match " +
                      std::to_string(sizes[0]));
  }
  const std::size_t L = sizes.size();
  ForwardPass pass;
  pass.pre.resize(L);
  pass.post.resize(L);
  pass.post[0].assign(x.begin(), x.end());
  for (std::size_t l = 1; l < L; ++l) {
    const auto W = model.weights(l);
    const auto b = model.biases(l);
    const auto& in = pass.post[l - 1];
    auto& z = pass.pre[l];
    auto& a = pass.post[l];
    z.resize(sizes[l]);
    a.resize(sizes[l]);
    for (std::size_t r = 0; r < sizes[l]; ++r) {
      double s = b[r];
      const double* w = W.data() + r * sizes[l - 1];
      for (std::size_t c = 0; c < sizes[l - 1]; ++c) s += w[c] * in[c];
      z[r] = s;
      a[r] = l + 1 == L ? sigmoid(s) : relu(s);
    }
  }
  pass.probability = pass.post[L - 1][0];
  return pass;
}

Prediction mlp_predict(const MLPModel& model, std::span<const double> x) {
  const double p = mlp_forward(model, x).probability;
  return {p, p > 0.5 ? 1 : 0};
}

double bce_loss(std::span<const double> probabilities, std::span<const int> labels) {
  if (probabilities.size() != labels.size()) {
    throw DomainError("bce_loss: probabilities and labels differ in length");
  }
  if (probabilities.empty()) throw DomainError("bce_loss: empty input");
  double total = 0.0;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const double p = std::clamp(probabilities[j], kProbabilityClip, 1.0 - kProbabilityClip);
    total -= labels[j] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return total / labels.size();
}

GradientResult mlp_grad(const MLPModel& model, const Matrix& batch, const Labels& labels) {
  std::vector<std::size_t> rows(batch.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return mlp_grad(model, batch, labels, rows);
}

GradientResult mlp_grad(const MLPModel& model, const Matrix& X, const Labels& y,
                        std::span<const std::size_t> rows) {
  if (rows.empty()) throw DomainError("mlp_grad: empty batch");
  if (X.rows() != y.size()) throw DomainError("mlp_grad: features and labels differ in length");
  const auto& sizes = model.layer_sizes();
  const std::size_t L = sizes.size();

  GradientResult result;
  result.gradient.assign(model.n_params(), 0.0);
  std::vector<double> probs;
  std::vector<int> batch_labels;
  probs.reserve(rows.size());
  batch_labels.reserve(rows.size());
  const double scale = 1.0 / rows.size();

  std::vector<double> delta, prev_delta;
  for (std::size_t r : rows) {
    const ForwardPass pass = mlp_forward(model, X.row(r));
    probs.push_back(pass.probability);
    batch_labels.push_back(y[r]);
    if ((pass.probability > 0.5 ? 1 : 0) == y[r]) ++result.correct;

    delta.assign(1, (pass.probability - y[r]) * scale);
    for (std::size_t l = L - 1; l >= 1; --l) {
      const std::size_t in = sizes[l - 1];
      const std::size_t off = model.weight_offset(l);
      double* gW = result.gradient.data() + off;
      double* gb = gW + sizes[l] * in;
      const auto& a = pass.post[l - 1];
      for (std::size_t o = 0; o < sizes[l]; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        gb[o] += d;
        double* row = gW + o * in;
        for (std::size_t c = 0; c < in; ++c) row[c] += d * a[c];
      }
      if (l == 1) break;
      const auto W = model.weights(l);
      prev_delta.assign(in, 0.0);
      for (std::size_t o = 0; o < sizes[l]; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        const double* w = W.data() + o * in;
        for (std::size_t c = 0; c < in; ++c) prev_delta[c] += w[c] * d;
      }
      const auto& z = pass.pre[l - 1];
      for (std::size_t c = 0; c < in; ++c) prev_delta[c] *= relu_grad(z[c]);
      std::swap(delta, prev_delta);
    }
  }
  result.loss = bce_loss(probs, batch_labels);
  return result;
}

void adam_step(std::span<double> params, std::span<const double> gradient, AdamState& state,
               const AdamConfig& config) {
  if (gradient.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw DomainError("adam_step: state and parameter sizes differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double g = gradient[k];
    state.m[k] = config.beta1 * state.m[k] + (1.0 - config.beta1) * g;
    state.v[k] = config.beta2 * state.v[k] + (1.0 - config.beta2) * g * g;
    const double m_hat = state.m[k] / c1;
    const double v_hat = state.v[k] / c2;
    params[k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

MLPTrainResult mlp_train(const Matrix& X, const Labels& y, const MLPConfig& config) {
  check_training_data(X, y);
  if (config.batch_size == 0) throw DomainError("MLP batch size must be positive");
  MLPTrainResult result{MLPModel::glorot(config.layers, derive_seed(config.seed, {0})), {}};
  MLPModel& model = result.model;
  if (model.layer_sizes().front() != X.cols()) {
    throw DomainError("MLP input width does not match the feature count");
  }

  const std::size_t n = X.rows();
  AdamState state(model.n_params());
  std::vector<std::size_t> order(n);
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(config.seed, {1, epoch}));
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      const std::span<const std::size_t> rows(order.data() + start, stop - start);
      const GradientResult g = mlp_grad(model, X, y, rows);
      loss_sum += g.loss * rows.size();
      correct += g.correct;
      adam_step(model.params(), g.gradient, state, config.adam);
    }
    result.log.push_back({epoch, loss_sum / n, static_cast<double>(correct) / n});
  }
  return result;
}

}  // namespace eepred
