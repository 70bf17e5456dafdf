#include "eepred/logistic.hpp"

#include <algorithm>
#include <cmath>

#include "eepred/activation.hpp"

namespace eepred {

double LRModel::linear_score(std::span<const double> x) const {
  if (x.size() != weights.size()) throw DomainError("LR input width does not match the model");
  double z = intercept;
  for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * x[j];
  return z;
}

LRModel lr_train(const Matrix& X, const Labels& y, const LRConfig& config) {
  check_training_data(X, y);
  if (!(config.threshold > 0.0 && config.threshold < 1.0)) {
    throw DomainError("LR threshold must lie in (0, 1)");
  }
  if (!(config.learning_rate > 0.0)) throw DomainError("LR learning rate must be positive");

  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  LRModel model;
  model.weights.assign(d, 0.0);
  model.threshold = config.threshold;

  std::vector<double> grad(d);
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    double grad_b = 0.0;
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = X.row(i);
      const double residual = sigmoid(model.linear_score(x)) - y[i];
      grad_b += residual;
      for (std::size_t j = 0; j < d; ++j) grad[j] += residual * x[j];
    }
    double norm = std::abs(grad_b) / n;
    for (double& g : grad) {
      g /= n;
      norm = std::max(norm, std::abs(g));
    }
    if (norm < config.tolerance) break;
    model.intercept -= config.learning_rate * grad_b / n;
    for (std::size_t j = 0; j < d; ++j) model.weights[j] -= config.learning_rate * grad[j];
    model.iterations = it + 1;
  }
  return model;
}

Prediction lr_predict(const LRModel& model, std::span<const double> x) {
  const double p = sigmoid(model.linear_score(x));
  return {p, p > model.threshold ? 1 : 0};
}

}  // namespace eepred
