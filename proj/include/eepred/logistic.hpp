#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "eepred/matrix.hpp"
#include "eepred/prediction.hpp"

namespace eepred {

struct LRConfig {
  double learning_rate = 0.1;
  double tolerance = 1e-6;  // on the gradient infinity-norm
  std::size_t max_iterations = 10000;
  double threshold = 0.5;
};

struct LRModel {
  std::vector<double> weights;
  double intercept = 0.0;
  double threshold = 0.5;
  std::size_t iterations = 0;

  // f(X) = b0 + b . x
  double linear_score(std::span<const double> x) const;
};

// Full-batch gradient descent on mean binary cross-entropy, from zero
// weights.
LRModel lr_train(const Matrix& X, const Labels& y, const LRConfig& config = {});

// probability = sigmoid(f(X)); label 1 iff probability > threshold.
Prediction lr_predict(const LRModel& model, std::span<const double> x);

}  // namespace eepred
