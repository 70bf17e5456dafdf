#pragma once

#include <span>

#include "eepred/error.hpp"
#include "eepred/matrix.hpp"

namespace eepred {

// Score is model specific: a probability (LR, MLP), a decision value (SVM)
// or the fraction of trees voting extreme (RF).
struct Prediction {
  double score = 0.0;
  int label = 0;
};

// Shared precondition of every trainer: equal lengths, labels in {0, 1},
// and both classes present. Throws DegenerateTrainingError.
void check_training_data(const Matrix& X, const Labels& y);

}  // namespace eepred
