#include "eepred/prediction.hpp"

#include <string>

namespace eepred {

void check_training_data(const Matrix& X, const Labels& y) {
  if (X.rows() != y.size()) {
    throw DomainError("feature rows (" + std::to_string(X.rows()) + ") and labels (" +
                      std::to_string(y.size()) + ") differ in length");
  }
  if (X.cols() == 0) throw DegenerateTrainingError("training data has no features");
  std::size_t positives = 0;
  for (int label : y) {
    if (label != 0 && label != 1) {
      throw DomainError("labels must be 0 or 1, got " + std::to_string(label));
    }
    positives += static_cast<std::size_t>(label);
  }
  if (positives == 0 || positives == y.size()) {
    throw DegenerateTrainingError("training labels contain a single class");
  }
}

}  // namespace eepred
