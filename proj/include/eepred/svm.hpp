#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "eepred/matrix.hpp"
#include "eepred/prediction.hpp"

namespace eepred {

// exp(-|xi - xj|^2 / (2 S^2)). Throws DomainError unless width > 0.
double rbf_kernel(std::span<const double> xi, std::span<const double> xj, double width);

struct SVMConfig {
  double C = 1.0;
  // Kernel width S. When unset, 1/(2 S^2) = 1/(n_features * var(X)) with the
  // variance taken over every entry of the training matrix.
  std::optional<double> width;
  double tolerance = 1e-3;  // maximal KKT violation at exit
  std::size_t max_iterations = 1000000;
};

struct SVMModel {
  Matrix support_vectors;
  std::vector<double> dual_coef;  // alpha_i * y_i, y in {-1, +1}
  double bias = 0.0;
  double width = 1.0;
  double C = 1.0;
  std::size_t iterations = 0;
  double kkt_violation = 0.0;

  // Throws DomainError for an empty support set or coefficients outside the
  // box; every loaded or trained model passes through here.
  void validate() const;
  double decision(std::span<const double> x) const;
};

double default_svm_width(const Matrix& X);

// SMO on the dual with second-order working set selection. Labels are
// given in {0, 1} and mapped to {-1, +1} internally. Throws
// ConvergenceError when max_iterations is reached first.
SVMModel svm_train(const Matrix& X, const Labels& y, const SVMConfig& config = {});

// label 1 iff decision > 0.
Prediction svm_predict(const SVMModel& model, std::span<const double> x);

}  // namespace eepred
