#include "eepred/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace eepred {

namespace {

constexpr double kTau = 1e-12;

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

}  // namespace

double rbf_kernel(std::span<const double> xi, std::span<const double> xj, double width) {
  if (!(width > 0.0)) throw DomainError("RBF kernel width must be positive");
  if (xi.size() != xj.size()) throw DomainError("RBF kernel inputs differ in length");
  return std::exp(-squared_distance(xi, xj) / (2.0 * width * width));
}

double default_svm_width(const Matrix& X) {
  const auto& data = X.data();
  if (data.empty()) throw DomainError("cannot derive a kernel width from empty data");
  double mean = 0.0;
  for (double v : data) mean += v;
  mean /= data.size();
  double var = 0.0;
  for (double v : data) var += (v - mean) * (v - mean);
  var /= data.size();
  if (!(var > 0.0)) throw DegenerateTrainingError("training features have zero variance");
  // 1/(2 S^2) = 1/(d var)
  return std::sqrt(0.5 * X.cols() * var);
}

void SVMModel::validate() const {
  if (support_vectors.rows() == 0 || dual_coef.empty()) {
    throw DomainError("SVM model has an empty support set");
  }
  if (support_vectors.rows() != dual_coef.size()) {
    throw DomainError("SVM support vectors and coefficients differ in count");
  }
  if (!(width > 0.0) || !(C > 0.0)) throw DomainError("SVM width and C must be positive");
  for (double c : dual_coef) {
    if (!std::isfinite(c) || c == 0.0 || std::abs(c) > C) {
      throw DomainError("SVM coefficient outside (0, C]");
    }
  }
  if (!std::isfinite(bias)) throw DomainError("SVM bias is not finite");
}

double SVMModel::decision(std::span<const double> x) const {
  if (x.size() != support_vectors.cols()) throw DomainError("SVM input width does not match the model");
  double s = 0.0;
  for (std::size_t i = 0; i < dual_coef.size(); ++i) {
    s += dual_coef[i] * rbf_kernel(support_vectors.row(i), x, width);
  }
  return s + bias;
}

SVMModel svm_train(const Matrix& X, const Labels& labels, const SVMConfig& config) {
  check_training_data(X, labels);
  if (!(config.C > 0.0)) throw DomainError("SVM C must be positive");
  const double width = config.width ? *config.width : default_svm_width(X);
  if (!(width > 0.0)) throw DomainError("SVM width must be positive");

  const std::size_t n = X.rows();
  const double C = config.C;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == 1 ? 1.0 : -1.0;

  std::vector<double> Q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    Q[i * n + i] = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      const double q = y[i] * y[j] * rbf_kernel(X.row(i), X.row(j), width);
      Q[i * n + j] = q;
      Q[j * n + i] = q;
    }
  }

  std::vector<double> alpha(n, 0.0);
  std::vector<double> G(n, -1.0);
  auto in_up = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
  };
  auto in_low = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C);
  };

  std::size_t iter = 0;
  double violation = std::numeric_limits<double>::infinity();
  for (;;) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * G[t] > gmax) {
        gmax = -y[t] * G[t];
        i = t;
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      gmax2 = std::max(gmax2, y[t] * G[t]);
      if (i == n) continue;
      const double b = gmax + y[t] * G[t];
      if (b <= 0.0) continue;
      double a = Q[i * n + i] + Q[t * n + t] - 2.0 * y[i] * y[t] * Q[i * n + t];
      if (a <= 0.0) a = kTau;
      if (-(b * b) / a < best) {
        best = -(b * b) / a;
        j = t;
      }
    }
    violation = gmax + gmax2;
    if (violation < config.tolerance || j == n) break;
    if (iter >= config.max_iterations) {
      throw ConvergenceError("SMO did not converge in " + std::to_string(iter) + " iterations",
                             violation);
    }
    ++iter;

    const double old_i = alpha[i];
    const double old_j = alpha[j];
    const double Qii = Q[i * n + i];
    const double Qjj = Q[j * n + j];
    const double Qij = Q[i * n + j];
    if (y[i] != y[j]) {
      double quad = Qii + Qjj + 2.0 * Qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = Qii + Qjj - 2.0 * Qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }

    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) G[t] += Q[t * n + i] * di + Q[t * n + j] * dj;
  }

  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      free_sum += yg;
    }
  }
  const double rho = n_free > 0 ? free_sum / n_free : 0.5 * (ub + lb);

  SVMModel model;
  model.support_vectors = Matrix(0, X.cols());
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      model.support_vectors.append_row(X.row(t));
      model.dual_coef.push_back(alpha[t] * y[t]);
    }
  }
  model.bias = -rho;
  model.width = width;
  model.C = C;
  model.iterations = iter;
  model.kkt_violation = violation;
  model.validate();
  return model;
}

Prediction svm_predict(const SVMModel& model, std::span<const double> x) {
  const double d = model.decision(x);
  return {d, d > 0.0 ? 1 : 0};
}

}  // namespace eepred
