#include <doctest.h>

#include <cmath>

#include "eepred/activation.hpp"
#include "eepred/error.hpp"
#include "eepred/logistic.hpp"
#include "eepred/random.hpp"
#include "eepred/svm.hpp"

using namespace eepred;

namespace {

struct Blobs {
  Matrix X{0, 3};
  Labels y;
};

Blobs two_blobs(std::uint64_t seed, std::size_t n, double separation) {
  Rng rng(seed);
  Blobs b;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    const double shift = label ? separation : -separation;
    const double row[3] = {rng.uniform(-1, 1) + shift, rng.uniform(-1, 1), rng.uniform(-1, 1) - shift};
    b.X.append_row(row);
    b.y.push_back(label);
  }
  return b;
}

}  // namespace

TEST_CASE("sigmoid") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(std::abs(sigmoid(50.0) - 1.0) < 1e-15);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(-800.0) < 1e-300);
  CHECK(sigmoid(1.0) == doctest::Approx(0.7310585786300049).epsilon(1e-15));
  CHECK(sigmoid(-1.0) == doctest::Approx(1.0 - 0.7310585786300049).epsilon(1e-15));
}

TEST_CASE("relu") {
  CHECK(relu(-1.0) == 0.0);
  CHECK(relu(0.0) == 0.0);
  CHECK(relu(2.5) == 2.5);
  CHECK(relu_grad(0.0) == 0.0);
  CHECK(relu_grad(1e-9) == 1.0);
}

TEST_CASE("LR separates a one-feature toy set") {
  const Matrix X{{-1.0}, {1.0}};
  const Labels y{0, 1};
  const LRModel m = lr_train(X, y);
  CHECK(lr_predict(m, X.row(0)).label == 0);
  CHECK(lr_predict(m, X.row(1)).label == 1);
  CHECK(m.weights[0] > 0.0);
}

TEST_CASE("LR prediction conventions") {
  LRModel zero;
  zero.weights = {0, 0, 0};
  const double x[3] = {4, -2, 7};
  const Prediction p = lr_predict(zero, x);
  CHECK(p.score == 0.5);
  CHECK(p.label == 0);

  LRModel shifted = zero;
  shifted.intercept = 10.0;
  const double origin[3] = {0, 0, 0};
  CHECK(lr_predict(shifted, origin).label == 1);

  LRModel unit = zero;
  unit.weights = {1, 0, 0};
  const double two[3] = {2, 5, -5};
  CHECK(lr_predict(unit, two).score == doctest::Approx(0.8807970779778823).epsilon(1e-15));
}

TEST_CASE("LR rejects degenerate data") {
  const Matrix X{{1.0}, {2.0}, {3.0}};
  CHECK_THROWS_AS(lr_train(X, Labels{0, 0, 0}), DegenerateTrainingError);
  CHECK_THROWS_AS(lr_train(X, Labels{1, 1, 1}), DegenerateTrainingError);
  CHECK_THROWS_AS(lr_train(X, Labels{0, 1}), DomainError);
  CHECK_THROWS_AS(lr_train(X, Labels{0, 1, 2}), DomainError);
}

TEST_CASE("LR probability is monotone in the linear score") {
  const Blobs b = two_blobs(3, 200, 0.6);
  const LRModel m = lr_train(b.X, b.y);
  CHECK(m.iterations > 0);
  for (std::size_t i = 0; i < b.X.rows(); ++i) {
    for (std::size_t j = 0; j < b.X.rows(); j += 17) {
      const double si = m.linear_score(b.X.row(i));
      const double sj = m.linear_score(b.X.row(j));
      const double pi = lr_predict(m, b.X.row(i)).score;
      const double pj = lr_predict(m, b.X.row(j)).score;
      if (si < sj) CHECK(pi <= pj);
    }
    CHECK((lr_predict(m, b.X.row(i)).label == 1) == (m.linear_score(b.X.row(i)) > 0.0));
  }
}

TEST_CASE("LR training is deterministic") {
  const Blobs b = two_blobs(4, 100, 0.3);
  const LRModel a = lr_train(b.X, b.y);
  const LRModel c = lr_train(b.X, b.y);
  CHECK(a.weights == c.weights);
  CHECK(a.intercept == c.intercept);
}

TEST_CASE("RBF kernel") {
  const double a[3] = {0, 0, 0};
  const double b[3] = {1, 0, 0};
  const double far[3] = {20, 0, 0};
  CHECK(rbf_kernel(a, a, 1.0) == 1.0);
  CHECK(rbf_kernel(a, b, 1.0) == doctest::Approx(0.6065306597126334).epsilon(1e-15));
  CHECK(rbf_kernel(a, far, 1.0) < 1e-80);
  CHECK_THROWS_AS(rbf_kernel(a, b, 0.0), DomainError);
  CHECK_THROWS_AS(rbf_kernel(a, b, -1.0), DomainError);
}

TEST_CASE("SVM symmetric two-point problem") {
  const Matrix X{{1, 0, 0}, {-1, 0, 0}};
  const Labels y{1, 0};
  SVMConfig c;
  c.C = 1.0;
  c.width = 1.0;
  const SVMModel m = svm_train(X, y, c);
  REQUIRE(m.support_vectors.rows() == 2);
  CHECK(m.dual_coef[0] == 1.0);
  CHECK(m.dual_coef[1] == -1.0);
  CHECK(m.bias == 0.0);
  const double origin[3] = {0, 0, 0};
  const Prediction at_origin = svm_predict(m, origin);
  CHECK(at_origin.score == 0.0);
  CHECK(at_origin.label == 0);
  CHECK(svm_predict(m, X.row(0)).label == 1);
  CHECK(svm_predict(m, X.row(0)).score == doctest::Approx(0.8646647167633873).epsilon(1e-14));
  CHECK(svm_predict(m, X.row(1)).label == 0);
}

TEST_CASE("SVM dual feasibility") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Blobs b = two_blobs(seed, 150, 0.2 * seed);
    const SVMModel m = svm_train(b.X, b.y);
    double sum = 0.0;
    for (double c : m.dual_coef) {
      CHECK(std::abs(c) > 0.0);
      CHECK(std::abs(c) <= m.C);
      sum += c;
    }
    CHECK(std::abs(sum) < 1e-6);
    CHECK(m.kkt_violation < 1e-3);
  }
}

TEST_CASE("SVM on duplicated data keeps the decision sign") {
  auto duplicate = [](const Blobs& b) {
    Blobs out;
    for (std::size_t i = 0; i < b.X.rows(); ++i) {
      out.X.append_row(b.X.row(i));
      out.X.append_row(b.X.row(i));
      out.y.push_back(b.y[i]);
      out.y.push_back(b.y[i]);
    }
    return out;
  };

  SUBCASE("separable data without bound multipliers") {
    const Blobs b = two_blobs(9, 60, 2.0);
    SVMConfig c;
    c.C = 100.0;
    c.width = 2.0;
    const SVMModel m1 = svm_train(b.X, b.y, c);
    for (double a : m1.dual_coef) REQUIRE(std::abs(a) < c.C);
    const Blobs d = duplicate(b);
    const SVMModel m2 = svm_train(d.X, d.y, c);
    for (std::size_t i = 0; i < b.X.rows(); ++i) {
      CHECK(svm_predict(m1, b.X.row(i)).label == svm_predict(m2, b.X.row(i)).label);
      CHECK(svm_predict(m1, b.X.row(i)).label == b.y[i]);
    }
  }

  SUBCASE("overlapping data with the box halved") {
    const Blobs b = two_blobs(9, 60, 0.5);
    SVMConfig c;
    c.width = default_svm_width(b.X);
    c.tolerance = 1e-8;
    const SVMModel m1 = svm_train(b.X, b.y, c);
    c.C = 0.5;
    const Blobs d = duplicate(b);
    const SVMModel m2 = svm_train(d.X, d.y, c);
    for (std::size_t i = 0; i < b.X.rows(); ++i) {
      const double d1 = svm_predict(m1, b.X.row(i)).score;
      const double d2 = svm_predict(m2, b.X.row(i)).score;
      CHECK(d1 == doctest::Approx(d2).epsilon(1e-5));
      if (std::abs(d1) > 1e-4) CHECK((d1 > 0) == (d2 > 0));
    }
  }
}

TEST_CASE("SVM default width") {
  const Matrix X{{1, -1}, {3, 1}};
  // all entries {1,-1,3,1}: variance 2, so 1/(2 S^2) = 1/(2 * 2)
  CHECK(default_svm_width(X) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("SVM errors") {
  const Matrix X{{1, 0, 0}, {-1, 0, 0}};
  CHECK_THROWS_AS(svm_train(X, Labels{1, 1}), DegenerateTrainingError);
  const Blobs b = two_blobs(5, 80, 0.0);
  SVMConfig c;
  c.max_iterations = 1;
  CHECK_THROWS_AS(svm_train(b.X, b.y, c), ConvergenceError);
  SVMModel empty;
  CHECK_THROWS_AS(empty.validate(), DomainError);
}
