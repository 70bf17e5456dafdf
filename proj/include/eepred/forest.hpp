#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eepred/matrix.hpp"
#include "eepred/prediction.hpp"
#include "eepred/random.hpp"

namespace eepred {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left iff x[feature] <= threshold
  int left = -1;
  int right = -1;
  std::array<std::uint32_t, 2> counts{};  // training labels reaching the node

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(std::span<const double> x) const;
  // Majority label of the leaf; ties go to 0.
  int predict(std::span<const double> x) const;
  std::size_t depth() const;
};

struct TreeConfig {
  std::size_t max_features = 0;  // 0 means all features
  std::size_t min_leaf = 1;
};

// CART with Gini impurity. At each node `max_features` features are drawn
// without replacement and the best midpoint threshold among them is taken
// (first best wins ties). Growth stops at purity, when no split leaves
// min_leaf samples on both sides, or when every feature is constant.
DecisionTree tree_train(const Matrix& X, const Labels& y, Rng& rng, const TreeConfig& config = {});
DecisionTree tree_train(const Matrix& X, const Labels& y, std::span<const std::size_t> sample,
                        Rng& rng, const TreeConfig& config = {});

struct RFConfig {
  std::size_t n_trees = 1000;
  std::size_t max_features = 0;  // 0 means ceil(sqrt(n_features))
  std::size_t min_leaf = 1;
  bool bootstrap = true;
  std::uint64_t seed = 7;
  std::size_t workers = 1;
};

struct RFModel {
  std::vector<DecisionTree> trees;
  std::vector<std::uint64_t> tree_seeds;
  std::size_t max_features = 0;
  std::size_t min_leaf = 1;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

std::size_t resolved_max_features(const RFConfig& config, std::size_t n_features);

// Tree t is grown from derive_seed(seed, {t}) on a bootstrap resample of the
// training set (same size, with replacement). Independent of `workers`.
RFModel rf_train(const Matrix& X, const Labels& y, const RFConfig& config = {});

// Majority vote of the trees; score is the fraction voting 1 and an even
// split goes to 0.
Prediction rf_predict(const RFModel& model, std::span<const double> x);

}  // namespace eepred
