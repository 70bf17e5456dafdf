#include "eepred/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eepred/parallel.hpp"

namespace eepred {

namespace {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // sample-weighted Gini of the two children
};

double weighted_gini(double n0, double n1) {
  const double n = n0 + n1;
  if (n == 0.0) return 0.0;
  return n - (n0 * n0 + n1 * n1) / n;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, const Labels& y, Rng& rng, const TreeConfig& config)
      : X_(X), y_(y), rng_(rng), config_(config) {
    features_.resize(X.cols());
    std::iota(features_.begin(), features_.end(), 0);
    m_ = config.max_features == 0 ? X.cols() : std::min(config.max_features, X.cols());
  }

  int build(std::vector<std::size_t>& sample) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    std::array<std::uint32_t, 2> counts{};
    for (std::size_t i : sample) ++counts[y_[i]];
    tree_.nodes[id].counts = counts;

    const std::size_t min_leaf = std::max<std::size_t>(1, config_.min_leaf);
    if (counts[0] == 0 || counts[1] == 0 || sample.size() < 2 * min_leaf) return id;

    const SplitChoice split = best_split(sample, min_leaf);
    if (!split.found) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t i : sample) {
      (X_(i, split.feature) <= split.threshold ? left : right).push_back(i);
    }
    sample.clear();
    sample.shrink_to_fit();
    tree_.nodes[id].feature = split.feature;
    tree_.nodes[id].threshold = split.threshold;
    const int l = build(left);
    tree_.nodes[id].left = l;
    const int r = build(right);
    tree_.nodes[id].right = r;
    return id;
  }

  DecisionTree take() { return std::move(tree_); }

 private:
  SplitChoice best_split(const std::vector<std::size_t>& sample, std::size_t min_leaf) {
    rng_.shuffle(std::span<std::size_t>(features_));
    SplitChoice best;
    std::vector<std::pair<double, int>> column(sample.size());
    for (std::size_t visited = 0; visited < features_.size(); ++visited) {
      if (visited >= m_ && best.found) break;
      const std::size_t f = features_[visited];
      for (std::size_t k = 0; k < sample.size(); ++k) {
        column[k] = {X_(sample[k], f), y_[sample[k]]};
      }
      std::sort(column.begin(), column.end());
      double total[2] = {0, 0};
      for (const auto& [v, label] : column) ++total[label];
      double left[2] = {0, 0};
      const std::size_t n = column.size();
      for (std::size_t k = 1; k < n; ++k) {
        ++left[column[k - 1].second];
        if (!(column[k - 1].first < column[k].first)) continue;
        if (k < min_leaf || n - k < min_leaf) continue;
        const double impurity = weighted_gini(left[0], left[1]) +
                                weighted_gini(total[0] - left[0], total[1] - left[1]);
        if (!best.found || impurity < best.impurity) {
          double threshold = 0.5 * (column[k - 1].first + column[k].first);
          if (!(threshold < column[k].first)) threshold = column[k - 1].first;
          best = {true, static_cast<int>(f), threshold, impurity};
        }
      }
    }
    return best;
  }

  const Matrix& X_;
  const Labels& y_;
  Rng& rng_;
  TreeConfig config_;
  std::vector<std::size_t> features_;
  std::size_t m_ = 0;
  DecisionTree tree_;
};

std::size_t subtree_depth(const std::vector<TreeNode>& nodes, int id) {
  const TreeNode& node = nodes[id];
  if (node.is_leaf()) return 0;
  return 1 + std::max(subtree_depth(nodes, node.left), subtree_depth(nodes, node.right));
}

}  // namespace

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
  if (nodes.empty()) throw DomainError("decision tree has no nodes");
  const TreeNode* node = &nodes[0];
  while (!node->is_leaf()) {
    if (static_cast<std::size_t>(node->feature) >= x.size()) {
      throw DomainError("tree input width does not match the model");
    }
    node = &nodes[x[node->feature] <= node->threshold ? node->left : node->right];
  }
  return *node;
}

int DecisionTree::predict(std::span<const double> x) const {
  const auto& counts = leaf_for(x).counts;
  return counts[1] > counts[0] ? 1 : 0;
}

std::size_t DecisionTree::depth() const {
  return nodes.empty() ? 0 : subtree_depth(nodes, 0);
}

DecisionTree tree_train(const Matrix& X, const Labels& y, Rng& rng, const TreeConfig& config) {
  std::vector<std::size_t> sample(X.rows());
  std::iota(sample.begin(), sample.end(), 0);
  return tree_train(X, y, sample, rng, config);
}

DecisionTree tree_train(const Matrix& X, const Labels& y, std::span<const std::size_t> sample,
                        Rng& rng, const TreeConfig& config) {
  if (X.rows() != y.size()) throw DomainError("feature rows and labels differ in length");
  if (sample.empty()) throw DomainError("cannot grow a tree on an empty sample");
  for (int label : y) {
    if (label != 0 && label != 1) throw DomainError("labels must be 0 or 1");
  }
  TreeBuilder builder(X, y, rng, config);
  std::vector<std::size_t> root(sample.begin(), sample.end());
  builder.build(root);
  return builder.take();
}

std::size_t resolved_max_features(const RFConfig& config, std::size_t n_features) {
  if (config.max_features != 0) return std::min(config.max_features, n_features);
  return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_features))));
}

RFModel rf_train(const Matrix& X, const Labels& y, const RFConfig& config) {
  check_training_data(X, y);
  if (config.n_trees == 0) throw DomainError("random forest needs at least one tree");

  RFModel model;
  model.max_features = resolved_max_features(config, X.cols());
  model.min_leaf = config.min_leaf;
  model.bootstrap = config.bootstrap;
  model.seed = config.seed;
  model.trees.resize(config.n_trees);
  model.tree_seeds.resize(config.n_trees);
  for (std::size_t t = 0; t < config.n_trees; ++t) model.tree_seeds[t] = derive_seed(config.seed, {t});

  const TreeConfig tree_config{model.max_features, config.min_leaf};
  const std::size_t n = X.rows();
  parallel_for(config.n_trees, config.workers, [&](std::size_t t) {
    Rng rng(model.tree_seeds[t]);
    std::vector<std::size_t> sample(n);
    if (config.bootstrap) {
      for (auto& s : sample) s = rng.below(n);
    } else {
      std::iota(sample.begin(), sample.end(), 0);
    }
    model.trees[t] = tree_train(X, y, sample, rng, tree_config);
  });
  return model;
}

Prediction rf_predict(const RFModel& model, std::span<const double> x) {
  if (model.trees.empty()) throw DomainError("random forest has no trees");
  std::size_t votes = 0;
  for (const auto& tree : model.trees) votes += static_cast<std::size_t>(tree.predict(x));
  const double fraction = static_cast<double>(votes) / model.trees.size();
  return {fraction, 2 * votes > model.trees.size() ? 1 : 0};
}

}  // namespace eepred
