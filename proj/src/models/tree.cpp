/*
 *   Copyright 2026 The tabkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tabkit/models.hpp"

namespace tabkit::models {

using nlohmann::json;

double gini(std::span<const double> counts) {
  double n = 0.0;
  double sumsq = 0.0;
  for (double c : counts) {
    n += c;
    sumsq += c * c;
  }
  return n > 0.0 ? 1.0 - sumsq / (n * n) : 0.0;
}

const TreeNode& TreeModel::leaf_for(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& node = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold
                                     ? node.left
                                     : node.right);
  }
  return nodes[i];
}

namespace {

struct BestSplit {
  int feature = -1;
  double threshold = 0.0;
  double proxy = -std::numeric_limits<double>::infinity();
};

struct Task {
  std::size_t node;
  std::vector<std::size_t> rows;
  int depth;
};

// Sum of squared class counts divided by the node size is the Gini proxy:
// n * gini = n - sumsq / n, so maximizing sumsqL/nL + sumsqR/nR minimizes
// the weighted child impurity.
BestSplit find_split(const Matrix& X, std::span<const int> y, std::size_t K,
                     const std::vector<std::size_t>& rows, const std::vector<std::size_t>& features,
                     std::size_t min_leaf, std::span<const double> parent_counts) {
  BestSplit best;
  const std::size_t m = rows.size();
  std::vector<std::pair<double, int>> pairs(m);
  std::vector<double> left(K);
  std::vector<double> right(K);
  for (std::size_t f : features) {
    for (std::size_t i = 0; i < m; ++i) pairs[i] = {X(rows[i], f), y[rows[i]]};
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (pairs.front().first == pairs.back().first) continue;
    std::fill(left.begin(), left.end(), 0.0);
    std::copy(parent_counts.begin(), parent_counts.end(), right.begin());
    double sumsq_left = 0.0;
    double sumsq_right = 0.0;
    for (double c : right) sumsq_right += c * c;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      const auto c = static_cast<std::size_t>(pairs[i].second);
      sumsq_left += 2.0 * left[c] + 1.0;
      sumsq_right -= 2.0 * right[c] - 1.0;
      left[c] += 1.0;
      right[c] -= 1.0;
      if (pairs[i].first == pairs[i + 1].first) continue;
      const std::size_t n_left = i + 1;
      const std::size_t n_right = m - n_left;
      if (n_left < min_leaf || n_right < min_leaf) continue;
      const double proxy = sumsq_left / static_cast<double>(n_left) +
                           sumsq_right / static_cast<double>(n_right);
      if (proxy > best.proxy) {
        double mid = 0.5 * (pairs[i].first + pairs[i + 1].first);
        if (!(mid < pairs[i + 1].first)) mid = pairs[i].first;
        best = {static_cast<int>(f), mid, proxy};
      }
    }
  }
  return best;
}

}  // namespace

TreeModel grow_tree(const Matrix& X, std::span<const int> y, std::size_t n_classes,
                    std::span<const std::size_t> rows, const TreeConfig& config, Rng& rng) {
  const std::size_t d = X.cols();
  const std::size_t min_leaf = std::max<std::size_t>(1, config.min_samples_leaf);
  const std::size_t n_candidates =
      config.max_features == 0 ? d : std::min(config.max_features, d);
  TreeModel tree;
  tree.impurity_decrease.assign(d, 0.0);
  tree.nodes.emplace_back();
  std::vector<Task> stack;
  stack.push_back({0, std::vector<std::size_t>(rows.begin(), rows.end()), 0});
  std::vector<std::size_t> all_features(d);
  std::iota(all_features.begin(), all_features.end(), std::size_t{0});

  while (!stack.empty()) {
    Task task = std::move(stack.back());
    stack.pop_back();
    const std::size_t m = task.rows.size();
    std::vector<double> counts(n_classes, 0.0);
    for (std::size_t r : task.rows) counts[static_cast<std::size_t>(y[r])] += 1.0;
    double sumsq = 0.0;
    for (double c : counts) sumsq += c * c;
    {
      TreeNode& node = tree.nodes[task.node];
      node.n_samples = m;
      node.impurity = gini(counts);
      node.value.resize(n_classes);
      for (std::size_t k = 0; k < n_classes; ++k) node.value[k] = counts[k] / static_cast<double>(m);
    }
    const double md = static_cast<double>(m);
    const bool pure = sumsq == md * md;
    const bool depth_reached = config.max_depth >= 0 && task.depth >= config.max_depth;
    if (pure || depth_reached || m < 2 * min_leaf) continue;

    std::vector<std::size_t> features = all_features;
    if (n_candidates < d) {
      // Partial Fisher-Yates, then ascending order for the tie rule.
      for (std::size_t i = 0; i < n_candidates; ++i) {
        std::swap(features[i], features[i + rng.uniform_index(d - i)]);
      }
      features.resize(n_candidates);
      std::sort(features.begin(), features.end());
    }
    const BestSplit best = find_split(X, y, n_classes, task.rows, features, min_leaf, counts);
    if (best.feature < 0) continue;

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (std::size_t r : task.rows) {
      (X(r, static_cast<std::size_t>(best.feature)) <= best.threshold ? left_rows : right_rows)
          .push_back(r);
    }
    const std::size_t left_index = tree.nodes.size();
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[task.node];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = static_cast<int>(left_index);
    node.right = static_cast<int>(left_index + 1);
    tree.impurity_decrease[static_cast<std::size_t>(best.feature)] +=
        std::max(0.0, best.proxy - sumsq / md);
    stack.push_back({left_index + 1, std::move(right_rows), task.depth + 1});
    stack.push_back({left_index, std::move(left_rows), task.depth + 1});
  }
  return tree;
}

namespace {

json tree_to_json(const TreeModel& tree) {
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<double> value;
  std::vector<double> impurity;
  std::vector<std::size_t> n_samples;
  for (const auto& n : tree.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.insert(value.end(), n.value.begin(), n.value.end());
    impurity.push_back(n.impurity);
    n_samples.push_back(n.n_samples);
  }
  return {{"feature", feature},     {"threshold", threshold},
          {"left", left},           {"right", right},
          {"value", value},         {"impurity", impurity},
          {"n_samples", n_samples}, {"impurity_decrease", tree.impurity_decrease}};
}

TreeModel tree_from_json(const json& j, std::size_t d, std::size_t k) {
  const auto feature = j.at("feature").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto value = j.at("value").get<std::vector<double>>();
  const auto impurity = j.at("impurity").get<std::vector<double>>();
  const auto n_samples = j.at("n_samples").get<std::vector<std::size_t>>();
  const std::size_t n = feature.size();
  if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n * k ||
      impurity.size() != n || n_samples.size() != n || n == 0) {
    throw ModelError("tree: inconsistent node arrays");
  }
  TreeModel tree;
  tree.impurity_decrease = j.at("impurity_decrease").get<std::vector<double>>();
  if (tree.impurity_decrease.size() != d) throw ModelError("tree: importance width mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    TreeNode node;
    node.feature = feature[i];
    node.threshold = threshold[i];
    node.left = left[i];
    node.right = right[i];
    node.value.assign(value.begin() + static_cast<std::ptrdiff_t>(i * k),
                      value.begin() + static_cast<std::ptrdiff_t>((i + 1) * k));
    node.impurity = impurity[i];
    node.n_samples = n_samples[i];
    if (node.feature >= static_cast<int>(d) ||
        (node.feature >= 0 && (node.left <= static_cast<int>(i) || node.right <= static_cast<int>(i) ||
                               node.left >= static_cast<int>(n) || node.right >= static_cast<int>(n)))) {
      throw ModelError("tree: malformed node " + std::to_string(i));
    }
    tree.nodes.push_back(std::move(node));
  }
  return tree;
}

std::vector<double> normalized(std::vector<double> v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (total > 0.0) {
    for (double& x : v) x /= total;
  }
  return v;
}

}  // namespace

DecisionTree::DecisionTree(ModelSpec spec, std::size_t d, std::size_t k, TreeModel tree)
    : Classifier(std::move(spec), d, k), tree_(std::move(tree)) {}

Matrix DecisionTree::predict_proba(const Matrix& X) const {
  check_input(X);
  Matrix p(X.rows(), n_classes());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const auto& leaf = tree_.leaf_for(X.row(r));
    std::copy(leaf.value.begin(), leaf.value.end(), p.row(r).begin());
  }
  return p;
}

std::vector<double> DecisionTree::feature_importances() const {
  return normalized(tree_.impurity_decrease);
}

json DecisionTree::params_to_json() const { return {{"tree", tree_to_json(tree_)}}; }

std::shared_ptr<DecisionTree> DecisionTree::from_params(ModelSpec spec, std::size_t d,
                                                        std::size_t k, const json& params) {
  return std::make_shared<DecisionTree>(std::move(spec), d, k,
                                        tree_from_json(params.at("tree"), d, k));
}

std::shared_ptr<DecisionTree> fit_dtree(const Matrix& X, std::span<const int> y,
                                        std::size_t n_classes, const TreeConfig& config,
                                        std::uint64_t seed) {
  if (X.rows() == 0) throw ModelError("dtree: empty training set");
  std::vector<std::size_t> rows(X.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Rng rng(seed);
  return std::make_shared<DecisionTree>(ModelSpec{config, seed}, X.cols(), n_classes,
                                        grow_tree(X, y, n_classes, rows, config, rng));
}

RandomForest::RandomForest(ModelSpec spec, std::size_t d, std::size_t k,
                           std::vector<TreeModel> trees)
    : Classifier(std::move(spec), d, k), trees_(std::move(trees)) {
  if (trees_.empty()) throw ModelError("rforest: no trees");
}

Matrix RandomForest::predict_proba(const Matrix& X) const {
  return predict_proba(X, Exec::parallel);
}

Matrix RandomForest::predict_proba(const Matrix& X, Exec exec) const {
  check_input(X);
  const std::size_t K = n_classes();
  Matrix p(X.rows(), K);
  const double inv = 1.0 / static_cast<double>(trees_.size());
  parallel_for(X.rows(), exec, [&](std::size_t r) {
    auto out = p.row(r);
    for (const auto& tree : trees_) {
      const auto& leaf = tree.leaf_for(X.row(r));
      for (std::size_t k = 0; k < K; ++k) out[k] += leaf.value[k];
    }
    for (double& v : out) v *= inv;
  });
  return p;
}

std::vector<double> RandomForest::feature_importances() const {
  std::vector<double> total(n_features(), 0.0);
  for (const auto& tree : trees_) {
    const auto imp = normalized(tree.impurity_decrease);
    for (std::size_t j = 0; j < total.size(); ++j) total[j] += imp[j];
  }
  return normalized(std::move(total));
}

json RandomForest::params_to_json() const {
  json trees = json::array();
  for (const auto& t : trees_) trees.push_back(tree_to_json(t));
  return {{"trees", trees}};
}

std::shared_ptr<RandomForest> RandomForest::from_params(ModelSpec spec, std::size_t d,
                                                        std::size_t k, const json& params) {
  std::vector<TreeModel> trees;
  for (const auto& t : params.at("trees")) trees.push_back(tree_from_json(t, d, k));
  return std::make_shared<RandomForest>(std::move(spec), d, k, std::move(trees));
}

std::shared_ptr<RandomForest> fit_rforest(const Matrix& X, std::span<const int> y,
                                          std::size_t n_classes, const ForestConfig& config,
                                          std::uint64_t seed, Exec exec) {
  if (X.rows() == 0) throw ModelError("rforest: empty training set");
  if (config.n_trees == 0) throw ModelError("rforest: n_trees must be >= 1");
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  const std::size_t max_features =
      config.max_features == 0
          ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))))
          : std::min(config.max_features, d);
  const TreeConfig tree_config{config.max_depth, config.min_samples_leaf, max_features};
  const Rng root(seed);
  std::vector<TreeModel> trees(config.n_trees);
  parallel_for(config.n_trees, exec, [&](std::size_t i) {
    Rng rng = root.split(i);
    std::vector<std::size_t> rows(n);
    if (config.bootstrap) {
      for (auto& r : rows) r = rng.uniform_index(n);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    trees[i] = grow_tree(X, y, n_classes, rows, tree_config, rng);
  });
  return std::make_shared<RandomForest>(ModelSpec{config, seed}, d, n_classes, std::move(trees));
}

}  // namespace tabkit::models
