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

#ifndef TABKIT_MODELS_HPP_
#define TABKIT_MODELS_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tabkit/data.hpp"
#include "tabkit/numkit.hpp"
#include "tabkit/parallel.hpp"

namespace tabkit::models {

enum class ModelKind { logreg, dtree, rforest, linsvm, knn, gnb, zeror, lrforest, svtree };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

// ---------------------------------------------------------------------------
// Configurations. Defaults are documented in README.md.
// ---------------------------------------------------------------------------

struct LogRegConfig {
  double l2 = 1e-4;
  double lr = 0.1;
  std::size_t epochs = 200;
  BatchStrategy batch = BatchStrategy::full();
  OptimizerKind optimizer = OptimizerKind::adam;
  /// z-score inputs internally with training statistics (stored in params).
  bool standardize_inputs = true;
};

struct TreeConfig {
  int max_depth = -1;  // -1: unlimited
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 0;  // 0: all features
};

struct ForestConfig {
  std::size_t n_trees = 100;
  int max_depth = -1;
  std::size_t max_features = 0;  // 0: ceil(sqrt(d))
  bool bootstrap = true;
  std::size_t min_samples_leaf = 1;
};

struct SvmConfig {
  double C = 1.0;
  double lr = 0.01;
  std::size_t epochs = 500;
  BatchStrategy batch = BatchStrategy::full();
  OptimizerKind optimizer = OptimizerKind::sgd;
  bool standardize_inputs = true;
};

struct KnnConfig {
  std::size_t k = 5;
};

struct GnbConfig {
  double var_floor = 1e-9;
};

struct ZeroRConfig {};

struct LRForestConfig {
  ForestConfig forest;
  LogRegConfig meta;
};

struct SVTreeConfig {
  SvmConfig svm;
  TreeConfig tree{3, 5, 0};
};

using ModelConfig = std::variant<LogRegConfig, TreeConfig, ForestConfig, SvmConfig, KnnConfig,
                                 GnbConfig, ZeroRConfig, LRForestConfig, SVTreeConfig>;

ModelKind kind_of(const ModelConfig& config);
ModelConfig default_config(ModelKind kind);

nlohmann::json config_to_json(const ModelConfig& config);
/// Starts from the defaults of `kind` and overrides the keys present in j.
/// Unknown keys are a UsageError.
ModelConfig config_from_json(ModelKind kind, const nlohmann::json& j);

/// Everything needed to refit a model from scratch.
struct ModelSpec {
  ModelConfig config;
  std::uint64_t seed = 42;

  ModelKind kind() const { return kind_of(config); }
};

nlohmann::json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Uniform classifier contract
// ---------------------------------------------------------------------------

class Classifier {
 public:
  virtual ~Classifier() = default;

  ModelKind kind() const { return spec_.kind(); }
  const ModelSpec& spec() const { return spec_; }
  std::size_t n_features() const { return n_features_; }
  std::size_t n_classes() const { return n_classes_; }

  virtual bool has_proba() const { return true; }
  virtual bool has_decision_function() const { return false; }

  /// Rows are nonnegative and sum to one. Throws ModelError when the kind
  /// has no probability output.
  virtual Matrix predict_proba(const Matrix& X) const;
  /// One column per one-vs-rest scorer; a single column for two classes.
  virtual Matrix decision_function(const Matrix& X) const;
  /// Argmax of predict_proba (ties to the lowest code) unless overridden.
  virtual std::vector<int> predict(const Matrix& X) const;

  virtual nlohmann::json params_to_json() const = 0;

 protected:
  Classifier(ModelSpec spec, std::size_t n_features, std::size_t n_classes)
      : spec_(std::move(spec)), n_features_(n_features), n_classes_(n_classes) {}

  /// Throws ModelError on a column-count mismatch.
  void check_input(const Matrix& X) const;

 private:
  ModelSpec spec_;
  std::size_t n_features_;
  std::size_t n_classes_;
};

using ClassifierPtr = std::shared_ptr<const Classifier>;

/// Fits any kind. n_classes fixes the output width even when a class is
/// absent from y.
ClassifierPtr fit(const ModelSpec& spec, const Matrix& X, std::span<const int> y,
                  std::size_t n_classes, Exec exec = Exec::parallel);
ClassifierPtr fit(const ModelSpec& spec, const data::Dataset& train,
                  Exec exec = Exec::parallel);

/// {format_version, kind, config, seed, n_features, n_classes, params}
nlohmann::json model_to_json(const Classifier& model);
ClassifierPtr model_from_json(const nlohmann::json& j);

inline constexpr int kModelFormatVersion = 1;

/// Throws ModelError unless y holds at least two distinct classes.
void require_two_classes(std::span<const int> y, const char* who);

// ---------------------------------------------------------------------------
// Input scaling shared by the linear models
// ---------------------------------------------------------------------------

struct InputScaling {
  std::vector<double> mean;
  std::vector<double> scale;  // 1 for constant columns

  static InputScaling fit(const Matrix& X);
  static InputScaling identity(std::size_t d);
  Matrix apply(const Matrix& X) const;
};

// ---------------------------------------------------------------------------
// Logistic regression (multinomial softmax)
// ---------------------------------------------------------------------------

/// Mean softmax cross-entropy over `rows` plus 0.5*l2*||W||^2. theta is
/// [W (K x d, row-major) | b (K)]. Writes the gradient when grad is nonempty.
double softmax_loss_grad(std::span<const double> theta, const Matrix& X, std::span<const int> y,
                         std::size_t n_classes, double l2, std::span<const std::size_t> rows,
                         std::span<double> grad);

class LogisticRegression final : public Classifier {
 public:
  LogisticRegression(ModelSpec spec, std::size_t d, std::size_t k, std::vector<double> theta,
                     InputScaling scaling);

  Matrix predict_proba(const Matrix& X) const override;
  nlohmann::json params_to_json() const override;

  const LogRegConfig& config() const { return std::get<LogRegConfig>(spec().config); }
  std::span<const double> theta() const { return theta_; }
  /// Weight matrix (K x d) in the internally scaled input space.
  Matrix weights() const;

  static std::shared_ptr<LogisticRegression> from_params(ModelSpec spec, std::size_t d,
                                                         std::size_t k,
                                                         const nlohmann::json& params);

 private:
  std::vector<double> theta_;
  InputScaling scaling_;
};

std::shared_ptr<LogisticRegression> fit_logreg(const Matrix& X, std::span<const int> y,
                                               std::size_t n_classes, const LogRegConfig& config,
                                               std::uint64_t seed);

// ---------------------------------------------------------------------------
// CART decision tree and random forest
// ---------------------------------------------------------------------------

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> value;  // class distribution at the node
  double impurity = 0.0;
  std::size_t n_samples = 0;
};

struct TreeModel {
  std::vector<TreeNode> nodes;
  /// Unnormalized impurity decrease per feature.
  std::vector<double> impurity_decrease;

  const TreeNode& leaf_for(std::span<const double> x) const;
};

/// Gini impurity of a class-count vector.
double gini(std::span<const double> counts);

/// Grows one CART tree on the multiset `rows` (duplicates allowed). Splits
/// take the largest Gini decrease; ties go to the lowest feature index, then
/// the lowest threshold. Randomness only enters through feature subsampling.
TreeModel grow_tree(const Matrix& X, std::span<const int> y, std::size_t n_classes,
                    std::span<const std::size_t> rows, const TreeConfig& config, Rng& rng);

class DecisionTree final : public Classifier {
 public:
  DecisionTree(ModelSpec spec, std::size_t d, std::size_t k, TreeModel tree);

  Matrix predict_proba(const Matrix& X) const override;
  nlohmann::json params_to_json() const override;

  const TreeModel& tree() const { return tree_; }
  /// Impurity decreases normalized to sum 1 (all zero for a single leaf).
  std::vector<double> feature_importances() const;

  static std::shared_ptr<DecisionTree> from_params(ModelSpec spec, std::size_t d, std::size_t k,
                                                   const nlohmann::json& params);

 private:
  TreeModel tree_;
};

std::shared_ptr<DecisionTree> fit_dtree(const Matrix& X, std::span<const int> y,
                                        std::size_t n_classes, const TreeConfig& config,
                                        std::uint64_t seed);

class RandomForest final : public Classifier {
 public:
  RandomForest(ModelSpec spec, std::size_t d, std::size_t k, std::vector<TreeModel> trees);

  Matrix predict_proba(const Matrix& X) const override;
  nlohmann::json params_to_json() const override;

  const std::vector<TreeModel>& trees() const { return trees_; }
  /// Mean of per-tree normalized impurity decreases, renormalized to sum 1.
  std::vector<double> feature_importances() const;

  Matrix predict_proba(const Matrix& X, Exec exec) const;

  static std::shared_ptr<RandomForest> from_params(ModelSpec spec, std::size_t d, std::size_t k,
                                                   const nlohmann::json& params);

 private:
  std::vector<TreeModel> trees_;
};

/// Tree i draws its bootstrap sample and feature subsets from
/// Rng(seed).split(i), so the forest is independent of execution order.
std::shared_ptr<RandomForest> fit_rforest(const Matrix& X, std::span<const int> y,
                                          std::size_t n_classes, const ForestConfig& config,
                                          std::uint64_t seed, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Linear SVM (one-vs-rest, subgradient descent on the hinge loss)
// ---------------------------------------------------------------------------

/// ||w||^2 / (2 C n_total) + mean hinge over `rows`, targets in {-1, +1}.
/// theta is [w (d) | b]. Writes a subgradient when grad is nonempty.
double hinge_loss_grad(std::span<const double> theta, const Matrix& X, std::span<const double> t,
                       double C, std::size_t n_total, std::span<const std::size_t> rows,
                       std::span<double> grad);

class LinearSvm final : public Classifier {
 public:
  LinearSvm(ModelSpec spec, std::size_t d, std::size_t k, std::vector<std::vector<double>> thetas,
            InputScaling scaling);

  bool has_proba() const override { return false; }
  bool has_decision_function() const override { return true; }
  Matrix decision_function(const Matrix& X) const override;
  std::vector<int> predict(const Matrix& X) const override;
  nlohmann::json params_to_json() const override;

  /// One [w | b] per scorer.
  const std::vector<std::vector<double>>& thetas() const { return thetas_; }

  static std::shared_ptr<LinearSvm> from_params(ModelSpec spec, std::size_t d, std::size_t k,
                                                const nlohmann::json& params);

 private:
  std::vector<std::vector<double>> thetas_;
  InputScaling scaling_;
};

std::shared_ptr<LinearSvm> fit_linsvm(const Matrix& X, std::span<const int> y,
                                      std::size_t n_classes, const SvmConfig& config,
                                      std::uint64_t seed, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// k-nearest neighbours, Gaussian naive Bayes, ZeroR
// ---------------------------------------------------------------------------

class KNearestNeighbors final : public Classifier {
 public:
  KNearestNeighbors(ModelSpec spec, std::size_t k_classes, Matrix X, std::vector<int> y);

  Matrix predict_proba(const Matrix& X) const override;
  Matrix predict_proba(const Matrix& X, Exec exec) const;
  nlohmann::json params_to_json() const override;

  static std::shared_ptr<KNearestNeighbors> from_params(ModelSpec spec, std::size_t d,
                                                        std::size_t k,
                                                        const nlohmann::json& params);

 private:
  Matrix train_X_;
  std::vector<int> train_y_;
};

class GaussianNaiveBayes final : public Classifier {
 public:
  GaussianNaiveBayes(ModelSpec spec, std::size_t d, std::size_t k, std::vector<double> priors,
                     Matrix means, Matrix variances);

  Matrix predict_proba(const Matrix& X) const override;
  nlohmann::json params_to_json() const override;

  static std::shared_ptr<GaussianNaiveBayes> from_params(ModelSpec spec, std::size_t d,
                                                         std::size_t k,
                                                         const nlohmann::json& params);

 private:
  std::vector<double> priors_;
  Matrix means_;
  Matrix variances_;
};

class ZeroR final : public Classifier {
 public:
  ZeroR(ModelSpec spec, std::size_t d, std::vector<double> frequencies);

  Matrix predict_proba(const Matrix& X) const override;
  nlohmann::json params_to_json() const override;

  static std::shared_ptr<ZeroR> from_params(ModelSpec spec, std::size_t d, std::size_t k,
                                            const nlohmann::json& params);

 private:
  std::vector<double> frequencies_;
};

std::shared_ptr<KNearestNeighbors> fit_knn(const Matrix& X, std::span<const int> y,
                                           std::size_t n_classes, const KnnConfig& config,
                                           std::uint64_t seed);
std::shared_ptr<GaussianNaiveBayes> fit_gnb(const Matrix& X, std::span<const int> y,
                                            std::size_t n_classes, const GnbConfig& config,
                                            std::uint64_t seed);
std::shared_ptr<ZeroR> fit_zeror(const Matrix& X, std::span<const int> y, std::size_t n_classes,
                                 std::uint64_t seed);

}  // namespace tabkit::models

#endif  // TABKIT_MODELS_HPP_
