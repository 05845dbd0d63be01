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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabkit/data.hpp"
#include "tabkit/models.hpp"

namespace tabkit::medley {

using models::ClassifierPtr;
using models::ModelSpec;

struct DropColumnResult {
  std::vector<double> scores;
  double baseline = 0.0;
};

/// Refits spec with each column of X_train zeroed in turn; score j is the
/// baseline accuracy on (X_eval, y_eval) minus the refit model's accuracy.
DropColumnResult drop_column_importances(const ModelSpec& spec, const Matrix& X_train,
                                         std::span<const int> y_train, std::size_t n_classes,
                                         const Matrix& X_eval, std::span<const int> y_eval,
                                         Exec exec = Exec::parallel);

/// Mean accuracy loss over n_repeats shuffles of each column. Repeat r of
/// column j shuffles with Rng(seed).split(j * n_repeats + r).
std::vector<double> permutation_importances(const models::Classifier& model, const Matrix& X_eval,
                                            std::span<const int> y_eval, std::size_t n_repeats,
                                            std::uint64_t seed, Exec exec = Exec::parallel);

struct Explanation {
  std::vector<double> instance;
  int predicted_class = 0;
  std::vector<double> drop_scores;
  std::vector<double> perm_scores;
  std::vector<double> combined_scores;
  double baseline_accuracy = 0.0;
};

struct MedleyOptions {
  std::size_t n_repeats = 5;
  std::uint64_t seed = 42;
  Exec exec = Exec::parallel;
};

/// Fits the model once and computes the drop-column and permutation scores
/// on the evaluation rows (the training rows unless given).
class MedleyInterpreter {
 public:
  MedleyInterpreter(const ModelSpec& spec, const Matrix& X_train, std::span<const int> y_train,
                    std::size_t n_classes, MedleyOptions options = {});
  MedleyInterpreter(const ModelSpec& spec, const Matrix& X_train, std::span<const int> y_train,
                    std::size_t n_classes, const Matrix& X_eval, std::span<const int> y_eval,
                    MedleyOptions options = {});

  Explanation interpret(std::span<const double> x) const;

  const ClassifierPtr& model() const { return model_; }
  const std::vector<double>& drop_scores() const { return drop_.scores; }
  const std::vector<double>& perm_scores() const { return perm_; }
  double baseline_accuracy() const { return drop_.baseline; }

 private:
  ClassifierPtr model_;
  DropColumnResult drop_;
  std::vector<double> perm_;
};

nlohmann::json explanation_to_json(const Explanation& e, const std::vector<std::string>& names);
/// Columns feature,drop,perm,combined.
std::string explanation_to_csv(const Explanation& e, const std::vector<std::string>& names);

// ---------------------------------------------------------------------------
// Competing explainers
// ---------------------------------------------------------------------------

/// Probability of class c, or the one-vs-rest margin for models without
/// probabilities (negated single margin for class 0 of a binary model).
std::vector<double> class_score(const models::Classifier& model, const Matrix& X, int c);

struct LocalLinearConfig {
  std::size_t n_samples = 500;
  /// Kernel width in standardized units; 0 selects 0.75 * sqrt(d).
  double kernel_width = 0.0;
  double ridge = 1e-3;
  std::uint64_t seed = 42;
};

/// Weighted ridge surrogate fit to perturbations around x scaled by
/// feature_std. Coefficients are in raw units; constant features score 0.
std::vector<double> local_linear_explain(const models::Classifier& model,
                                         std::span<const double> x,
                                         std::span<const double> feature_std,
                                         const LocalLinearConfig& config);

struct GreedyPick {
  std::size_t feature = 0;
  double reduction = 0.0;
};

/// Repeatedly zeroes the feature whose removal lowers the predicted-class
/// score most; ties go to the lower index.
std::vector<GreedyPick> greedy_explain(const models::Classifier& model, std::span<const double> x,
                                       std::size_t K);

/// Picks scored d - rank, unpicked features 0.
std::vector<double> greedy_scores(const std::vector<GreedyPick>& picks, std::size_t d);

/// Gradient at x of the Gaussian-kernel class probability of the model's
/// hard labels over X_train.
std::vector<double> parzen_explain(const models::Classifier& model, std::span<const double> x,
                                   const Matrix& X_train, double bandwidth);

// ---------------------------------------------------------------------------
// Gold-feature benchmark
// ---------------------------------------------------------------------------

struct GoldConfig {
  std::size_t d = 10;
  std::size_t K = 3;
  std::size_t n = 500;
  std::uint64_t seed = 42;
};

struct GoldDataset {
  data::Dataset dataset;
  std::vector<std::size_t> gold_features;  // ascending
  std::vector<double> coefficients;        // length d, zero off gold
  GoldConfig config;
};

GoldDataset generate_gold(const GoldConfig& config);

/// Suite of n_datasets gold datasets seeded from split(i) of the suite seed.
std::vector<GoldDataset> gold_suite(std::size_t n_datasets, const GoldConfig& base);

/// Indices of the K largest |score|, ties to the lower index.
std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t K);

struct ExplainContext {
  const models::Classifier& model;
  const MedleyInterpreter* medley;  // null when not requested
  const Matrix& X_train;
  std::vector<double> feature_std;
  std::size_t K;
};

using Explainer = std::function<std::vector<double>(const ExplainContext&, std::span<const double>)>;

enum class ExplainerId { medley, local_linear, greedy, parzen };
const char* to_string(ExplainerId id);
ExplainerId explainer_from_string(const std::string& s);

struct BenchConfig {
  ModelSpec model{models::LogRegConfig{}, 42};
  std::size_t n_instances = 20;
  double test_fraction = 0.3;
  std::uint64_t seed = 42;
  std::size_t n_repeats = 5;
  LocalLinearConfig local_linear;
  /// 0 selects sqrt(d).
  double parzen_bandwidth = 0.0;
};

Explainer builtin_explainer(ExplainerId id, const BenchConfig& config);

struct RecallResult {
  double mean_recall = 0.0;
  std::vector<double> per_dataset;
};

/// Splits each dataset 70/30 (stratified), fits the model on the train part
/// and explains the first n_instances test rows.
RecallResult recall_on_gold(const Explainer& explainer, bool needs_medley,
                            const std::vector<GoldDataset>& suite, const BenchConfig& config,
                            Exec exec = Exec::parallel);
RecallResult recall_on_gold(ExplainerId id, const std::vector<GoldDataset>& suite,
                            const BenchConfig& config, Exec exec = Exec::parallel);

}  // namespace tabkit::medley
