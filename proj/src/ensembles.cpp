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

#include "tabkit/ensembles.hpp"

#include <string>

namespace tabkit::ensembles {

using nlohmann::json;

Matrix augment(const Matrix& X, const Matrix& extra) {
  if (X.rows() != extra.rows()) throw ModelError("augment: row counts differ");
  return X.hconcat(extra);
}

Stacked::Stacked(ModelSpec spec, std::size_t d, std::size_t k, ClassifierPtr base,
                 ClassifierPtr meta)
    : Classifier(std::move(spec), d, k), base_(std::move(base)), meta_(std::move(meta)) {
  if (!base_ || !meta_) throw ModelError("stacked model needs both components");
  if (base_->n_features() != d) throw ModelError("stacked base model has wrong input width");
  if (meta_->n_features() < d) throw ModelError("stacked meta model has wrong input width");
  if (base_->n_classes() != k || meta_->n_classes() != k) {
    throw ModelError("stacked components disagree on the class count");
  }
  width_ = meta_->n_features() - d;
}

Matrix Stacked::combined(const Matrix& X) const {
  check_input(X);
  Matrix extra = base_output(X);
  if (extra.cols() != width_) throw ModelError("stacked base output has wrong width");
  return augment(X, extra);
}

Matrix Stacked::predict_proba(const Matrix& X) const { return meta_->predict_proba(combined(X)); }

std::vector<int> Stacked::predict(const Matrix& X) const { return meta_->predict(combined(X)); }

json Stacked::params_to_json() const {
  return {{"base", models::model_to_json(*base_)},
          {"meta", models::model_to_json(*meta_)},
          {"augmentation_width", width_}};
}

namespace {

template <class Model, class Check>
std::shared_ptr<Model> stacked_from_params(ModelSpec spec, std::size_t d, std::size_t k,
                                           const json& params, Check check) {
  auto base = models::model_from_json(params.at("base"));
  auto meta = models::model_from_json(params.at("meta"));
  check(*base, *meta);
  auto model = std::make_shared<Model>(std::move(spec), d, k, std::move(base), std::move(meta));
  if (params.contains("augmentation_width") &&
      params.at("augmentation_width").get<std::size_t>() != model->augmentation_width()) {
    throw ModelError("stored augmentation_width does not match the meta model");
  }
  return model;
}

}  // namespace

LRForest::LRForest(ModelSpec spec, std::size_t d, std::size_t k, ClassifierPtr forest,
                   ClassifierPtr meta)
    : Stacked(std::move(spec), d, k, std::move(forest), std::move(meta)) {
  if (augmentation_width() != k) throw ModelError("lrforest: augmentation width must equal class count");
}

Matrix LRForest::base_output(const Matrix& X) const { return base()->predict_proba(X); }

std::shared_ptr<LRForest> LRForest::from_params(ModelSpec spec, std::size_t d, std::size_t k,
                                                const json& params) {
  return stacked_from_params<LRForest>(
      std::move(spec), d, k, params, [](const models::Classifier& b, const models::Classifier& m) {
        if (b.kind() != models::ModelKind::rforest || m.kind() != models::ModelKind::logreg) {
          throw ModelError("lrforest: expected an rforest base and a logreg meta model");
        }
      });
}

SVTree::SVTree(ModelSpec spec, std::size_t d, std::size_t k, ClassifierPtr svm, ClassifierPtr tree)
    : Stacked(std::move(spec), d, k, std::move(svm), std::move(tree)) {
  const std::size_t expected = k == 2 ? 1 : k;
  if (augmentation_width() != expected) {
    throw ModelError("svtree: augmentation width must be " + std::to_string(expected));
  }
}

Matrix SVTree::base_output(const Matrix& X) const { return base()->decision_function(X); }

std::shared_ptr<SVTree> SVTree::from_params(ModelSpec spec, std::size_t d, std::size_t k,
                                            const json& params) {
  return stacked_from_params<SVTree>(
      std::move(spec), d, k, params, [](const models::Classifier& b, const models::Classifier& m) {
        if (b.kind() != models::ModelKind::linsvm || m.kind() != models::ModelKind::dtree) {
          throw ModelError("svtree: expected a linsvm base and a dtree meta model");
        }
      });
}

std::shared_ptr<LRForest> lrforest_fit(const Matrix& X, std::span<const int> y,
                                       std::size_t n_classes, const models::LRForestConfig& config,
                                       std::uint64_t seed, Exec exec) {
  models::require_two_classes(y, "lrforest");
  const Rng root(seed);
  auto forest = models::fit_rforest(X, y, n_classes, config.forest, root.split(0).state(), exec);
  const Matrix combined = augment(X, forest->predict_proba(X, exec));
  auto meta = models::fit_logreg(combined, y, n_classes, config.meta, root.split(1).state());
  return std::make_shared<LRForest>(ModelSpec{config, seed}, X.cols(), n_classes,
                                    std::move(forest), std::move(meta));
}

std::shared_ptr<SVTree> svtree_fit(const Matrix& X, std::span<const int> y, std::size_t n_classes,
                                   const models::SVTreeConfig& config, std::uint64_t seed,
                                   Exec exec) {
  models::require_two_classes(y, "svtree");
  const Rng root(seed);
  auto svm = models::fit_linsvm(X, y, n_classes, config.svm, root.split(0).state(), exec);
  const Matrix combined = augment(X, svm->decision_function(X));
  auto tree = models::fit_dtree(combined, y, n_classes, config.tree, root.split(1).state());
  return std::make_shared<SVTree>(ModelSpec{config, seed}, X.cols(), n_classes, std::move(svm),
                                  std::move(tree));
}

}  // namespace tabkit::ensembles
