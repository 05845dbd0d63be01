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
#include <memory>
#include <span>
#include <vector>

#include "tabkit/models.hpp"

namespace tabkit::ensembles {

using models::ClassifierPtr;
using models::ModelSpec;

/// Appends augmentation columns to X.
Matrix augment(const Matrix& X, const Matrix& extra);

/// Base model output appended to X, then a meta model on the combined matrix.
class Stacked : public models::Classifier {
 public:
  Stacked(ModelSpec spec, std::size_t d, std::size_t k, ClassifierPtr base, ClassifierPtr meta);

  const ClassifierPtr& base() const { return base_; }
  const ClassifierPtr& meta() const { return meta_; }
  std::size_t augmentation_width() const { return width_; }

  /// [X | base output], the matrix the meta model sees.
  Matrix combined(const Matrix& X) const;

  bool has_proba() const override { return meta_->has_proba(); }
  Matrix predict_proba(const Matrix& X) const override;
  std::vector<int> predict(const Matrix& X) const override;
  nlohmann::json params_to_json() const override;

 protected:
  virtual Matrix base_output(const Matrix& X) const = 0;

 private:
  ClassifierPtr base_;
  ClassifierPtr meta_;
  std::size_t width_;
};

/// Random forest class probabilities feed a logistic regression.
class LRForest final : public Stacked {
 public:
  LRForest(ModelSpec spec, std::size_t d, std::size_t k, ClassifierPtr forest, ClassifierPtr meta);

  static std::shared_ptr<LRForest> from_params(ModelSpec spec, std::size_t d, std::size_t k,
                                               const nlohmann::json& params);

 protected:
  Matrix base_output(const Matrix& X) const override;
};

/// Linear SVM decision values feed a decision tree.
class SVTree final : public Stacked {
 public:
  SVTree(ModelSpec spec, std::size_t d, std::size_t k, ClassifierPtr svm, ClassifierPtr tree);

  static std::shared_ptr<SVTree> from_params(ModelSpec spec, std::size_t d, std::size_t k,
                                             const nlohmann::json& params);

 protected:
  Matrix base_output(const Matrix& X) const override;
};

/// Forest on Rng(seed).split(0), meta on split(1).
std::shared_ptr<LRForest> lrforest_fit(const Matrix& X, std::span<const int> y,
                                       std::size_t n_classes, const models::LRForestConfig& config,
                                       std::uint64_t seed, Exec exec = Exec::parallel);

std::shared_ptr<SVTree> svtree_fit(const Matrix& X, std::span<const int> y, std::size_t n_classes,
                                   const models::SVTreeConfig& config, std::uint64_t seed,
                                   Exec exec = Exec::parallel);

}  // namespace tabkit::ensembles
