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

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "tabkit/ensembles.hpp"
#include "tabkit/models.hpp"

using namespace tabkit;
using namespace tabkit::models;

namespace {

LRForestConfig small_lrforest() {
  LRForestConfig c;
  c.forest.n_trees = 12;
  return c;
}

}  // namespace

TEST(Augment, AppendsColumns) {
  const Matrix a{{1, 2}, {3, 4}};
  const Matrix b{{9}, {8}};
  EXPECT_EQ(ensembles::augment(a, b), (Matrix{{1, 2, 9}, {3, 4, 8}}));
  EXPECT_THROW(ensembles::augment(a, Matrix{{1}}), ModelError);
}

TEST(LRForestModel, MetaSeesForestProbabilities) {
  const auto ds = testkit::blobs(90, 3, 3, 2.0, 3);
  const auto m = ensembles::lrforest_fit(ds.X, ds.labels(), 3, small_lrforest(), 5);
  EXPECT_EQ(m->augmentation_width(), 3u);
  const auto combined = m->combined(ds.X);
  ASSERT_EQ(combined.cols(), 6u);
  const auto base = m->base()->predict_proba(ds.X);
  for (std::size_t r = 0; r < ds.X.rows(); ++r) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(combined(r, j), ds.X(r, j));
      EXPECT_EQ(combined(r, 3 + j), base(r, j));
    }
  }
  EXPECT_EQ(m->predict_proba(ds.X), m->meta()->predict_proba(combined));
  EXPECT_EQ(m->base()->kind(), ModelKind::rforest);
  EXPECT_EQ(m->meta()->kind(), ModelKind::logreg);
}

TEST(SVTreeModel, WidthIsOneForBinaryAndKOtherwise) {
  const auto two = testkit::blobs(60, 2, 2, 3.0, 4);
  const auto a = ensembles::svtree_fit(two.X, two.labels(), 2, SVTreeConfig{}, 1);
  EXPECT_EQ(a->augmentation_width(), 1u);
  const auto four = testkit::blobs(80, 2, 4, 3.0, 4);
  const auto b = ensembles::svtree_fit(four.X, four.labels(), 4, SVTreeConfig{}, 1);
  EXPECT_EQ(b->augmentation_width(), 4u);
  EXPECT_EQ(b->combined(four.X).cols(), 6u);
  EXPECT_EQ(b->predict(four.X), b->meta()->predict(b->combined(four.X)));
}

TEST(Stacked, RejectsMismatchedComponents) {
  const auto ds = testkit::blobs(60, 2, 3, 3.0, 4);
  const auto svm = fit_linsvm(ds.X, ds.labels(), 3, SvmConfig{}, 1);
  const auto tree = fit_dtree(ds.X, ds.labels(), 3, TreeConfig{}, 1);
  EXPECT_THROW(ensembles::SVTree(ModelSpec{SVTreeConfig{}, 1}, 2, 3, svm, tree), ModelError);
  const auto lr = ensembles::lrforest_fit(ds.X, ds.labels(), 3, small_lrforest(), 5);
  auto j = model_to_json(*lr);
  j["augmentation_width"] = 7;
  EXPECT_THROW(model_from_json(j), ModelError);
  auto swapped = model_to_json(*lr);
  std::swap(swapped["base"], swapped["meta"]);
  EXPECT_THROW(model_from_json(swapped), ModelError);
}

TEST(Stacked, SingleClassTrainingIsRejected) {
  const auto ds = testkit::blobs(20, 2, 2, 3.0, 4);
  const std::vector<int> y(20, 1);
  EXPECT_THROW(ensembles::lrforest_fit(ds.X, y, 2, small_lrforest(), 1), ModelError);
  EXPECT_THROW(ensembles::svtree_fit(ds.X, y, 2, SVTreeConfig{}, 1), ModelError);
}
