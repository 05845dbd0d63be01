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

#include <set>

#include "helpers.hpp"
#include "tabkit/tuning.hpp"

using namespace tabkit;
using namespace tabkit::models;
using nlohmann::json;

TEST(Space, GridIsCartesianProductInKeyOrder) {
  SearchSpec s;
  s.space = {{"max_depth", {1, 2, 3}}, {"min_samples_leaf", {1, 5}}};
  const auto a = enumerate_space(s);
  ASSERT_EQ(a.size(), 6u);
  EXPECT_EQ(a[0], (json{{"max_depth", 1}, {"min_samples_leaf", 1}}));
  EXPECT_EQ(a[1], (json{{"max_depth", 1}, {"min_samples_leaf", 5}}));
  EXPECT_EQ(a[5], (json{{"max_depth", 3}, {"min_samples_leaf", 5}}));
  std::set<std::string> distinct;
  for (const auto& x : a) distinct.insert(x.dump());
  EXPECT_EQ(distinct.size(), 6u);
}

TEST(Space, RandomDrawsStayInRangeAndRepeat) {
  SearchSpec s;
  s.strategy = SearchStrategy::random;
  s.n_draws = 40;
  s.space = {{"l2", {{"low", 1e-5}, {"high", 1e-1}, {"log", true}}},
             {"epochs", {{"low", 10}, {"high", 20}, {"integer", true}}},
             {"optimizer", {"sgd", "adam"}}};
  const auto a = enumerate_space(s);
  ASSERT_EQ(a.size(), 40u);
  for (const auto& x : a) {
    EXPECT_GE(x["l2"].get<double>(), 1e-5);
    EXPECT_LE(x["l2"].get<double>(), 1e-1);
    EXPECT_TRUE(x["epochs"].is_number_integer());
    EXPECT_GE(x["epochs"].get<int>(), 10);
    EXPECT_LE(x["epochs"].get<int>(), 20);
  }
  EXPECT_EQ(enumerate_space(s), a);
  s.seed = 43;
  EXPECT_NE(enumerate_space(s), a);
}

TEST(Space, InvalidSpacesAreUsageErrors) {
  SearchSpec s;
  EXPECT_THROW(enumerate_space(s), UsageError);
  s.space = {{"max_depth", json::array()}};
  EXPECT_THROW(enumerate_space(s), UsageError);
  s.space = {{"max_depth", {{"low", 1}, {"high", 3}}}};
  EXPECT_THROW(enumerate_space(s), UsageError);
  s.strategy = SearchStrategy::random;
  s.space = {{"l2", {{"low", 0.0}, {"high", 1.0}, {"log", true}}}};
  EXPECT_THROW(enumerate_space(s), UsageError);
  s.space = {{"l2", {{"low", 2.0}, {"high", 1.0}}}};
  EXPECT_THROW(enumerate_space(s), UsageError);
  EXPECT_THROW(search_spec_from_json({{"strategy", "bayes"}}), UsageError);
  EXPECT_THROW(search_spec_from_json({{"budget", 3}}), UsageError);
}

TEST(Assignment, DottedKeysReachNestedConfigs) {
  const auto c = apply_assignment(ModelKind::lrforest, {{"forest.n_trees", 9}, {"meta.l2", 0.5}});
  const auto& lr = std::get<LRForestConfig>(c);
  EXPECT_EQ(lr.forest.n_trees, 9u);
  EXPECT_EQ(lr.meta.l2, 0.5);
  EXPECT_THROW(apply_assignment(ModelKind::dtree, {{"depth", 3}}), UsageError);
  EXPECT_THROW(apply_assignment(ModelKind::lrforest, {{"forest.bogus", 1}}), UsageError);
}

TEST(Search, ResultsMatchCrossValidationAndTiesGoFirst) {
  const auto ds = testkit::blobs(60, 2, 2, 8.0, 4);
  SearchSpec s;
  s.space = {{"max_depth", {1, 2, 3}}};
  s.cv_folds = 3;
  const auto r = hyper_search(ModelKind::dtree, ds.X, ds.labels(), 2, s);
  ASSERT_EQ(r.rows.size(), 3u);
  for (const auto& row : r.rows) {
    const auto cv = cross_validate(ModelSpec{row.config, s.seed}, ds.X, ds.labels(), 2, 3, s.seed);
    EXPECT_EQ(cv.fold_scores, row.fold_scores);
    EXPECT_EQ(cv.mean, row.mean_score);
  }
  double best = -1.0;
  std::size_t first = 0;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (r.rows[i].mean_score > best) {
      best = r.rows[i].mean_score;
      first = i;
    }
  }
  EXPECT_EQ(r.best_index, first);
  const auto j = search_result_to_json(ModelKind::dtree, r);
  EXPECT_EQ(j["results"].size(), 3u);
  EXPECT_EQ(j["best_index"], r.best_index);
}

TEST(CrossValidation, FoldScoresAndMean) {
  const auto ds = testkit::blobs(50, 2, 2, 6.0, 5);
  const auto cv = cross_validate(ModelSpec{GnbConfig{}, 1}, ds.X, ds.labels(), 2, 5, 7,
                                 ScoreMetric::f1_macro);
  ASSERT_EQ(cv.fold_scores.size(), 5u);
  double s = 0.0;
  for (double v : cv.fold_scores) s += v;
  EXPECT_DOUBLE_EQ(cv.mean, s / 5.0);
  EXPECT_GT(cv.mean, 0.9);
  EXPECT_THROW(score_metric_from_string("auc"), UsageError);
}
