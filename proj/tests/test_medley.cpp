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

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "tabkit/medley.hpp"
#include "tabkit/metrics.hpp"

using namespace tabkit;
using namespace tabkit::medley;

namespace {

/// Label depends only on column 0; column 2 is the constant 3.
data::Dataset dominant(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix X(n, 4);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 4; ++j) X(i, j) = rng.normal();
    X(i, 2) = 3.0;
    y[i] = X(i, 0) > 0.0 ? 1 : 0;
  }
  return data::make_dataset(std::move(X), std::move(y), {"a", "b", "k", "c"}, {"n", "p"});
}

const models::ModelSpec kTree{models::TreeConfig{4, 2, 0}, 1};
const models::ModelSpec kLogReg{models::LogRegConfig{}, 1};

}  // namespace

TEST(Importances, ConstantColumnScoresExactlyZero) {
  const auto ds = dominant(120, 1);
  for (const auto& spec : {kTree, kLogReg}) {
    const MedleyInterpreter mi(spec, ds.X, ds.labels(), 2, MedleyOptions{3, 7, Exec::serial});
    EXPECT_EQ(mi.drop_scores()[2], 0.0);
    EXPECT_EQ(mi.perm_scores()[2], 0.0);
  }
}

TEST(Importances, DominantFeatureRanksFirst) {
  const auto ds = dominant(200, 2);
  for (const auto& spec : {kTree, kLogReg}) {
    const MedleyInterpreter mi(spec, ds.X, ds.labels(), 2);
    EXPECT_EQ(argmax(mi.drop_scores()), 0u);
    EXPECT_EQ(argmax(mi.perm_scores()), 0u);
    const auto e = mi.interpret(ds.X.row(0));
    EXPECT_EQ(argmax(e.combined_scores), 0u);
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_EQ(e.combined_scores[j], e.drop_scores[j] + e.perm_scores[j]);
    }
    EXPECT_EQ(e.predicted_class, mi.model()->predict(ds.X.select_rows(std::vector<std::size_t>{0}))[0]);
    EXPECT_THROW(mi.interpret(std::vector<double>{1, 2}), DataError);
  }
}

TEST(Importances, DropColumnMatchesManualRefit) {
  const auto ds = dominant(80, 3);
  const auto r = drop_column_importances(kTree, ds.X, ds.labels(), 2, ds.X, ds.labels());
  const auto base = models::fit(kTree, ds.X, ds.labels(), 2);
  EXPECT_EQ(r.baseline, metrics::accuracy(ds.labels(), base->predict(ds.X)));
  Matrix zeroed = ds.X;
  for (std::size_t i = 0; i < zeroed.rows(); ++i) zeroed(i, 1) = 0.0;
  const auto refit = models::fit(kTree, zeroed, ds.labels(), 2);
  EXPECT_EQ(r.scores[1], r.baseline - metrics::accuracy(ds.labels(), refit->predict(ds.X)));
}

TEST(Importances, PermutationIsSeeded) {
  const auto ds = dominant(80, 4);
  const auto m = models::fit(kLogReg, ds.X, ds.labels(), 2);
  const auto a = permutation_importances(*m, ds.X, ds.labels(), 4, 9);
  EXPECT_EQ(a, permutation_importances(*m, ds.X, ds.labels(), 4, 9));
  EXPECT_NE(a, permutation_importances(*m, ds.X, ds.labels(), 4, 10));
}

TEST(TopK, TiesGoToLowerIndex) {
  EXPECT_EQ(top_k(std::vector<double>{1, -3, 3, 2}, 2), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(top_k(std::vector<double>{0, 0, 0}, 2), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(top_k(std::vector<double>{5, -6}, 1), (std::vector<std::size_t>{1}));
}

TEST(Explainers, GreedyPicksDominantFeatureFirst) {
  const auto ds = dominant(200, 5);
  const auto m = models::fit(kLogReg, ds.X, ds.labels(), 2);
  std::vector<double> x{2.0, 0.1, 3.0, -0.2};
  const auto picks = greedy_explain(*m, x, 2);
  ASSERT_EQ(picks.size(), 2u);
  EXPECT_EQ(picks[0].feature, 0u);
  EXPECT_GT(picks[0].reduction, 0.0);
  const auto s = greedy_scores(picks, 4);
  EXPECT_EQ(s[picks[0].feature], 4.0);
  EXPECT_EQ(s[picks[1].feature], 3.0);
  EXPECT_THROW(greedy_explain(*m, x, 5), UsageError);
}

TEST(Explainers, LocalLinearRecoversDirection) {
  const auto ds = dominant(200, 6);
  const auto m = models::fit(kLogReg, ds.X, ds.labels(), 2);
  std::vector<double> sd{1.0, 1.0, 0.0, 1.0};
  LocalLinearConfig cfg;
  cfg.n_samples = 400;
  const std::vector<double> x{0.2, 0.0, 3.0, 0.0};
  const auto c = local_linear_explain(*m, x, sd, cfg);
  EXPECT_EQ(argmax(std::vector<double>{std::abs(c[0]), std::abs(c[1]), std::abs(c[2]), std::abs(c[3])}),
            0u);
  EXPECT_EQ(c[2], 0.0);
  EXPECT_EQ(c, local_linear_explain(*m, x, sd, cfg));
  EXPECT_THROW(local_linear_explain(*m, x, std::vector<double>{1.0}, cfg), DataError);
  EXPECT_THROW(local_linear_explain(*m, x, std::vector<double>(4, 0.0), cfg), DataError);
}

TEST(Explainers, ParzenGradientPointsAlongDominantFeature) {
  const auto ds = dominant(200, 7);
  const auto m = models::fit(kTree, ds.X, ds.labels(), 2);
  const std::vector<double> x{0.1, 0.0, 3.0, 0.0};
  const auto g = parzen_explain(*m, x, ds.X, 0.7);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_EQ(top_k(g, 1)[0], 0u);
  EXPECT_THROW(parzen_explain(*m, x, ds.X, 0.0), UsageError);
}

TEST(Explainers, ClassScoreForMarginModels) {
  const auto ds = dominant(100, 8);
  const auto m = models::fit(models::ModelSpec{models::SvmConfig{}, 1}, ds.X, ds.labels(), 2);
  const auto s0 = class_score(*m, ds.X, 0);
  const auto s1 = class_score(*m, ds.X, 1);
  const auto f = m->decision_function(ds.X);
  for (std::size_t i = 0; i < 100; ++i) {
    EXPECT_EQ(s1[i], f(i, 0));
    EXPECT_EQ(s0[i], -f(i, 0));
  }
}

TEST(Gold, GeneratorPlantsKFeatures) {
  const auto g = generate_gold(GoldConfig{8, 3, 200, 5});
  ASSERT_EQ(g.gold_features.size(), 3u);
  EXPECT_TRUE(std::is_sorted(g.gold_features.begin(), g.gold_features.end()));
  const std::set<std::size_t> gold(g.gold_features.begin(), g.gold_features.end());
  for (std::size_t j = 0; j < 8; ++j) {
    if (gold.count(j)) {
      EXPECT_GE(std::abs(g.coefficients[j]), 1.0);
      EXPECT_LT(std::abs(g.coefficients[j]), 2.0);
    } else {
      EXPECT_EQ(g.coefficients[j], 0.0);
    }
  }
  EXPECT_EQ(g.dataset.n_rows(), 200u);
  EXPECT_TRUE(g.dataset.same_as(generate_gold(GoldConfig{8, 3, 200, 5}).dataset));
  EXPECT_THROW(generate_gold(GoldConfig{2, 3, 10, 1}), UsageError);
  const auto suite = gold_suite(3, GoldConfig{8, 3, 50, 5});
  ASSERT_EQ(suite.size(), 3u);
  EXPECT_FALSE(suite[0].dataset.same_as(suite[1].dataset));
}

TEST(Gold, MedleyRecoversPlantedFeatures) {
  const auto suite = gold_suite(2, GoldConfig{6, 2, 300, 11});
  BenchConfig cfg;
  cfg.n_instances = 5;
  const auto r = recall_on_gold(ExplainerId::medley, suite, cfg);
  ASSERT_EQ(r.per_dataset.size(), 2u);
  EXPECT_GE(r.mean_recall, 0.99);
  EXPECT_EQ(explainer_from_string("greedy"), ExplainerId::greedy);
  EXPECT_THROW(explainer_from_string("shap"), UsageError);
  EXPECT_THROW(recall_on_gold(ExplainerId::medley, {}, cfg), UsageError);
}
