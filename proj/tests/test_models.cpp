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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "oracles.hpp"
#include "tabkit/models.hpp"

using namespace tabkit;
using namespace tabkit::models;

namespace {

std::vector<double> random_vector(std::size_t n, Rng& rng, double scale) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = i;
  return r;
}

const std::vector<ModelKind> kAllKinds{ModelKind::logreg, ModelKind::dtree,    ModelKind::rforest,
                                       ModelKind::linsvm, ModelKind::knn,      ModelKind::gnb,
                                       ModelKind::zeror,  ModelKind::lrforest, ModelKind::svtree};

ModelSpec small_spec(ModelKind kind) {
  ModelSpec spec{default_config(kind), 11};
  if (auto* f = std::get_if<ForestConfig>(&spec.config)) f->n_trees = 15;
  if (auto* f = std::get_if<LRForestConfig>(&spec.config)) f->forest.n_trees = 15;
  return spec;
}

}  // namespace

TEST(Gini, MatchesOracle) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> counts(1 + rng.uniform_index(6));
    for (double& c : counts) c = static_cast<double>(rng.uniform_index(20));
    counts[0] += 1;
    EXPECT_NEAR(gini(counts), oracle::gini(counts), 1e-15);
  }
  EXPECT_EQ(gini(std::vector<double>{7, 0}), 0.0);
  EXPECT_DOUBLE_EQ(gini(std::vector<double>{5, 5}), 0.5);
}

TEST(LogReg, GradientMatchesFiniteDifferences) {
  const auto ds = testkit::blobs(40, 3, 3, 1.5, 5);
  Rng rng(9);
  const std::size_t K = 3;
  const std::size_t d = 3;
  const auto rows = all_rows(40);
  for (int t = 0; t < 5; ++t) {
    const auto theta = random_vector(K * d + K, rng, 0.7);
    std::vector<double> grad(theta.size());
    softmax_loss_grad(theta, ds.X, ds.labels(), K, 0.05, rows, grad);
    const auto num = oracle::central_gradient(
        [&](std::span<const double> th) {
          return softmax_loss_grad(th, ds.X, ds.labels(), K, 0.05, rows, {});
        },
        theta);
    EXPECT_LT(oracle::max_relative_error(grad, num), 1e-4);
  }
}

TEST(LogReg, SubsetRowsUseOnlyThoseRows) {
  const auto ds = testkit::blobs(30, 2, 2, 2.0, 6);
  Rng rng(1);
  const auto theta = random_vector(6, rng, 0.5);
  const std::vector<std::size_t> rows{3, 4, 17};
  std::vector<double> ga(6);
  const double la = softmax_loss_grad(theta, ds.X, ds.labels(), 2, 0.0, rows, ga);
  const auto sub = ds.X.select_rows(rows);
  std::vector<int> ysub{ds.labels()[3], ds.labels()[4], ds.labels()[17]};
  std::vector<double> gb(6);
  const double lb = softmax_loss_grad(theta, sub, ysub, 2, 0.0, all_rows(3), gb);
  EXPECT_DOUBLE_EQ(la, lb);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(ga[i], gb[i]);
}

TEST(LinSvm, SubgradientMatchesFiniteDifferencesAwayFromKinks) {
  const auto ds = testkit::blobs(30, 3, 2, 2.0, 8);
  std::vector<double> t(30);
  for (std::size_t i = 0; i < 30; ++i) t[i] = ds.labels()[i] == 1 ? 1.0 : -1.0;
  const auto rows = all_rows(30);
  Rng rng(4);
  int checked = 0;
  for (int trial = 0; trial < 50 && checked < 5; ++trial) {
    const auto theta = random_vector(4, rng, 0.8);
    bool near_kink = false;
    for (std::size_t i = 0; i < 30; ++i) {
      double m = theta[3];
      for (std::size_t j = 0; j < 3; ++j) m += theta[j] * ds.X(i, j);
      if (std::abs(t[i] * m - 1.0) < 1e-2) near_kink = true;
    }
    if (near_kink) continue;
    std::vector<double> grad(4);
    hinge_loss_grad(theta, ds.X, t, 0.7, 30, rows, grad);
    const auto num = oracle::central_gradient(
        [&](std::span<const double> th) { return hinge_loss_grad(th, ds.X, t, 0.7, 30, rows, {}); },
        theta, 1e-4);
    EXPECT_LT(oracle::max_relative_error(grad, num), 1e-4);
    ++checked;
  }
  EXPECT_EQ(checked, 5);
}

TEST(Models, EveryKindFitsAndPredictsValidOutputs) {
  const auto ds = testkit::blobs(90, 3, 3, 4.0, 2);
  for (auto kind : kAllKinds) {
    SCOPED_TRACE(to_string(kind));
    const auto m = fit(small_spec(kind), ds, Exec::serial);
    EXPECT_EQ(m->kind(), kind);
    EXPECT_EQ(m->n_classes(), 3u);
    const auto pred = m->predict(ds.X);
    ASSERT_EQ(pred.size(), 90u);
    for (int p : pred) EXPECT_TRUE(p >= 0 && p < 3);
    if (m->has_proba()) {
      const auto P = m->predict_proba(ds.X);
      for (std::size_t r = 0; r < P.rows(); ++r) {
        double s = 0.0;
        for (double v : P.row(r)) {
          EXPECT_GE(v, 0.0);
          s += v;
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
    } else {
      EXPECT_THROW(m->predict_proba(ds.X), ModelError);
      EXPECT_EQ(m->decision_function(ds.X).cols(), 3u);
    }
  }
}

TEST(Models, EveryKindSeparatesTwoBlobs) {
  const auto ds = testkit::blobs(80, 3, 2, 5.0, 3);
  for (auto kind : kAllKinds) {
    if (kind == ModelKind::zeror) continue;
    SCOPED_TRACE(to_string(kind));
    const auto pred = fit(small_spec(kind), ds, Exec::serial)->predict(ds.X);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < 80; ++i) hits += pred[i] == ds.labels()[i] ? 1 : 0;
    EXPECT_GE(hits, 76u);
  }
}

TEST(Models, JsonRoundTripIsBitExact) {
  const auto ds = testkit::blobs(60, 3, 3, 2.0, 12);
  const auto probe = testkit::blobs(25, 3, 3, 2.0, 13);
  for (auto kind : kAllKinds) {
    SCOPED_TRACE(to_string(kind));
    const auto m = fit(small_spec(kind), ds, Exec::serial);
    const auto j = model_to_json(*m);
    const auto back = model_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(model_to_json(*back).dump(), j.dump());
    EXPECT_EQ(back->predict(probe.X), m->predict(probe.X));
    if (m->has_proba()) EXPECT_EQ(back->predict_proba(probe.X), m->predict_proba(probe.X));
    if (m->has_decision_function()) {
      EXPECT_EQ(back->decision_function(probe.X), m->decision_function(probe.X));
    }
  }
}

TEST(Models, RejectsBadSerializedModels) {
  const auto ds = testkit::blobs(30, 2, 2, 2.0, 1);
  auto j = model_to_json(*fit(small_spec(ModelKind::gnb), ds));
  auto wrong = j;
  wrong["format_version"] = 99;
  EXPECT_THROW(model_from_json(wrong), ModelError);
  auto shape = j;
  shape["params"]["means"] = std::vector<double>{1.0};
  EXPECT_THROW(model_from_json(shape), ModelError);
}

TEST(Models, FitIsDeterministicForFixedSeed) {
  const auto ds = testkit::blobs(80, 4, 2, 1.0, 21);
  for (auto kind : kAllKinds) {
    SCOPED_TRACE(to_string(kind));
    const auto a = model_to_json(*fit(small_spec(kind), ds)).dump();
    const auto b = model_to_json(*fit(small_spec(kind), ds)).dump();
    EXPECT_EQ(a, b);
  }
}

TEST(Knn, MatchesBruteForceVote) {
  const auto train = testkit::blobs(50, 2, 3, 1.0, 30);
  const auto query = testkit::blobs(20, 2, 3, 1.0, 31);
  for (std::size_t k : {1u, 3u, 7u}) {
    ModelSpec spec{KnnConfig{k}, 1};
    const auto P = fit(spec, train)->predict_proba(query.X);
    for (std::size_t q = 0; q < 20; ++q) {
      std::vector<std::pair<double, std::size_t>> d;
      for (std::size_t i = 0; i < 50; ++i) {
        const double dx = query.X(q, 0) - train.X(i, 0);
        const double dy = query.X(q, 1) - train.X(i, 1);
        d.push_back({std::hypot(dx, dy), i});
      }
      std::stable_sort(d.begin(), d.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<double> votes(3, 0.0);
      for (std::size_t i = 0; i < k; ++i) votes[train.labels()[d[i].second]] += 1.0;
      for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(P(q, c), votes[c] / k, 1e-12);
    }
  }
  EXPECT_THROW(fit(ModelSpec{KnnConfig{51}, 1}, train), ModelError);
}

TEST(Gnb, MatchesClosedForm) {
  const Matrix X{{1.0}, {3.0}, {10.0}, {14.0}};
  const std::vector<int> y{0, 0, 1, 1};
  const auto m = fit(ModelSpec{GnbConfig{}, 1}, X, y, 2);
  const double x = 6.0;
  auto logpdf = [](double v, double mu, double var) {
    return -0.5 * std::log(2 * std::numbers::pi * var) - (v - mu) * (v - mu) / (2 * var);
  };
  const double a = std::exp(logpdf(x, 2.0, 1.0));
  const double b = std::exp(logpdf(x, 12.0, 4.0));
  EXPECT_NEAR(m->predict_proba(Matrix{{x}})(0, 0), a / (a + b), 1e-12);
}

TEST(ZeroRModel, PredictsClassFrequencies) {
  const Matrix X{{0}, {0}, {0}, {0}};
  const auto m = fit(ModelSpec{ZeroRConfig{}, 1}, X, std::vector<int>{2, 2, 0, 2}, 3);
  const auto P = m->predict_proba(Matrix{{5}, {-5}});
  EXPECT_DOUBLE_EQ(P(1, 0), 0.25);
  EXPECT_DOUBLE_EQ(P(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(P(1, 2), 0.75);
  EXPECT_EQ(m->predict(Matrix{{1}}), std::vector<int>{2});
}

TEST(Tree, FullDepthFitsSeparableDataAndImportancesSumToOne) {
  const auto ds = testkit::blobs(60, 3, 2, 6.0, 40);
  const auto t = fit_dtree(ds.X, ds.labels(), 2, TreeConfig{}, 1);
  EXPECT_EQ(t->predict(ds.X), ds.labels());
  const auto imp = t->feature_importances();
  double s = 0.0;
  for (double v : imp) s += v;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_EQ(argmax(imp), 0u);
}

TEST(Tree, DepthAndLeafLimitsHold) {
  const auto ds = testkit::blobs(100, 3, 3, 1.0, 41);
  const auto t = fit_dtree(ds.X, ds.labels(), 3, TreeConfig{2, 10, 0}, 1);
  for (const auto& n : t->tree().nodes) {
    if (n.feature < 0) EXPECT_GE(n.n_samples, 10u);
  }
  std::function<int(int)> depth = [&](int i) -> int {
    const auto& n = t->tree().nodes[static_cast<std::size_t>(i)];
    if (n.feature < 0) return 0;
    return 1 + std::max(depth(n.left), depth(n.right));
  };
  EXPECT_LE(depth(0), 2);
}

TEST(Config, UnknownKeysAndBadValuesAreUsageErrors) {
  EXPECT_THROW(config_from_json(ModelKind::logreg, {{"nope", 1}}), UsageError);
  EXPECT_THROW(config_from_json(ModelKind::knn, {{"k", 0}}), UsageError);
  EXPECT_THROW(config_from_json(ModelKind::linsvm, {{"C", -1.0}}), UsageError);
  EXPECT_THROW(model_kind_from_string("xgboost"), UsageError);
  const auto c = config_from_json(ModelKind::rforest, {{"n_trees", 7}});
  EXPECT_EQ(std::get<ForestConfig>(c).n_trees, 7u);
  for (auto kind : kAllKinds) {
    const auto cfg = default_config(kind);
    EXPECT_EQ(config_to_json(config_from_json(kind, config_to_json(cfg))), config_to_json(cfg));
  }
}

TEST(Input, ShapeAndLabelChecks) {
  const auto ds = testkit::blobs(30, 3, 2, 2.0, 50);
  const auto m = fit(small_spec(ModelKind::logreg), ds);
  EXPECT_THROW(m->predict(Matrix(2, 4)), ModelError);
  std::vector<int> one(30, 0);
  EXPECT_THROW(fit(small_spec(ModelKind::logreg), ds.X, one, 2), ModelError);
  std::vector<int> bad(30, 0);
  bad[0] = 3;
  EXPECT_THROW(fit(small_spec(ModelKind::dtree), ds.X, bad, 2), ModelError);
  EXPECT_THROW(fit(small_spec(ModelKind::dtree), ds.X, std::vector<int>(5, 0), 2), ModelError);
}
