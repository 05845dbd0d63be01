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
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "tabkit/error.hpp"
#include "tabkit/numkit.hpp"

using namespace tabkit;

TEST(Rng, SameSeedSameSequence) {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, SplitDoesNotAdvanceParent) {
  Rng a(5);
  Rng b(5);
  (void)a.split(3);
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, SplitStreamsDiffer) {
  const Rng root(9);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 64; ++i) {
    Rng child = root.split(i);
    firsts.insert(child.next_u64());
  }
  EXPECT_EQ(firsts.size(), 64u);
  Rng again = root.split(7);
  Rng child = root.split(7);
  EXPECT_EQ(again.next_u64(), child.next_u64());
}

TEST(Rng, UniformMomentsAndRange) {
  Rng rng(1);
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 20000, 0.5, 0.01);
}

TEST(Rng, NormalMoments) {
  Rng rng(2);
  std::vector<double> v(20000);
  for (auto& x : v) x = rng.normal();
  EXPECT_NEAR(mean(v), 0.0, 0.03);
  EXPECT_NEAR(population_std(v), 1.0, 0.03);
}

TEST(Rng, UniformIndexBoundsAndEmpty) {
  Rng rng(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits.at(rng.uniform_index(7));
  for (int h : hits) EXPECT_GT(h, 800);
  EXPECT_THROW(rng.uniform_index(0), UsageError);
}

TEST(Rng, PermutationIsPermutation) {
  Rng rng(4);
  auto p = permutation(50, rng);
  std::sort(p.begin(), p.end());
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(p[i], i);
}

TEST(Matrix, ShapesAndSelection) {
  const Matrix m{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
  EXPECT_EQ(m.column(1), (std::vector<double>{2, 5}));
  const std::vector<std::size_t> rows{1};
  EXPECT_EQ(m.select_rows(rows), (Matrix{{4, 5, 6}}));
  const std::vector<std::size_t> cols{2, 0};
  EXPECT_EQ(m.select_cols(cols), (Matrix{{3, 1}, {6, 4}}));
  EXPECT_EQ(m.hconcat(Matrix{{7}, {8}}), (Matrix{{1, 2, 3, 7}, {4, 5, 6, 8}}));
  EXPECT_EQ(m.vconcat(Matrix{{0, 0, 0}}).rows(), 3u);
  EXPECT_THROW(m.hconcat(Matrix{{1}}), DataError);
  EXPECT_THROW(m.vconcat(Matrix{{1, 2}}), DataError);
  EXPECT_THROW((Matrix{{1, 2}, {3}}), DataError);
}

TEST(Optimizer, SgdStepIsPlainGradientStep) {
  auto st = make_optimizer(OptimizerKind::sgd, 0.1, 2);
  std::vector<double> p{1.0, -2.0};
  const std::vector<double> g{0.5, -1.0};
  optimizer_step(st, p, g);
  EXPECT_DOUBLE_EQ(p[0], 1.0 - 0.1 * 0.5);
  EXPECT_DOUBLE_EQ(p[1], -2.0 + 0.1 * 1.0);
}

TEST(Optimizer, AdamMatchesHandComputedSteps) {
  auto st = make_optimizer(OptimizerKind::adam, 0.01, 1);
  std::vector<double> p{0.0};
  double m = 0, v = 0, x = 0;
  const double grads[] = {0.3, -0.1, 0.7};
  for (int t = 1; t <= 3; ++t) {
    const double g = grads[t - 1];
    optimizer_step(st, p, std::vector<double>{g});
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mh = m / (1 - std::pow(0.9, t));
    const double vh = v / (1 - std::pow(0.999, t));
    x -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    EXPECT_NEAR(p[0], x, 1e-15);
  }
}

TEST(Optimizer, RejectsBadInput) {
  auto st = make_optimizer(OptimizerKind::sgd, 0.1, 2);
  std::vector<double> p{1.0, 2.0};
  EXPECT_THROW(optimizer_step(st, p, std::vector<double>{1.0}), ModelError);
  st.learning_rate = 0.0;
  EXPECT_THROW(optimizer_step(st, p, std::vector<double>{1.0, 1.0}), ModelError);
}

TEST(EpochSchedule, StrategiesPartitionRows) {
  Rng rng(11);
  for (auto strat : {BatchStrategy::full(), BatchStrategy::mini_batch(7), BatchStrategy::online()}) {
    const auto batches = epoch_schedule(30, strat, rng);
    std::vector<std::size_t> all;
    for (const auto& b : batches) all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    ASSERT_EQ(all.size(), 30u);
    for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(all[i], i);
    if (strat.kind == BatchStrategy::Kind::batch) EXPECT_EQ(batches.size(), 1u);
    if (strat.kind == BatchStrategy::Kind::online) EXPECT_EQ(batches.size(), 30u);
    if (strat.kind == BatchStrategy::Kind::mini_batch) {
      EXPECT_EQ(batches.size(), 5u);
      EXPECT_EQ(batches.back().size(), 2u);
    }
  }
  EXPECT_THROW(epoch_schedule(0, BatchStrategy::full(), rng), ModelError);
}

TEST(LinearAlgebra, FiniteDiffMatchesQuadratic) {
  const ScalarFn f = [](std::span<const double> x) {
    return 3 * x[0] * x[0] + x[0] * x[1] - 2 * x[1];
  };
  const std::vector<double> x{0.5, -1.5};
  const auto g = finite_diff_grad(f, x);
  EXPECT_NEAR(g[0], 6 * 0.5 - 1.5, 1e-8);
  EXPECT_NEAR(g[1], 0.5 - 2, 1e-8);
}

TEST(LinearAlgebra, SolveSpdAndLeastSquares) {
  const Matrix a{{4, 1}, {1, 3}};
  const auto x = solve_spd(a, {1, 2});
  EXPECT_NEAR(4 * x[0] + x[1], 1, 1e-12);
  EXPECT_NEAR(x[0] + 3 * x[1], 2, 1e-12);
  EXPECT_THROW(solve_spd(Matrix{{1, 2}, {2, 1}}, {1, 1}), ModelError);

  Matrix X(20, 2);
  std::vector<double> y(20);
  for (std::size_t i = 0; i < 20; ++i) {
    X(i, 0) = static_cast<double>(i);
    X(i, 1) = std::sin(static_cast<double>(i));
    y[i] = 1.5 + 2.0 * X(i, 0) - 0.5 * X(i, 1);
  }
  const auto beta = least_squares(X, y);
  EXPECT_NEAR(beta[0], 1.5, 1e-9);
  EXPECT_NEAR(beta[1], 2.0, 1e-9);
  EXPECT_NEAR(beta[2], -0.5, 1e-9);
}

TEST(Stats, SummaryValues) {
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile({10, 20}, 0.25), 12.5);
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(population_std(v), 2.0);
  EXPECT_DOUBLE_EQ(mean(v), 5.0);
  const std::vector<double> t{1, 3, 3, 2};
  EXPECT_EQ(argmax(t), 1u);
  EXPECT_THROW(quantile({}, 0.5), DataError);
}

TEST(Oracles, GradientOracleSelfCheck) {
  const auto g = oracle::central_gradient(
      [](std::span<const double> x) { return std::exp(x[0]) + x[1] * x[1] * x[1]; }, {0.3, 2.0});
  EXPECT_NEAR(g[0], std::exp(0.3), 1e-8);
  EXPECT_NEAR(g[1], 12.0, 1e-6);
}
