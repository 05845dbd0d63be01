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

#include "helpers.hpp"
#include "oracles.hpp"
#include "tabkit/syneval.hpp"

using namespace tabkit;
using namespace tabkit::syneval;

namespace {

std::vector<double> draws(std::size_t n, Rng& rng, double shift, std::size_t levels) {
  std::vector<double> v(n);
  for (double& x : v) {
    x = levels == 0 ? rng.normal() + shift
                    : static_cast<double>(rng.uniform_index(levels)) + shift;
  }
  return v;
}

data::Dataset frame(std::vector<std::vector<double>> cols, std::vector<std::string> names,
                    std::optional<std::vector<int>> y) {
  Matrix X(cols.front().size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) X.set_column(j, cols[j]);
  std::vector<std::string> classes;
  if (y) classes = {"0", "1"};
  return data::make_dataset(std::move(X), std::move(y), std::move(names), classes);
}

}  // namespace

TEST(Ks, StatisticMatchesBruteForceExactly) {
  Rng rng(1234);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.uniform_index(50);
    const std::size_t m = 1 + rng.uniform_index(50);
    const std::size_t levels = rng.uniform_index(2) == 0 ? 0 : 1 + rng.uniform_index(6);
    const auto a = draws(n, rng, 0.0, levels);
    const auto b = draws(m, rng, rng.uniform() - 0.5, levels);
    ASSERT_EQ(ks_two_sample(a, b).D, oracle::ks_statistic(a, b)) << "trial " << t;
  }
}

TEST(Ks, PValueProperties) {
  EXPECT_EQ(ks_p_value(0.0, 30, 40), 1.0);
  double prev = 1.0;
  for (double D = 0.01; D <= 1.0; D += 0.01) {
    const double p = ks_p_value(D, 100, 100);
    EXPECT_LE(p, prev);
    EXPECT_GE(p, 0.0);
    prev = p;
  }
  const double ne = 50.0;
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * 0.1;
  EXPECT_NEAR(ks_p_value(0.1, 100, 100), oracle::kolmogorov_q(lambda), 1e-3);
  EXPECT_NEAR(ks_p_value(0.1, 100, 100), 0.68, 1e-2);
  const std::vector<double> same{1, 2, 3};
  EXPECT_EQ(ks_two_sample(same, same).D, 0.0);
  EXPECT_EQ(ks_two_sample(same, same).p, 1.0);
  EXPECT_THROW(ks_two_sample(same, std::vector<double>{}), DataError);
}

TEST(Ks, KolmogorovSeriesMatchesOracle) {
  for (double l = 0.05; l < 3.0; l += 0.05) {
    EXPECT_NEAR(kolmogorov_q(l), std::clamp(oracle::kolmogorov_q(l), 0.0, 1.0), 1e-12) << l;
  }
  EXPECT_EQ(kolmogorov_q(0.0), 1.0);
}

TEST(Rank, SpearmanMatchesRankPearsonOracle) {
  Rng rng(5);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 3 + rng.uniform_index(20);
    const auto a = draws(n, rng, 0.0, 4);
    const auto b = draws(n, rng, 0.0, 0);
    EXPECT_EQ(average_ranks(a), oracle::ranks(a));
    const auto ra = oracle::ranks(a);
    const auto rb = oracle::ranks(b);
    bool constant = std::all_of(a.begin(), a.end(), [&](double v) { return v == a[0]; });
    const double expect = constant ? 0.0 : oracle::pearson(ra, rb);
    EXPECT_NEAR(spearman(a, b), expect, 1e-12);
  }
  EXPECT_EQ(spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}), 1.0);
}

TEST(Similarity, CosineAndStd) {
  EXPECT_DOUBLE_EQ(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(std::vector<double>{2, 2}, std::vector<double>{1, 1}), 1.0);
  const auto r = frame({{1, 2, 3, 4}}, {"a"}, std::nullopt);
  const auto s = frame({{0, 0, 0, 4}}, {"a"}, std::nullopt);
  const auto c = std_compare(r, s);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_DOUBLE_EQ(c[0].real_std, std::sqrt(1.25));
  EXPECT_DOUBLE_EQ(c[0].synth_std, std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(c[0].abs_diff, std::abs(std::sqrt(1.25) - std::sqrt(3.0)));
}

TEST(Fidelity, JitteredCopyIsConsistent) {
  Rng rng(9);
  std::vector<int> yr(300), ys(300);
  auto a = draws(300, rng, 0.0, 0);
  auto b = draws(300, rng, 0.0, 0);
  auto a2 = a;
  auto b2 = b;
  for (std::size_t i = 0; i < 300; ++i) {
    a2[i] += 1e-3 * rng.normal();
    b2[i] += 1e-3 * rng.normal();
    yr[i] = a[i] > 0 ? 1 : 0;
    ys[i] = a2[i] > 0 ? 1 : 0;
  }
  const auto real = frame({a, b}, {"a", "b"}, yr);
  const auto synth = frame({b2, a2}, {"b", "a"}, ys);
  FidelityOptions opt;
  opt.forest.n_trees = 30;
  const auto rep = fidelity_report(real, synth, opt);
  ASSERT_EQ(rep.per_feature.size(), 2u);
  EXPECT_EQ(rep.per_feature[0].name, "a");
  EXPECT_EQ(rep.per_feature[0].ks_D, oracle::ks_statistic(a, a2));
  EXPECT_TRUE(rep.importance.has_value());
  EXPECT_GT(rep.importance->real[0], rep.importance->real[1]);
  EXPECT_TRUE(rep.consistent);
  const auto j = fidelity_to_json(rep);
  EXPECT_EQ(j["overall_verdict"], "consistent");
  EXPECT_EQ(j["format_version"], kFidelityFormatVersion);
  const auto csv = fidelity_to_csv(rep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "name,ks_D,ks_p,real_std,synth_std,std_abs_diff,verdict");
  EXPECT_EQ(importance_to_csv(rep).substr(0, 20), "feature,real,synth\na");
}

TEST(Fidelity, ShiftIsRejectedAndMissingTargetNoted) {
  Rng rng(10);
  const auto real = frame({draws(200, rng, 0.0, 0)}, {"a"}, std::nullopt);
  const auto synth = frame({draws(200, rng, 1.0, 0)}, {"a"}, std::nullopt);
  const auto rep = fidelity_report(real, synth);
  EXPECT_TRUE(rep.per_feature[0].rejected);
  EXPECT_FALSE(rep.consistent);
  EXPECT_FALSE(rep.importance.has_value());
  ASSERT_EQ(rep.notes.size(), 1u);
  EXPECT_NE(rep.notes[0].find("importance"), std::string::npos);
  EXPECT_TRUE(fidelity_to_json(rep)["importance"].is_null());
}

TEST(Fidelity, MismatchedCategoricalCodesAreRejected) {
  std::string real_csv = "colour\n";
  std::string synth_csv = "colour\n";
  for (int i = 0; i < 120; ++i) {
    real_csv += (i % 4 == 0 ? "red\n" : i % 4 == 1 ? "green\n" : "blue\n");
    synth_csv += (i % 3 == 0 ? "red\n" : "green\n");
  }
  const auto real = data::parse_csv(real_csv);
  const auto synth = data::apply_metadata(data::parse_csv(synth_csv), real.columns, {});
  const auto rep = fidelity_report(real, synth);
  EXPECT_TRUE(rep.per_feature[0].rejected);
  EXPECT_LT(rep.per_feature[0].ks_p, 0.05);
  EXPECT_FALSE(rep.consistent);
}

TEST(Fidelity, MismatchedColumnsAreErrors) {
  const auto real = frame({{1, 2, 3}}, {"a"}, std::nullopt);
  const auto other = frame({{1, 2, 3}}, {"z"}, std::nullopt);
  EXPECT_THROW(fidelity_report(real, other), DataError);
  EXPECT_THROW(fidelity_report(real, frame({{1, 2, 3}, {4, 5, 6}}, {"a", "b"}, std::nullopt)),
               DataError);
  FidelityOptions bad;
  bad.alpha = 1.5;
  EXPECT_THROW(fidelity_report(real, real, bad), UsageError);
}
