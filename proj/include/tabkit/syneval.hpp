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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabkit/data.hpp"
#include "tabkit/models.hpp"

namespace tabkit::syneval {

struct KsResult {
  double D = 0.0;
  double p = 1.0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// Two-sample KS statistic with the asymptotic p-value at effective size
/// ne = n m / (n + m) and lambda = (sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) D.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
double ks_p_value(double D, std::size_t n, std::size_t m);

struct StdComparison {
  std::string name;
  double real_std = 0.0;
  double synth_std = 0.0;
  double abs_diff = 0.0;
};

/// Population standard deviations of the matching feature columns.
std::vector<StdComparison> std_compare(const data::Dataset& real, const data::Dataset& synth);

double cosine_similarity(std::span<const double> a, std::span<const double> b);
/// Average ranks for ties, starting at 1.
std::vector<double> average_ranks(std::span<const double> v);
/// Pearson correlation of average ranks; 0 when either side is constant.
double spearman(std::span<const double> a, std::span<const double> b);

struct ImportanceSimilarity {
  std::vector<double> real;
  std::vector<double> synth;
  double cosine = 0.0;
  double spearman = 0.0;
};

ImportanceSimilarity importance_similarity(const data::Dataset& real, const data::Dataset& synth,
                                           const models::ForestConfig& config, std::uint64_t seed,
                                           Exec exec = Exec::parallel);

struct FeatureFidelity {
  std::string name;
  double ks_D = 0.0;
  double ks_p = 1.0;
  double real_std = 0.0;
  double synth_std = 0.0;
  double std_abs_diff = 0.0;
  bool rejected = false;
};

struct FidelityOptions {
  double alpha = 0.05;
  double spearman_threshold = 0.5;
  models::ForestConfig forest;
  std::uint64_t seed = 42;
  Exec exec = Exec::parallel;
};

struct FidelityReport {
  std::vector<FeatureFidelity> per_feature;
  std::optional<ImportanceSimilarity> importance;
  bool consistent = false;
  double alpha = 0.05;
  double spearman_threshold = 0.5;
  std::vector<std::string> notes;
};

inline constexpr int kFidelityFormatVersion = 1;

/// Columns are matched by name. Importance similarity is skipped with a note
/// when either side lacks a target.
FidelityReport fidelity_report(const data::Dataset& real, const data::Dataset& synth,
                               const FidelityOptions& options = {});

nlohmann::json fidelity_to_json(const FidelityReport& report);
/// Columns name,ks_D,ks_p,real_std,synth_std,std_abs_diff,verdict.
std::string fidelity_to_csv(const FidelityReport& report);
/// Columns feature,real,synth for the importance bar chart.
std::string importance_to_csv(const FidelityReport& report);

}  // namespace tabkit::syneval
