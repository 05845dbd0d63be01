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
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabkit/models.hpp"

namespace tabkit::models {

enum class ScoreMetric { accuracy, f1_macro };
const char* to_string(ScoreMetric metric);
ScoreMetric score_metric_from_string(const std::string& s);

double score(ScoreMetric metric, std::span<const int> y_true, std::span<const int> y_pred,
             std::size_t n_classes);

struct CvResult {
  std::vector<double> fold_scores;
  double mean = 0.0;
};

/// Fits spec on every kfold_splits(n, k, fold_seed) training fold and scores
/// the held-out rows.
CvResult cross_validate(const ModelSpec& spec, const Matrix& X, std::span<const int> y,
                        std::size_t n_classes, std::size_t k, std::uint64_t fold_seed,
                        ScoreMetric metric = ScoreMetric::accuracy, Exec exec = Exec::parallel);

enum class SearchStrategy { grid, random };

/// space maps (possibly dotted) config keys to either a value list or, for
/// random search, a range object {"low", "high", "integer", "log"}.
struct SearchSpec {
  SearchStrategy strategy = SearchStrategy::grid;
  std::size_t n_draws = 10;
  nlohmann::json space = nlohmann::json::object();
  std::size_t cv_folds = 5;
  ScoreMetric metric = ScoreMetric::accuracy;
  std::uint64_t seed = 42;
};

SearchSpec search_spec_from_json(const nlohmann::json& j);
nlohmann::json search_spec_to_json(const SearchSpec& spec);

struct SearchRow {
  nlohmann::json assignment;
  ModelConfig config;
  std::vector<double> fold_scores;
  double mean_score = 0.0;
};

struct SearchResult {
  std::vector<SearchRow> rows;
  std::size_t best_index = 0;

  const SearchRow& best() const { return rows.at(best_index); }
};

/// Assignments in enumeration order: the Cartesian product in key order for
/// grid, n_draws seeded draws for random.
std::vector<nlohmann::json> enumerate_space(const SearchSpec& spec);

/// Sets each (dotted) key of assignment on the default config of kind.
ModelConfig apply_assignment(ModelKind kind, const nlohmann::json& assignment);

/// Ties go to the first enumerated config.
SearchResult hyper_search(ModelKind kind, const Matrix& X, std::span<const int> y,
                          std::size_t n_classes, const SearchSpec& spec,
                          Exec exec = Exec::parallel);

nlohmann::json search_result_to_json(ModelKind kind, const SearchResult& result);

}  // namespace tabkit::models
