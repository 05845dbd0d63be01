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

#include "tabkit/tuning.hpp"

#include <cmath>

#include "tabkit/data.hpp"
#include "tabkit/metrics.hpp"

namespace tabkit::models {

using nlohmann::json;

const char* to_string(ScoreMetric metric) {
  return metric == ScoreMetric::accuracy ? "accuracy" : "f1_macro";
}

ScoreMetric score_metric_from_string(const std::string& s) {
  if (s == "accuracy") return ScoreMetric::accuracy;
  if (s == "f1_macro") return ScoreMetric::f1_macro;
  throw UsageError("unknown metric '" + s + "' (expected accuracy or f1_macro)");
}

double score(ScoreMetric metric, std::span<const int> y_true, std::span<const int> y_pred,
             std::size_t n_classes) {
  return metric == ScoreMetric::accuracy ? metrics::accuracy(y_true, y_pred)
                                         : metrics::f1_macro(y_true, y_pred, n_classes);
}

namespace {

struct FoldData {
  Matrix X_train;
  std::vector<int> y_train;
  Matrix X_valid;
  std::vector<int> y_valid;
};

std::vector<FoldData> materialize(const Matrix& X, std::span<const int> y, std::size_t k,
                                  std::uint64_t seed) {
  if (X.rows() != y.size()) throw DataError("X and y lengths differ");
  std::vector<FoldData> out;
  for (const auto& f : data::kfold_splits(X.rows(), k, seed)) {
    FoldData d;
    d.X_train = X.select_rows(f.train);
    d.X_valid = X.select_rows(f.valid);
    for (std::size_t r : f.train) d.y_train.push_back(y[r]);
    for (std::size_t r : f.valid) d.y_valid.push_back(y[r]);
    out.push_back(std::move(d));
  }
  return out;
}

double fold_score(const ModelSpec& spec, const FoldData& f, std::size_t n_classes,
                  ScoreMetric metric) {
  const auto model = fit(spec, f.X_train, f.y_train, n_classes, Exec::serial);
  return score(metric, f.y_valid, model->predict(f.X_valid), n_classes);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

CvResult cross_validate(const ModelSpec& spec, const Matrix& X, std::span<const int> y,
                        std::size_t n_classes, std::size_t k, std::uint64_t fold_seed,
                        ScoreMetric metric, Exec exec) {
  const auto folds = materialize(X, y, k, fold_seed);
  CvResult r;
  r.fold_scores.resize(folds.size());
  parallel_for(folds.size(), exec, [&](std::size_t f) {
    r.fold_scores[f] = fold_score(spec, folds[f], n_classes, metric);
  });
  r.mean = mean_of(r.fold_scores);
  return r;
}

SearchSpec search_spec_from_json(const json& j) {
  SearchSpec s;
  for (const auto& [key, _] : j.items()) {
    if (key != "strategy" && key != "n_draws" && key != "space" && key != "cv_folds" &&
        key != "metric" && key != "seed") {
      throw UsageError("search spec: unknown key '" + key + "'");
    }
  }
  const std::string strategy = j.value("strategy", std::string("grid"));
  if (strategy == "grid") {
    s.strategy = SearchStrategy::grid;
  } else if (strategy == "random") {
    s.strategy = SearchStrategy::random;
  } else {
    throw UsageError("search spec: unknown strategy '" + strategy + "'");
  }
  s.n_draws = j.value("n_draws", s.n_draws);
  s.space = j.value("space", json::object());
  s.cv_folds = j.value("cv_folds", s.cv_folds);
  s.metric = score_metric_from_string(j.value("metric", std::string("accuracy")));
  s.seed = j.value("seed", s.seed);
  return s;
}

json search_spec_to_json(const SearchSpec& spec) {
  return {{"strategy", spec.strategy == SearchStrategy::grid ? "grid" : "random"},
          {"n_draws", spec.n_draws},
          {"space", spec.space},
          {"cv_folds", spec.cv_folds},
          {"metric", to_string(spec.metric)},
          {"seed", spec.seed}};
}

namespace {

void validate_space(const SearchSpec& spec) {
  if (!spec.space.is_object() || spec.space.empty()) {
    throw UsageError("search space is empty");
  }
  if (spec.cv_folds < 2) throw UsageError("search needs cv_folds >= 2");
  for (const auto& [key, values] : spec.space.items()) {
    if (values.is_array()) {
      if (values.empty()) throw UsageError("search space entry '" + key + "' has no values");
    } else if (values.is_object()) {
      if (spec.strategy == SearchStrategy::grid) {
        throw UsageError("grid search needs a value list for '" + key + "'");
      }
      if (!values.contains("low") || !values.contains("high")) {
        throw UsageError("range for '" + key + "' needs low and high");
      }
      if (values.at("low").get<double>() > values.at("high").get<double>()) {
        throw UsageError("range for '" + key + "' has low > high");
      }
      if (values.value("log", false) && values.at("low").get<double>() <= 0.0) {
        throw UsageError("log range for '" + key + "' needs low > 0");
      }
    } else {
      throw UsageError("search space entry '" + key + "' must be a list or a range");
    }
  }
  if (spec.strategy == SearchStrategy::random && spec.n_draws == 0) {
    throw UsageError("random search needs n_draws >= 1");
  }
}

json draw_value(const json& values, Rng& rng) {
  if (values.is_array()) return values.at(rng.uniform_index(values.size()));
  const double lo = values.at("low").get<double>();
  const double hi = values.at("high").get<double>();
  const bool integer = values.value("integer", false);
  if (integer) {
    const auto l = static_cast<long long>(std::ceil(lo));
    const auto h = static_cast<long long>(std::floor(hi));
    if (h < l) throw UsageError("integer range contains no integers");
    return l + static_cast<long long>(rng.uniform_index(static_cast<std::size_t>(h - l + 1)));
  }
  const double u = rng.uniform();
  if (values.value("log", false)) return std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
  return lo + u * (hi - lo);
}

}  // namespace

std::vector<json> enumerate_space(const SearchSpec& spec) {
  validate_space(spec);
  std::vector<json> out;
  if (spec.strategy == SearchStrategy::grid) {
    out.push_back(json::object());
    for (const auto& [key, values] : spec.space.items()) {
      std::vector<json> next;
      for (const auto& partial : out) {
        for (const auto& v : values) {
          json a = partial;
          a[key] = v;
          next.push_back(std::move(a));
        }
      }
      out = std::move(next);
    }
  } else {
    Rng rng(spec.seed);
    for (std::size_t i = 0; i < spec.n_draws; ++i) {
      json a = json::object();
      for (const auto& [key, values] : spec.space.items()) a[key] = draw_value(values, rng);
      out.push_back(std::move(a));
    }
  }
  return out;
}

ModelConfig apply_assignment(ModelKind kind, const json& assignment) {
  json cfg = config_to_json(default_config(kind));
  for (const auto& [key, value] : assignment.items()) {
    std::string pointer = "/" + key;
    for (char& c : pointer) {
      if (c == '.') c = '/';
    }
    const json::json_pointer ptr(pointer);
    if (!cfg.contains(ptr)) {
      throw UsageError(std::string("unknown hyperparameter '") + key + "' for " + to_string(kind));
    }
    cfg[ptr] = value;
  }
  return config_from_json(kind, cfg);
}

SearchResult hyper_search(ModelKind kind, const Matrix& X, std::span<const int> y,
                          std::size_t n_classes, const SearchSpec& spec, Exec exec) {
  const auto assignments = enumerate_space(spec);
  SearchResult result;
  for (const auto& a : assignments) {
    SearchRow row;
    row.assignment = a;
    row.config = apply_assignment(kind, a);
    result.rows.push_back(std::move(row));
  }
  const auto folds = materialize(X, y, spec.cv_folds, spec.seed);
  const std::size_t units = result.rows.size() * folds.size();
  std::vector<double> scores(units);
  parallel_for(units, exec, [&](std::size_t u) {
    const auto& row = result.rows[u / folds.size()];
    scores[u] = fold_score(ModelSpec{row.config, spec.seed}, folds[u % folds.size()], n_classes,
                           spec.metric);
  });
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    auto& row = result.rows[i];
    row.fold_scores.assign(scores.begin() + static_cast<std::ptrdiff_t>(i * folds.size()),
                           scores.begin() + static_cast<std::ptrdiff_t>((i + 1) * folds.size()));
    row.mean_score = mean_of(row.fold_scores);
    if (row.mean_score > result.rows[result.best_index].mean_score) result.best_index = i;
  }
  return result;
}

json search_result_to_json(ModelKind kind, const SearchResult& result) {
  json rows = json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"assignment", r.assignment},
                    {"config", config_to_json(r.config)},
                    {"fold_scores", r.fold_scores},
                    {"mean_score", r.mean_score}});
  }
  return {{"kind", to_string(kind)},
          {"results", rows},
          {"best_index", result.best_index},
          {"best_config", config_to_json(result.best().config)},
          {"best_score", result.best().mean_score}};
}

}  // namespace tabkit::models
