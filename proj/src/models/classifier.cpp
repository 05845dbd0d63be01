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

#include <algorithm>
#include <set>
#include <string>

#include "tabkit/ensembles.hpp"
#include "tabkit/models.hpp"

namespace tabkit::models {

namespace {

using nlohmann::json;

constexpr const char* kKindNames[] = {"logreg", "dtree", "rforest", "linsvm", "knn",
                                      "gnb",    "zeror", "lrforest", "svtree"};

std::string batch_to_string(const BatchStrategy& b) {
  switch (b.kind) {
    case BatchStrategy::Kind::batch:
      return "batch";
    case BatchStrategy::Kind::online:
      return "online";
    case BatchStrategy::Kind::mini_batch:
      return "mini_batch:" + std::to_string(b.size);
  }
  return "batch";
}

BatchStrategy batch_from_string(const std::string& s) {
  if (s == "batch") return BatchStrategy::full();
  if (s == "online") return BatchStrategy::online();
  const std::string prefix = "mini_batch:";
  if (s.rfind(prefix, 0) == 0) {
    const auto size = std::stoul(s.substr(prefix.size()));
    if (size == 0) throw UsageError("mini_batch size must be >= 1");
    return BatchStrategy::mini_batch(size);
  }
  throw UsageError("unknown batch strategy '" + s + "' (batch | online | mini_batch:<k>)");
}

std::string optimizer_to_string(OptimizerKind k) { return k == OptimizerKind::adam ? "adam" : "sgd"; }

OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "adam") return OptimizerKind::adam;
  if (s == "sgd") return OptimizerKind::sgd;
  throw UsageError("unknown optimizer '" + s + "'");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw UsageError(std::string(where) + ": config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) throw UsageError(std::string(where) + ": unknown hyperparameter '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json to_json(const LogRegConfig& c) {
  return {{"l2", c.l2},
          {"lr", c.lr},
          {"epochs", c.epochs},
          {"batch", batch_to_string(c.batch)},
          {"optimizer", optimizer_to_string(c.optimizer)},
          {"standardize_inputs", c.standardize_inputs}};
}

LogRegConfig logreg_from(const json& j) {
  check_keys(j, {"l2", "lr", "epochs", "batch", "optimizer", "standardize_inputs"}, "logreg");
  LogRegConfig c;
  read(j, "l2", c.l2);
  read(j, "lr", c.lr);
  read(j, "epochs", c.epochs);
  if (j.contains("batch")) c.batch = batch_from_string(j.at("batch").get<std::string>());
  if (j.contains("optimizer")) c.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
  read(j, "standardize_inputs", c.standardize_inputs);
  if (c.l2 < 0) throw UsageError("logreg: l2 must be >= 0");
  return c;
}

json to_json(const TreeConfig& c) {
  return {{"max_depth", c.max_depth},
          {"min_samples_leaf", c.min_samples_leaf},
          {"max_features", c.max_features}};
}

TreeConfig tree_from(const json& j, TreeConfig c = {}) {
  check_keys(j, {"max_depth", "min_samples_leaf", "max_features"}, "dtree");
  read(j, "max_depth", c.max_depth);
  read(j, "min_samples_leaf", c.min_samples_leaf);
  read(j, "max_features", c.max_features);
  if (c.min_samples_leaf == 0) throw UsageError("dtree: min_samples_leaf must be >= 1");
  return c;
}

json to_json(const ForestConfig& c) {
  return {{"n_trees", c.n_trees},
          {"max_depth", c.max_depth},
          {"max_features", c.max_features},
          {"bootstrap", c.bootstrap},
          {"min_samples_leaf", c.min_samples_leaf}};
}

ForestConfig forest_from(const json& j) {
  check_keys(j, {"n_trees", "max_depth", "max_features", "bootstrap", "min_samples_leaf"}, "rforest");
  ForestConfig c;
  read(j, "n_trees", c.n_trees);
  read(j, "max_depth", c.max_depth);
  read(j, "max_features", c.max_features);
  read(j, "bootstrap", c.bootstrap);
  read(j, "min_samples_leaf", c.min_samples_leaf);
  if (c.n_trees == 0) throw UsageError("rforest: n_trees must be >= 1");
  if (c.min_samples_leaf == 0) throw UsageError("rforest: min_samples_leaf must be >= 1");
  return c;
}

json to_json(const SvmConfig& c) {
  return {{"C", c.C},
          {"lr", c.lr},
          {"epochs", c.epochs},
          {"batch", batch_to_string(c.batch)},
          {"optimizer", optimizer_to_string(c.optimizer)},
          {"standardize_inputs", c.standardize_inputs}};
}

SvmConfig svm_from(const json& j) {
  check_keys(j, {"C", "lr", "epochs", "batch", "optimizer", "standardize_inputs"}, "linsvm");
  SvmConfig c;
  read(j, "C", c.C);
  read(j, "lr", c.lr);
  read(j, "epochs", c.epochs);
  if (j.contains("batch")) c.batch = batch_from_string(j.at("batch").get<std::string>());
  if (j.contains("optimizer")) c.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
  read(j, "standardize_inputs", c.standardize_inputs);
  if (!(c.C > 0)) throw UsageError("linsvm: C must be positive");
  return c;
}

}  // namespace

const char* to_string(ModelKind kind) { return kKindNames[static_cast<int>(kind)]; }

ModelKind model_kind_from_string(const std::string& s) {
  for (int i = 0; i < static_cast<int>(std::size(kKindNames)); ++i) {
    if (s == kKindNames[i]) return static_cast<ModelKind>(i);
  }
  throw UsageError("unknown model kind '" + s + "'");
}

ModelKind kind_of(const ModelConfig& config) { return static_cast<ModelKind>(config.index()); }

ModelConfig default_config(ModelKind kind) {
  switch (kind) {
    case ModelKind::logreg:
      return LogRegConfig{};
    case ModelKind::dtree:
      return TreeConfig{};
    case ModelKind::rforest:
      return ForestConfig{};
    case ModelKind::linsvm:
      return SvmConfig{};
    case ModelKind::knn:
      return KnnConfig{};
    case ModelKind::gnb:
      return GnbConfig{};
    case ModelKind::zeror:
      return ZeroRConfig{};
    case ModelKind::lrforest:
      return LRForestConfig{};
    case ModelKind::svtree:
      return SVTreeConfig{};
  }
  throw UsageError("unknown model kind");
}

json config_to_json(const ModelConfig& config) {
  return std::visit(
      [](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, LogRegConfig> || std::is_same_v<T, TreeConfig> ||
                      std::is_same_v<T, ForestConfig> || std::is_same_v<T, SvmConfig>) {
          return to_json(c);
        } else if constexpr (std::is_same_v<T, KnnConfig>) {
          return {{"k", c.k}};
        } else if constexpr (std::is_same_v<T, GnbConfig>) {
          return {{"var_floor", c.var_floor}};
        } else if constexpr (std::is_same_v<T, ZeroRConfig>) {
          return json::object();
        } else if constexpr (std::is_same_v<T, LRForestConfig>) {
          return {{"forest", to_json(c.forest)}, {"meta", to_json(c.meta)}};
        } else {
          return {{"svm", to_json(c.svm)}, {"tree", to_json(c.tree)}};
        }
      },
      config);
}

ModelConfig config_from_json(ModelKind kind, const json& j) {
  const json cfg = j.is_null() ? json::object() : j;
  switch (kind) {
    case ModelKind::logreg:
      return logreg_from(cfg);
    case ModelKind::dtree:
      return tree_from(cfg);
    case ModelKind::rforest:
      return forest_from(cfg);
    case ModelKind::linsvm:
      return svm_from(cfg);
    case ModelKind::knn: {
      check_keys(cfg, {"k"}, "knn");
      KnnConfig c;
      read(cfg, "k", c.k);
      if (c.k == 0) throw UsageError("knn: k must be >= 1");
      return c;
    }
    case ModelKind::gnb: {
      check_keys(cfg, {"var_floor"}, "gnb");
      GnbConfig c;
      read(cfg, "var_floor", c.var_floor);
      return c;
    }
    case ModelKind::zeror:
      check_keys(cfg, {}, "zeror");
      return ZeroRConfig{};
    case ModelKind::lrforest: {
      check_keys(cfg, {"forest", "meta"}, "lrforest");
      LRForestConfig c;
      if (cfg.contains("forest")) c.forest = forest_from(cfg.at("forest"));
      if (cfg.contains("meta")) c.meta = logreg_from(cfg.at("meta"));
      return c;
    }
    case ModelKind::svtree: {
      check_keys(cfg, {"svm", "tree"}, "svtree");
      SVTreeConfig c;
      if (cfg.contains("svm")) c.svm = svm_from(cfg.at("svm"));
      if (cfg.contains("tree")) c.tree = tree_from(cfg.at("tree"), c.tree);
      return c;
    }
  }
  throw UsageError("unknown model kind");
}

json spec_to_json(const ModelSpec& spec) {
  return {{"kind", to_string(spec.kind())}, {"config", config_to_json(spec.config)}, {"seed", spec.seed}};
}

ModelSpec spec_from_json(const json& j) {
  const ModelKind kind = model_kind_from_string(j.at("kind").get<std::string>());
  return {config_from_json(kind, j.value("config", json::object())), j.value("seed", std::uint64_t{42})};
}

Matrix Classifier::predict_proba(const Matrix&) const {
  throw ModelError(std::string(to_string(kind())) + " does not provide predict_proba");
}

Matrix Classifier::decision_function(const Matrix&) const {
  throw ModelError(std::string(to_string(kind())) + " does not provide decision_function");
}

std::vector<int> Classifier::predict(const Matrix& X) const {
  const Matrix p = predict_proba(X);
  std::vector<int> out(p.rows());
  for (std::size_t r = 0; r < p.rows(); ++r) out[r] = static_cast<int>(argmax(p.row(r)));
  return out;
}

void Classifier::check_input(const Matrix& X) const {
  if (X.cols() != n_features_) {
    throw ModelError("input has " + std::to_string(X.cols()) + " columns, model expects " +
                     std::to_string(n_features_));
  }
}

void require_two_classes(std::span<const int> y, const char* who) {
  const std::set<int> distinct(y.begin(), y.end());
  if (distinct.size() < 2) {
    throw ModelError(std::string(who) + ": training labels contain a single class");
  }
}

ClassifierPtr fit(const ModelSpec& spec, const Matrix& X, std::span<const int> y,
                  std::size_t n_classes, Exec exec) {
  if (X.rows() != y.size()) throw ModelError("fit: X and y lengths differ");
  if (X.rows() == 0) throw ModelError("fit: empty training set");
  for (int c : y) {
    if (c < 0 || static_cast<std::size_t>(c) >= n_classes) throw ModelError("fit: class code out of range");
  }
  return std::visit(
      [&](const auto& c) -> ClassifierPtr {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, LogRegConfig>) {
          return fit_logreg(X, y, n_classes, c, spec.seed);
        } else if constexpr (std::is_same_v<T, TreeConfig>) {
          return fit_dtree(X, y, n_classes, c, spec.seed);
        } else if constexpr (std::is_same_v<T, ForestConfig>) {
          return fit_rforest(X, y, n_classes, c, spec.seed, exec);
        } else if constexpr (std::is_same_v<T, SvmConfig>) {
          return fit_linsvm(X, y, n_classes, c, spec.seed, exec);
        } else if constexpr (std::is_same_v<T, KnnConfig>) {
          return fit_knn(X, y, n_classes, c, spec.seed);
        } else if constexpr (std::is_same_v<T, GnbConfig>) {
          return fit_gnb(X, y, n_classes, c, spec.seed);
        } else if constexpr (std::is_same_v<T, ZeroRConfig>) {
          return fit_zeror(X, y, n_classes, spec.seed);
        } else if constexpr (std::is_same_v<T, LRForestConfig>) {
          return ensembles::lrforest_fit(X, y, n_classes, c, spec.seed, exec);
        } else {
          return ensembles::svtree_fit(X, y, n_classes, c, spec.seed, exec);
        }
      },
      spec.config);
}

ClassifierPtr fit(const ModelSpec& spec, const data::Dataset& train, Exec exec) {
  if (train.has_missing()) throw DataError("training data has missing values; impute first");
  return fit(spec, train.X, train.labels(), train.n_classes(), exec);
}

namespace {
bool is_ensemble(ModelKind kind) { return kind == ModelKind::lrforest || kind == ModelKind::svtree; }
}  // namespace

json model_to_json(const Classifier& model) {
  json j = {{"format_version", kModelFormatVersion},
            {"kind", to_string(model.kind())},
            {"config", config_to_json(model.spec().config)},
            {"seed", model.spec().seed},
            {"n_features", model.n_features()},
            {"n_classes", model.n_classes()}};
  // Ensembles nest their components at the top level: {base, meta, augmentation_width}.
  if (is_ensemble(model.kind())) {
    j.update(model.params_to_json());
  } else {
    j["params"] = model.params_to_json();
  }
  return j;
}

ClassifierPtr model_from_json(const json& j) {
  const int version = j.at("format_version").get<int>();
  if (version != kModelFormatVersion) {
    throw ModelError("unsupported model format_version " + std::to_string(version));
  }
  const ModelSpec spec = spec_from_json(j);
  const auto d = j.at("n_features").get<std::size_t>();
  const auto k = j.at("n_classes").get<std::size_t>();
  const json& p = is_ensemble(spec.kind()) ? j : j.at("params");
  switch (spec.kind()) {
    case ModelKind::logreg:
      return LogisticRegression::from_params(spec, d, k, p);
    case ModelKind::dtree:
      return DecisionTree::from_params(spec, d, k, p);
    case ModelKind::rforest:
      return RandomForest::from_params(spec, d, k, p);
    case ModelKind::linsvm:
      return LinearSvm::from_params(spec, d, k, p);
    case ModelKind::knn:
      return KNearestNeighbors::from_params(spec, d, k, p);
    case ModelKind::gnb:
      return GaussianNaiveBayes::from_params(spec, d, k, p);
    case ModelKind::zeror:
      return ZeroR::from_params(spec, d, k, p);
    case ModelKind::lrforest:
      return ensembles::LRForest::from_params(spec, d, k, p);
    case ModelKind::svtree:
      return ensembles::SVTree::from_params(spec, d, k, p);
  }
  throw ModelError("unknown model kind");
}

}  // namespace tabkit::models
