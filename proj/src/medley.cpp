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

#include "tabkit/medley.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tabkit/metrics.hpp"

namespace tabkit::medley {

using nlohmann::json;

namespace {

void check_rows(const Matrix& X, std::span<const int> y, const char* who) {
  if (X.rows() != y.size()) throw DataError(std::string(who) + ": X and y lengths differ");
  if (X.rows() == 0) throw DataError(std::string(who) + ": no rows");
}

Matrix one_row(std::span<const double> x) {
  Matrix m(1, x.size());
  std::copy(x.begin(), x.end(), m.row(0).begin());
  return m;
}

}  // namespace

DropColumnResult drop_column_importances(const ModelSpec& spec, const Matrix& X_train,
                                         std::span<const int> y_train, std::size_t n_classes,
                                         const Matrix& X_eval, std::span<const int> y_eval,
                                         Exec exec) {
  check_rows(X_train, y_train, "drop_column_importances");
  check_rows(X_eval, y_eval, "drop_column_importances");
  if (X_eval.cols() != X_train.cols()) {
    throw DataError("drop_column_importances: train and eval column counts differ");
  }
  DropColumnResult out;
  const auto base = models::fit(spec, X_train, y_train, n_classes, Exec::serial);
  out.baseline = metrics::accuracy(y_eval, base->predict(X_eval));
  const std::size_t d = X_train.cols();
  out.scores.assign(d, 0.0);
  parallel_for(d, exec, [&](std::size_t j) {
    Matrix Xt = X_train;
    Matrix Xe = X_eval;
    for (std::size_t r = 0; r < Xt.rows(); ++r) Xt(r, j) = 0.0;
    for (std::size_t r = 0; r < Xe.rows(); ++r) Xe(r, j) = 0.0;
    const auto refit = models::fit(spec, Xt, y_train, n_classes, Exec::serial);
    out.scores[j] = out.baseline - metrics::accuracy(y_eval, refit->predict(Xe));
  });
  return out;
}

std::vector<double> permutation_importances(const models::Classifier& model, const Matrix& X_eval,
                                            std::span<const int> y_eval, std::size_t n_repeats,
                                            std::uint64_t seed, Exec exec) {
  check_rows(X_eval, y_eval, "permutation_importances");
  if (n_repeats == 0) throw UsageError("permutation_importances: n_repeats must be >= 1");
  const double baseline = metrics::accuracy(y_eval, model.predict(X_eval));
  const std::size_t d = X_eval.cols();
  const Rng root(seed);
  std::vector<double> scores(d, 0.0);
  parallel_for(d, exec, [&](std::size_t j) {
    double total = 0.0;
    for (std::size_t r = 0; r < n_repeats; ++r) {
      Rng rng = root.split(j * n_repeats + r);
      const auto perm = permutation(X_eval.rows(), rng);
      Matrix Xp = X_eval;
      for (std::size_t i = 0; i < Xp.rows(); ++i) Xp(i, j) = X_eval(perm[i], j);
      total += baseline - metrics::accuracy(y_eval, model.predict(Xp));
    }
    scores[j] = total / static_cast<double>(n_repeats);
  });
  return scores;
}

MedleyInterpreter::MedleyInterpreter(const ModelSpec& spec, const Matrix& X_train,
                                     std::span<const int> y_train, std::size_t n_classes,
                                     MedleyOptions options)
    : MedleyInterpreter(spec, X_train, y_train, n_classes, X_train, y_train, options) {}

MedleyInterpreter::MedleyInterpreter(const ModelSpec& spec, const Matrix& X_train,
                                     std::span<const int> y_train, std::size_t n_classes,
                                     const Matrix& X_eval, std::span<const int> y_eval,
                                     MedleyOptions options) {
  drop_ = drop_column_importances(spec, X_train, y_train, n_classes, X_eval, y_eval, options.exec);
  model_ = models::fit(spec, X_train, y_train, n_classes, options.exec);
  perm_ = permutation_importances(*model_, X_eval, y_eval, options.n_repeats, options.seed,
                                  options.exec);
}

Explanation MedleyInterpreter::interpret(std::span<const double> x) const {
  if (x.size() != model_->n_features()) {
    throw DataError("interpret: instance has " + std::to_string(x.size()) +
                    " values, model expects " + std::to_string(model_->n_features()));
  }
  Explanation e;
  e.instance.assign(x.begin(), x.end());
  e.predicted_class = model_->predict(one_row(x)).front();
  e.drop_scores = drop_.scores;
  e.perm_scores = perm_;
  e.combined_scores.resize(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) e.combined_scores[j] = e.drop_scores[j] + e.perm_scores[j];
  e.baseline_accuracy = drop_.baseline;
  return e;
}

json explanation_to_json(const Explanation& e, const std::vector<std::string>& names) {
  if (names.size() != e.combined_scores.size()) throw DataError("feature name count mismatch");
  json features = json::array();
  for (std::size_t j = 0; j < names.size(); ++j) {
    features.push_back({{"name", names[j]},
                        {"drop", e.drop_scores[j]},
                        {"perm", e.perm_scores[j]},
                        {"combined", e.combined_scores[j]}});
  }
  return {{"instance", e.instance},
          {"predicted_class", e.predicted_class},
          {"baseline_accuracy", e.baseline_accuracy},
          {"features", features}};
}

std::string explanation_to_csv(const Explanation& e, const std::vector<std::string>& names) {
  if (names.size() != e.combined_scores.size()) throw DataError("feature name count mismatch");
  std::string out = "feature,drop,perm,combined\n";
  for (std::size_t j = 0; j < names.size(); ++j) {
    out += names[j] + "," + data::format_number(e.drop_scores[j]) + "," +
           data::format_number(e.perm_scores[j]) + "," +
           data::format_number(e.combined_scores[j]) + "\n";
  }
  return out;
}

// --- competing explainers --------------------------------------------------

std::vector<double> class_score(const models::Classifier& model, const Matrix& X, int c) {
  std::vector<double> out(X.rows());
  if (model.has_proba()) {
    const Matrix p = model.predict_proba(X);
    for (std::size_t r = 0; r < X.rows(); ++r) out[r] = p(r, static_cast<std::size_t>(c));
    return out;
  }
  const Matrix f = model.decision_function(X);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    if (f.cols() == 1) {
      out[r] = c == 1 ? f(r, 0) : -f(r, 0);
    } else {
      out[r] = f(r, static_cast<std::size_t>(c));
    }
  }
  return out;
}

std::vector<double> local_linear_explain(const models::Classifier& model,
                                         std::span<const double> x,
                                         std::span<const double> feature_std,
                                         const LocalLinearConfig& config) {
  const std::size_t d = x.size();
  if (feature_std.size() != d) throw DataError("local_linear_explain: std length mismatch");
  if (config.n_samples < 2) throw UsageError("local_linear_explain: n_samples must be >= 2");
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < d; ++j) {
    if (feature_std[j] > 0.0) active.push_back(j);
  }
  if (active.empty()) {
    throw DataError("local_linear_explain: every feature is constant, perturbations are degenerate");
  }
  const std::size_t m = active.size();
  const double width =
      config.kernel_width > 0.0 ? config.kernel_width : 0.75 * std::sqrt(static_cast<double>(m));
  const int c = model.predict(one_row(x)).front();

  Rng rng(config.seed);
  const std::size_t n = config.n_samples;
  Matrix Z(n, d);
  Matrix D(n, m);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    double dist2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) Z(i, j) = x[j];
    for (std::size_t a = 0; a < m; ++a) {
      const double e = rng.normal();
      const std::size_t j = active[a];
      Z(i, j) = x[j] + feature_std[j] * e;
      D(i, a) = Z(i, j) - x[j];
      dist2 += e * e;
    }
    w[i] = std::exp(-dist2 / (width * width));
  }
  const std::vector<double> t = class_score(model, Z, c);

  double wsum = 0.0;
  double tbar = 0.0;
  std::vector<double> dbar(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    wsum += w[i];
    tbar += w[i] * t[i];
    for (std::size_t a = 0; a < m; ++a) dbar[a] += w[i] * D(i, a);
  }
  if (!(wsum > 0.0)) throw DataError("local_linear_explain: all kernel weights vanished");
  tbar /= wsum;
  for (double& v : dbar) v /= wsum;
  Matrix A(m, m);
  std::vector<double> b(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < m; ++a) {
      const double da = D(i, a) - dbar[a];
      b[a] += w[i] * da * (t[i] - tbar);
      for (std::size_t e = 0; e <= a; ++e) A(a, e) += w[i] * da * (D(i, e) - dbar[e]);
    }
  }
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t e = 0; e < a; ++e) A(e, a) = A(a, e);
    A(a, a) += config.ridge;
  }
  const auto beta = solve_spd(std::move(A), std::move(b));
  std::vector<double> out(d, 0.0);
  for (std::size_t a = 0; a < m; ++a) out[active[a]] = beta[a];
  return out;
}

std::vector<GreedyPick> greedy_explain(const models::Classifier& model, std::span<const double> x,
                                       std::size_t K) {
  const std::size_t d = x.size();
  if (K > d) throw UsageError("greedy_explain: K=" + std::to_string(K) + " exceeds d=" + std::to_string(d));
  Matrix current = one_row(x);
  const int c = model.predict(current).front();
  std::vector<bool> removed(d, false);
  std::vector<GreedyPick> picks;
  for (std::size_t step = 0; step < K; ++step) {
    const double base = class_score(model, current, c).front();
    std::vector<std::size_t> candidates;
    for (std::size_t j = 0; j < d; ++j) {
      if (!removed[j]) candidates.push_back(j);
    }
    Matrix trial(candidates.size(), d);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      std::copy(current.row(0).begin(), current.row(0).end(), trial.row(i).begin());
      trial(i, candidates[i]) = 0.0;
    }
    const auto s = class_score(model, trial, c);
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      if (base - s[i] > base - s[best]) best = i;
    }
    picks.push_back({candidates[best], base - s[best]});
    removed[candidates[best]] = true;
    current(0, candidates[best]) = 0.0;
  }
  return picks;
}

std::vector<double> greedy_scores(const std::vector<GreedyPick>& picks, std::size_t d) {
  std::vector<double> out(d, 0.0);
  for (std::size_t r = 0; r < picks.size(); ++r) {
    out.at(picks[r].feature) = static_cast<double>(d - r);
  }
  return out;
}

std::vector<double> parzen_explain(const models::Classifier& model, std::span<const double> x,
                                   const Matrix& X_train, double bandwidth) {
  if (!(bandwidth > 0.0)) throw UsageError("parzen_explain: bandwidth must be > 0");
  if (X_train.rows() == 0) throw DataError("parzen_explain: empty training set");
  if (X_train.cols() != x.size()) throw DataError("parzen_explain: column count mismatch");
  const std::size_t d = x.size();
  const int c = model.predict(one_row(x)).front();
  const auto labels = model.predict(X_train);
  const double h2 = bandwidth * bandwidth;
  std::vector<double> expo(X_train.rows());
  for (std::size_t i = 0; i < X_train.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += (x[j] - X_train(i, j)) * (x[j] - X_train(i, j));
    expo[i] = -s / (2.0 * h2);
  }
  const double shift = *std::max_element(expo.begin(), expo.end());
  double k_all = 0.0;
  double k_c = 0.0;
  std::vector<double> g_all(d, 0.0);
  std::vector<double> g_c(d, 0.0);
  for (std::size_t i = 0; i < X_train.rows(); ++i) {
    const double k = std::exp(expo[i] - shift);
    k_all += k;
    if (labels[i] == c) k_c += k;
    for (std::size_t j = 0; j < d; ++j) {
      const double g = -k * (x[j] - X_train(i, j)) / h2;
      g_all[j] += g;
      if (labels[i] == c) g_c[j] += g;
    }
  }
  std::vector<double> grad(d);
  for (std::size_t j = 0; j < d; ++j) grad[j] = (g_c[j] * k_all - k_c * g_all[j]) / (k_all * k_all);
  return grad;
}

// --- gold benchmark --------------------------------------------------------

GoldDataset generate_gold(const GoldConfig& config) {
  if (config.K > config.d) {
    throw UsageError("generate_gold: K=" + std::to_string(config.K) + " exceeds d=" +
                     std::to_string(config.d));
  }
  if (config.n < 2) throw UsageError("generate_gold: n must be >= 2");
  const Rng root(config.seed);
  Rng x_rng = root.split(0);
  Rng pick_rng = root.split(1);
  Rng coef_rng = root.split(2);
  Rng label_rng = root.split(3);
  GoldDataset g;
  g.config = config;
  const auto perm = permutation(config.d, pick_rng);
  g.gold_features.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(config.K));
  std::sort(g.gold_features.begin(), g.gold_features.end());
  g.coefficients.assign(config.d, 0.0);
  for (std::size_t j : g.gold_features) {
    const double sign = coef_rng.uniform() < 0.5 ? -1.0 : 1.0;
    g.coefficients[j] = sign * (1.0 + coef_rng.uniform());
  }
  Matrix X(config.n, config.d);
  std::vector<int> y(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < config.d; ++j) {
      X(i, j) = x_rng.normal();
      z += g.coefficients[j] * X(i, j);
    }
    y[i] = 1.0 / (1.0 + std::exp(-z)) > label_rng.uniform() ? 1 : 0;
  }
  g.dataset = data::make_dataset(std::move(X), std::move(y), {}, {"0", "1"});
  return g;
}

std::vector<GoldDataset> gold_suite(std::size_t n_datasets, const GoldConfig& base) {
  std::vector<GoldDataset> suite;
  const Rng root(base.seed);
  for (std::size_t i = 0; i < n_datasets; ++i) {
    GoldConfig c = base;
    c.seed = root.split(i).state();
    suite.push_back(generate_gold(c));
  }
  return suite;
}

std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t K) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(scores[a]) > std::abs(scores[b]);
  });
  idx.resize(std::min(K, idx.size()));
  return idx;
}

const char* to_string(ExplainerId id) {
  switch (id) {
    case ExplainerId::medley: return "medley";
    case ExplainerId::local_linear: return "local_linear";
    case ExplainerId::greedy: return "greedy";
    case ExplainerId::parzen: return "parzen";
  }
  return "?";
}

ExplainerId explainer_from_string(const std::string& s) {
  if (s == "medley") return ExplainerId::medley;
  if (s == "local_linear" || s == "local-linear" || s == "lime") return ExplainerId::local_linear;
  if (s == "greedy") return ExplainerId::greedy;
  if (s == "parzen") return ExplainerId::parzen;
  throw UsageError("unknown explainer '" + s + "' (expected medley, local_linear, greedy or parzen)");
}

Explainer builtin_explainer(ExplainerId id, const BenchConfig& config) {
  switch (id) {
    case ExplainerId::medley:
      return [](const ExplainContext& ctx, std::span<const double> x) {
        if (ctx.medley == nullptr) throw UsageError("medley explainer needs an interpreter");
        return ctx.medley->interpret(x).combined_scores;
      };
    case ExplainerId::local_linear:
      return [cfg = config.local_linear](const ExplainContext& ctx, std::span<const double> x) {
        return local_linear_explain(ctx.model, x, ctx.feature_std, cfg);
      };
    case ExplainerId::greedy:
      return [](const ExplainContext& ctx, std::span<const double> x) {
        return greedy_scores(greedy_explain(ctx.model, x, ctx.K), x.size());
      };
    case ExplainerId::parzen:
      return [bw = config.parzen_bandwidth](const ExplainContext& ctx, std::span<const double> x) {
        const double h = bw > 0.0 ? bw : std::sqrt(static_cast<double>(x.size()));
        return parzen_explain(ctx.model, x, ctx.X_train, h);
      };
  }
  throw UsageError("unknown explainer");
}

RecallResult recall_on_gold(const Explainer& explainer, bool needs_medley,
                            const std::vector<GoldDataset>& suite, const BenchConfig& config,
                            Exec exec) {
  if (suite.empty()) throw UsageError("recall_on_gold: empty suite");
  if (config.n_instances == 0) throw UsageError("recall_on_gold: n_instances must be >= 1");
  RecallResult result;
  result.per_dataset.resize(suite.size());
  parallel_for(suite.size(), exec, [&](std::size_t s) {
    const GoldDataset& g = suite[s];
    const auto& ds = g.dataset;
    const auto split = data::split_indices(ds.n_rows(), &ds.labels(), ds.class_names,
                                           {config.test_fraction, true, config.seed});
    const Matrix X_train = ds.X.select_rows(split.train);
    std::vector<int> y_train;
    for (std::size_t r : split.train) y_train.push_back(ds.labels()[r]);
    std::unique_ptr<MedleyInterpreter> interp;
    ClassifierPtr model;
    if (needs_medley) {
      interp = std::make_unique<MedleyInterpreter>(
          config.model, X_train, y_train, ds.n_classes(),
          MedleyOptions{config.n_repeats, config.seed, Exec::serial});
      model = interp->model();
    } else {
      model = models::fit(config.model, X_train, y_train, ds.n_classes(), Exec::serial);
    }
    std::vector<double> stds(X_train.cols());
    for (std::size_t j = 0; j < X_train.cols(); ++j) stds[j] = population_std(X_train.column(j));
    const ExplainContext ctx{*model, interp.get(), X_train, stds, g.config.K};
    const std::size_t count = std::min(config.n_instances, split.test.size());
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const auto x = ds.X.row(split.test[i]);
      const auto picks = top_k(explainer(ctx, x), g.config.K);
      std::size_t hits = 0;
      for (std::size_t f : picks) {
        hits += std::binary_search(g.gold_features.begin(), g.gold_features.end(), f);
      }
      total += static_cast<double>(hits) / static_cast<double>(g.config.K);
    }
    result.per_dataset[s] = total / static_cast<double>(count);
  });
  double sum = 0.0;
  for (double r : result.per_dataset) sum += r;
  result.mean_recall = sum / static_cast<double>(suite.size());
  return result;
}

RecallResult recall_on_gold(ExplainerId id, const std::vector<GoldDataset>& suite,
                            const BenchConfig& config, Exec exec) {
  return recall_on_gold(builtin_explainer(id, config), id == ExplainerId::medley, suite, config,
                        exec);
}

}  // namespace tabkit::medley
