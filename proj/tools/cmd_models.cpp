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
#include <cmath>
#include <ostream>
#include <set>

#include "common.hpp"
#include "tabkit/error.hpp"
#include "tabkit/metrics.hpp"
#include "tabkit/tuning.hpp"

namespace tabkit::cli {

namespace {

models::ModelSpec model_spec(const std::string& kind, const std::string& params,
                             std::uint64_t seed) {
  const auto k = models::model_kind_from_string(kind);
  const json p = params.empty() ? json::object() : parse_json_arg(params, "--params");
  return models::ModelSpec{models::config_from_json(k, p), seed};
}

std::string safe_name(const std::string& label) {
  std::string out;
  for (char c : label) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out.empty() ? "class" : out;
}

std::vector<std::string> class_labels(const models::Classifier& model, const data::Dataset& ds) {
  if (ds.class_names.size() == model.n_classes()) return ds.class_names;
  std::vector<std::string> out;
  for (std::size_t k = 0; k < model.n_classes(); ++k) out.push_back(std::to_string(k));
  return out;
}

/// Probability columns, or decision values widened to one column per class.
Matrix class_scores(const models::Classifier& model, const Matrix& X) {
  if (model.has_proba()) return model.predict_proba(X);
  const Matrix d = model.decision_function(X);
  if (d.cols() != 1) return d;
  Matrix out(d.rows(), 2);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    out(r, 0) = -d(r, 0);
    out(r, 1) = d(r, 0);
  }
  return out;
}

json cv_json(const models::CvResult& cv, std::size_t folds, models::ScoreMetric metric) {
  return json{{"folds", folds},
              {"metric", models::to_string(metric)},
              {"fold_scores", cv.fold_scores},
              {"mean", cv.mean}};
}

}  // namespace

void register_model_commands(Registry& reg) {
  {
    struct Opts {
      std::string data_path, target, model = "logreg", params, metadata, metric = "accuracy";
      std::size_t cv_folds = 5;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("train", "Fit a classifier and write a model bundle");
    sub->add_option("--data", o.data_path, "Training CSV");
    sub->add_option("--target", o.target, "Class column");
    sub->add_option("--model", o.model, "logreg, dtree, rforest, linsvm, knn, gnb, zeror, "
                                         "lrforest or svtree");
    sub->add_option("--params", o.params, "JSON object of model hyperparameters");
    sub->add_option("--metadata", o.metadata, "Column metadata written by prep");
    sub->add_option("--cv-folds", o.cv_folds, "Cross-validation folds (0 skips)");
    sub->add_option("--metric", o.metric, "accuracy or f1_macro");
    auto& spec = reg.spec(sub);
    spec.required = {"data", "target", "out"};
    spec.handler = [&o](RunContext& ctx) {
      const auto raw = require_target(load_dataset(o.data_path, o.target), "train");
      const auto ds = apply_prep_metadata(raw, o.metadata);
      const auto mspec = model_spec(o.model, o.params, ctx.seed());
      const auto metric = models::score_metric_from_string(o.metric);
      const auto& y = ds.labels();
      const auto model = models::fit(mspec, ds.X, y, ds.n_classes(), ctx.exec());

      json report = report_header(ctx);
      report["model"] = models::spec_to_json(mspec);
      report["rows"] = ds.n_rows();
      report["features"] = ds.feature_names();
      report["classes"] = ds.class_names;
      if (o.cv_folds > 0) {
        const auto cv = models::cross_validate(mspec, ds.X, y, ds.n_classes(), o.cv_folds,
                                               ctx.seed(), metric, ctx.exec());
        report["cross_validation"] = cv_json(cv, o.cv_folds, metric);
      } else {
        report["cross_validation"] = nullptr;
      }
      const auto train_report =
          metrics::classification_report(y, model->predict(ds.X), ds.class_names);
      report["training_report"] = metrics::report_to_json(train_report);

      const auto out = ctx.out();
      write_json(out / "model.json", make_bundle(*model, ds));
      write_json(out / "report.json", report);
      write_text(out / "report.txt", metrics::render_report(train_report));
      ctx.io->out << "trained " << o.model << " on " << ds.n_rows() << " rows";
      if (o.cv_folds > 0) {
        ctx.io->out << ", cv " << o.metric << " "
                    << data::format_number(report["cross_validation"]["mean"].get<double>());
      }
      ctx.io->out << "\n";
    };
  }
  {
    struct Opts {
      std::string data_path, target, model = "logreg", strategy = "grid", space, metadata,
                                     metric = "accuracy";
      std::size_t n_draws = 10, cv_folds = 5;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("tune", "Grid or random hyperparameter search with cross-validation");
    sub->add_option("--data", o.data_path, "Training CSV");
    sub->add_option("--target", o.target, "Class column");
    sub->add_option("--model", o.model, "Model kind");
    sub->add_option("--strategy", o.strategy, "grid or random");
    sub->add_option("--space", o.space,
                    "JSON object mapping (dotted) parameter names to value lists or ranges");
    sub->add_option("--n-draws", o.n_draws, "Configurations drawn by random search");
    sub->add_option("--cv-folds", o.cv_folds, "Cross-validation folds");
    sub->add_option("--metric", o.metric, "accuracy or f1_macro");
    sub->add_option("--metadata", o.metadata, "Column metadata written by prep");
    auto& spec = reg.spec(sub);
    spec.required = {"data", "target", "space", "out"};
    spec.handler = [&o](RunContext& ctx) {
      const auto raw = require_target(load_dataset(o.data_path, o.target), "tune");
      const auto ds = apply_prep_metadata(raw, o.metadata);
      const auto kind = models::model_kind_from_string(o.model);
      const json sj{{"strategy", o.strategy}, {"n_draws", o.n_draws},
                    {"space", parse_json_arg(o.space, "--space")},
                    {"cv_folds", o.cv_folds}, {"metric", o.metric}, {"seed", ctx.seed()}};
      const auto sspec = models::search_spec_from_json(sj);
      const auto result =
          models::hyper_search(kind, ds.X, ds.labels(), ds.n_classes(), sspec, ctx.exec());
      const models::ModelSpec best{result.best().config, ctx.seed()};
      const auto model = models::fit(best, ds.X, ds.labels(), ds.n_classes(), ctx.exec());

      json report = report_header(ctx);
      report["search"] = models::search_spec_to_json(sspec);
      report["result"] = models::search_result_to_json(kind, result);
      std::string csv = "index,assignment,mean_score\n";
      for (std::size_t i = 0; i < result.rows.size(); ++i) {
        std::string a = result.rows[i].assignment.dump();
        std::string quoted = "\"";
        for (char c : a) quoted += (c == '"') ? std::string("\"\"") : std::string(1, c);
        csv += std::to_string(i) + "," + quoted + "\"," +
               data::format_number(result.rows[i].mean_score) + "\n";
      }
      const auto out = ctx.out();
      write_json(out / "search.json", report);
      write_text(out / "search.csv", csv);
      write_json(out / "model.json", make_bundle(*model, ds));
      ctx.io->out << "best " << result.best().assignment.dump() << " mean "
                  << data::format_number(result.best().mean_score) << " over "
                  << result.rows.size() << " configurations\n";
    };
  }
  {
    struct Opts {
      std::string model_path, data_path, target;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("evaluate", "Predict with a model and score it when labels exist",
                            false, true);
    sub->add_option("--model", o.model_path, "Model bundle or model JSON");
    sub->add_option("--data", o.data_path, "CSV to score");
    sub->add_option("--target", o.target, "Class column (default: the bundle's target)");
    auto& spec = reg.spec(sub);
    spec.required = {"model", "data", "out"};
    spec.handler = [&o](RunContext& ctx) {
      const LoadedModel lm = load_model(o.model_path);
      const auto ds = load_for_model(lm, o.data_path, o.target);
      const auto& model = *lm.model;
      const auto labels = class_labels(model, ds);
      const auto pred = model.predict(ds.X);
      const Matrix scores = model.has_proba() ? model.predict_proba(ds.X)
                                              : model.decision_function(ds.X);
      std::string csv = "row,predicted";
      const std::string prefix = model.has_proba() ? ",proba_" : ",score_";
      if (model.has_proba() || scores.cols() == labels.size()) {
        for (const auto& l : labels) csv += prefix + l;
      } else {
        csv += ",score";
      }
      csv += "\n";
      for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        csv += std::to_string(r) + "," + labels.at(static_cast<std::size_t>(pred[r]));
        for (std::size_t c = 0; c < scores.cols(); ++c) {
          csv += "," + data::format_number(scores(r, c));
        }
        csv += "\n";
      }
      json report = report_header(ctx);
      report["model_kind"] = models::to_string(model.kind());
      report["rows"] = ds.n_rows();
      const auto out = ctx.out();
      if (ds.has_target()) {
        const auto rep = metrics::classification_report(ds.labels(), pred, labels);
        report["report"] = metrics::report_to_json(rep);
        write_text(out / "report.txt", metrics::render_report(rep));
        ctx.io->out << "accuracy " << data::format_number(rep.accuracy) << " on "
                    << ds.n_rows() << " rows\n";
      } else {
        report["report"] = nullptr;
        ctx.io->out << "predicted " << ds.n_rows() << " rows\n";
      }
      write_text(out / "predictions.csv", csv);
      write_json(out / "report.json", report);
    };
  }
  {
    struct Opts {
      std::string model_path, data_path, target, kinds = "roc,pr";
      std::vector<std::size_t> train_sizes;
      std::size_t cv_folds = 5;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("curves", "ROC, precision-recall and learning curves");
    sub->add_option("--model", o.model_path, "Model bundle or model JSON");
    sub->add_option("--data", o.data_path, "Labelled CSV");
    sub->add_option("--target", o.target, "Class column (default: the bundle's target)");
    sub->add_option("--kind", o.kinds, "Comma-separated subset of roc, pr, learning");
    sub->add_option("--train-sizes", o.train_sizes, "Learning-curve training sizes");
    sub->add_option("--cv-folds", o.cv_folds, "Learning-curve folds");
    auto& spec = reg.spec(sub);
    spec.required = {"model", "data", "out"};
    spec.handler = [&o](RunContext& ctx) {
      const LoadedModel lm = load_model(o.model_path);
      const auto ds = require_target(load_for_model(lm, o.data_path, o.target), "curves");
      const auto& model = *lm.model;
      const auto labels = class_labels(model, ds);
      std::set<std::string> kinds;
      for (const auto& k : split_list(o.kinds)) {
        if (k != "roc" && k != "pr" && k != "learning") {
          throw UsageError("unknown curve kind '" + k + "'");
        }
        kinds.insert(k);
      }
      const auto out = ctx.out();
      json report = report_header(ctx);
      json curves = json::array();
      const Matrix scores = class_scores(model, ds.X);
      const auto& y = ds.labels();
      auto emit = [&](const std::string& kind, std::vector<metrics::CurveData> list) {
        const bool binary = list.size() == 2;
        if (binary) list.erase(list.begin());
        for (std::size_t c = 0; c < list.size(); ++c) {
          const std::string label = labels.at(binary ? 1 : c);
          list[c].label = label;
          write_text(out / (kind + "_" + safe_name(label) + ".csv"),
                     metrics::curve_to_csv(list[c]));
          curves.push_back(metrics::curve_to_json(list[c]));
        }
        write_text(out / (kind + ".svg"),
                   metrics::svg_lines(kind == "roc" ? "ROC" : "Precision-recall", list));
      };
      if (kinds.count("roc")) emit("roc", metrics::roc_one_vs_rest(y, scores));
      if (kinds.count("pr")) emit("pr", metrics::pr_one_vs_rest(y, scores));
      if (kinds.count("learning")) {
        if (o.cv_folds < 2) throw UsageError("--cv-folds must be at least 2");
        std::vector<std::size_t> sizes = o.train_sizes;
        if (sizes.empty()) {
          const std::size_t n = ds.n_rows();
          const std::size_t capacity = n - (n + o.cv_folds - 1) / o.cv_folds;
          for (double f : {0.2, 0.4, 0.6, 0.8, 1.0}) {
            const auto s = static_cast<std::size_t>(std::llround(f * static_cast<double>(capacity)));
            if (s > 0 && (sizes.empty() || sizes.back() != s)) sizes.push_back(s);
          }
        }
        const auto lc = metrics::learning_curve(model.spec(), ds.X, y, ds.n_classes(), sizes,
                                                o.cv_folds, ctx.seed(), ctx.exec());
        std::string csv = "train_size,train_accuracy,valid_accuracy\n";
        for (std::size_t i = 0; i < lc.train.points.size(); ++i) {
          csv += data::format_number(lc.train.points[i].x) + "," +
                 data::format_number(lc.train.points[i].y) + "," +
                 data::format_number(lc.valid.points[i].y) + "\n";
        }
        write_text(out / "learning.csv", csv);
        write_text(out / "learning.svg", metrics::svg_lines("Learning curve", {lc.train, lc.valid}));
        curves.push_back(metrics::curve_to_json(lc.train));
        curves.push_back(metrics::curve_to_json(lc.valid));
      }
      report["curves"] = curves;
      write_json(out / "curves.json", report);
      ctx.io->out << "wrote " << curves.size() << " curves to " << out.string() << "\n";
    };
  }
}

}  // namespace tabkit::cli
