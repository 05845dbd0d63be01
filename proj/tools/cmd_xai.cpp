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
#include <memory>
#include <ostream>

#include "common.hpp"
#include "tabkit/error.hpp"
#include "tabkit/medley.hpp"
#include "tabkit/metrics.hpp"

namespace tabkit::cli {

namespace {

std::vector<medley::ExplainerId> parse_explainers(const std::string& text) {
  std::vector<medley::ExplainerId> ids;
  const auto names = text == "all" ? std::vector<std::string>{"medley", "local_linear", "greedy",
                                                              "parzen"}
                                   : split_list(text);
  for (const auto& n : names) {
    const auto id = medley::explainer_from_string(n);
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }
  if (ids.empty()) throw UsageError("--explainers lists no explainer");
  return ids;
}

std::size_t checked_row(long long row, const data::Dataset& ds) {
  if (row < 0 || static_cast<std::size_t>(row) >= ds.n_rows()) {
    throw UsageError("--row " + std::to_string(row) + " is outside 0.." +
                     std::to_string(ds.n_rows() - 1));
  }
  return static_cast<std::size_t>(row);
}

double jaccard(std::vector<std::size_t> a, std::vector<std::size_t> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<std::size_t> inter, uni;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(uni));
  return uni.empty() ? 1.0 : static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

}  // namespace

void register_xai_commands(Registry& reg) {
  {
    struct Opts {
      std::string model_path, data_path, target;
      long long row = 0;
      std::size_t n_repeats = 5;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("interpret", "Explain one row with drop-column and permutation scores");
    sub->add_option("--model", o.model_path, "Model bundle; its spec is refit on --data");
    sub->add_option("--data", o.data_path, "Labelled CSV the interpreter fits on");
    sub->add_option("--target", o.target, "Class column (default: the bundle's target)");
    sub->add_option("--row", o.row, "Row of --data to explain");
    sub->add_option("--n-repeats", o.n_repeats, "Shuffles per feature");
    auto& spec = reg.spec(sub);
    spec.required = {"model", "data", "row", "out"};
    spec.handler = [&o](RunContext& ctx) {
      const LoadedModel lm = load_model(o.model_path);
      const auto ds = require_target(load_for_model(lm, o.data_path, o.target), "interpret");
      const std::size_t row = checked_row(o.row, ds);
      medley::MedleyInterpreter interp(lm.model->spec(), ds.X, ds.labels(), ds.n_classes(),
                                       {o.n_repeats, ctx.seed(), ctx.exec()});
      const auto e = interp.interpret(ds.X.row(row));
      const auto names = ds.feature_names();
      json report = report_header(ctx);
      report["row"] = row;
      report["predicted_label"] = ds.class_names.at(static_cast<std::size_t>(e.predicted_class));
      report["explanation"] = medley::explanation_to_json(e, names);
      const auto out = ctx.out();
      write_json(out / "explanation.json", report);
      write_text(out / "explanation.csv", medley::explanation_to_csv(e, names));
      write_text(out / "explanation.svg",
                 metrics::svg_bars("Combined importance, row " + std::to_string(row), names,
                                   e.combined_scores));
      const std::size_t top = argmax(e.combined_scores);
      ctx.io->out << "row " << row << ": top feature " << names.at(top) << " ("
                  << data::format_number(e.combined_scores[top]) << ")\n";
    };
  }
  {
    struct Opts {
      std::string model_path, data_path, target, explainers = "all";
      long long row = 0;
      std::size_t top_k = 3, n_repeats = 5, n_samples = 500;
      double kernel_width = 0.0, bandwidth = 0.0;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("compare-explainers", "Run several explainers on one row");
    sub->add_option("--model", o.model_path, "Model bundle");
    sub->add_option("--data", o.data_path, "Labelled CSV");
    sub->add_option("--target", o.target, "Class column (default: the bundle's target)");
    sub->add_option("--row", o.row, "Row of --data to explain");
    sub->add_option("--explainers", o.explainers,
                    "all or a comma-separated subset of medley, local_linear, greedy, parzen");
    sub->add_option("--top-k", o.top_k, "Features compared between explainers");
    sub->add_option("--n-repeats", o.n_repeats, "Shuffles per feature for medley");
    sub->add_option("--n-samples", o.n_samples, "Perturbations for local_linear");
    sub->add_option("--kernel-width", o.kernel_width, "local_linear kernel width (0: auto)");
    sub->add_option("--bandwidth", o.bandwidth, "parzen bandwidth (0: sqrt of feature count)");
    auto& spec = reg.spec(sub);
    spec.required = {"model", "data", "row", "out"};
    spec.handler = [&o](RunContext& ctx) {
      const LoadedModel lm = load_model(o.model_path);
      const auto ds =
          require_target(load_for_model(lm, o.data_path, o.target), "compare-explainers");
      const std::size_t row = checked_row(o.row, ds);
      const auto ids = parse_explainers(o.explainers);
      if (o.top_k == 0 || o.top_k > ds.n_features()) {
        throw UsageError("--top-k must be between 1 and the feature count");
      }
      medley::BenchConfig cfg;
      cfg.model = lm.model->spec();
      cfg.seed = ctx.seed();
      cfg.n_repeats = o.n_repeats;
      cfg.local_linear.n_samples = o.n_samples;
      cfg.local_linear.kernel_width = o.kernel_width;
      cfg.local_linear.seed = ctx.seed();
      cfg.parzen_bandwidth = o.bandwidth;
      std::unique_ptr<medley::MedleyInterpreter> interp;
      if (std::find(ids.begin(), ids.end(), medley::ExplainerId::medley) != ids.end()) {
        interp = std::make_unique<medley::MedleyInterpreter>(
            lm.model->spec(), ds.X, ds.labels(), ds.n_classes(),
            medley::MedleyOptions{o.n_repeats, ctx.seed(), ctx.exec()});
      }
      const medley::ExplainContext ectx{*lm.model, interp.get(), ds.X, column_std(ds.X), o.top_k};
      const auto names = ds.feature_names();
      json results = json::object();
      std::vector<std::vector<double>> all_scores;
      std::vector<std::vector<std::size_t>> tops;
      for (auto id : ids) {
        const auto scores = medley::builtin_explainer(id, cfg)(ectx, ds.X.row(row));
        const auto top = medley::top_k(scores, o.top_k);
        std::vector<std::string> top_names;
        for (auto j : top) top_names.push_back(names[j]);
        results[medley::to_string(id)] = {{"scores", scores}, {"top_k", top_names}};
        all_scores.push_back(scores);
        tops.push_back(top);
      }
      json agreement = json::array();
      for (std::size_t a = 0; a < ids.size(); ++a) {
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
          agreement.push_back({{"a", medley::to_string(ids[a])},
                               {"b", medley::to_string(ids[b])},
                               {"top_k_jaccard", jaccard(tops[a], tops[b])}});
        }
      }
      std::string csv = "feature";
      for (auto id : ids) csv += std::string(",") + medley::to_string(id);
      csv += "\n";
      for (std::size_t j = 0; j < names.size(); ++j) {
        csv += names[j];
        for (const auto& s : all_scores) csv += "," + data::format_number(s[j]);
        csv += "\n";
      }
      json report = report_header(ctx);
      report["row"] = row;
      report["features"] = names;
      report["explainers"] = results;
      report["agreement"] = agreement;
      const auto out = ctx.out();
      write_json(out / "compare.json", report);
      write_text(out / "compare.csv", csv);
      ctx.io->out << "compared " << ids.size() << " explainers on row " << row << "\n";
    };
  }
  {
    struct Opts {
      std::string explainers = "all", model = "logreg", params;
      std::size_t n_datasets = 10, d = 10, k = 3, n = 500, instances = 20, n_repeats = 5;
      double test_fraction = 0.3;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("xai-bench", "Recall of explainers on gold-feature datasets");
    sub->add_option("--explainers", o.explainers, "all or a comma-separated subset");
    sub->add_option("--model", o.model, "Model kind explained");
    sub->add_option("--params", o.params, "JSON object of model hyperparameters");
    sub->add_option("--n-datasets", o.n_datasets, "Datasets in the suite");
    sub->add_option("--features", o.d, "Features per dataset");
    sub->add_option("--gold", o.k, "Gold features per dataset");
    sub->add_option("--rows", o.n, "Rows per dataset");
    sub->add_option("--instances", o.instances, "Explained test rows per dataset");
    sub->add_option("--n-repeats", o.n_repeats, "Shuffles per feature for medley");
    sub->add_option("--test-fraction", o.test_fraction, "Held-out share per dataset");
    auto& spec = reg.spec(sub);
    spec.required = {"out"};
    spec.handler = [&o](RunContext& ctx) {
      const auto ids = parse_explainers(o.explainers);
      const auto kind = models::model_kind_from_string(o.model);
      const json p = o.params.empty() ? json::object() : parse_json_arg(o.params, "--params");
      medley::BenchConfig cfg;
      cfg.model = models::ModelSpec{models::config_from_json(kind, p), ctx.seed()};
      cfg.n_instances = o.instances;
      cfg.test_fraction = o.test_fraction;
      cfg.seed = ctx.seed();
      cfg.n_repeats = o.n_repeats;
      cfg.local_linear.seed = ctx.seed();
      const auto suite = medley::gold_suite(o.n_datasets, {o.d, o.k, o.n, ctx.seed()});
      json results = json::object();
      std::string csv = "explainer,dataset,recall\n";
      std::vector<std::string> labels;
      std::vector<double> means;
      for (auto id : ids) {
        const auto r = medley::recall_on_gold(id, suite, cfg, ctx.exec());
        results[medley::to_string(id)] = {{"mean_recall", r.mean_recall},
                                          {"per_dataset", r.per_dataset}};
        for (std::size_t s = 0; s < r.per_dataset.size(); ++s) {
          csv += std::string(medley::to_string(id)) + "," + std::to_string(s) + "," +
                 data::format_number(r.per_dataset[s]) + "\n";
        }
        labels.push_back(medley::to_string(id));
        means.push_back(r.mean_recall);
        ctx.io->out << medley::to_string(id) << " mean recall "
                    << data::format_number(r.mean_recall) << "\n";
      }
      json gold = json::array();
      for (const auto& g : suite) gold.push_back(g.gold_features);
      json report = report_header(ctx);
      report["suite"] = {{"n_datasets", o.n_datasets}, {"features", o.d}, {"gold", o.k},
                         {"rows", o.n}, {"gold_features", gold}};
      report["results"] = results;
      const auto out = ctx.out();
      write_json(out / "bench.json", report);
      write_text(out / "bench.csv", csv);
      write_text(out / "bench.svg", metrics::svg_bars("Mean recall of gold features", labels, means));
    };
  }
}

}  // namespace tabkit::cli
