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
#include <limits>
#include <ostream>

#include "common.hpp"
#include "tabkit/error.hpp"
#include "tabkit/numkit.hpp"

namespace tabkit::cli {

namespace {

json column_summary(const data::Dataset& ds, std::size_t j) {
  const auto& meta = ds.columns[j];
  std::vector<double> present;
  std::size_t missing = 0;
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    const double v = ds.X(r, j);
    if (std::isnan(v)) {
      ++missing;
    } else {
      present.push_back(v);
    }
  }
  json c{{"name", meta.name}, {"kind", data::to_string(meta.kind)}, {"missing", missing}};
  if (meta.kind == data::ColumnKind::categorical) {
    std::vector<std::size_t> counts(meta.categories.size(), 0);
    for (double v : present) ++counts.at(static_cast<std::size_t>(v));
    json cats = json::array();
    for (std::size_t k = 0; k < counts.size(); ++k) {
      cats.push_back({{"label", meta.categories[k]}, {"count", counts[k]}});
    }
    c["categories"] = cats;
  } else if (!present.empty()) {
    c["mean"] = mean(present);
    c["std"] = population_std(present);
    c["min"] = *std::min_element(present.begin(), present.end());
    c["median"] = median(present);
    c["max"] = *std::max_element(present.begin(), present.end());
  }
  return c;
}

void run_inspect(RunContext& ctx, const std::string& path, const std::string& target) {
  const data::Dataset ds = load_dataset(path, target);
  json report = report_header(ctx);
  report["rows"] = ds.n_rows();
  report["features"] = ds.n_features();
  report["target"] = ds.has_target() ? json(ds.target_name) : json(nullptr);
  json columns = json::array();
  for (std::size_t j = 0; j < ds.n_features(); ++j) columns.push_back(column_summary(ds, j));
  report["columns"] = columns;
  if (ds.has_target()) {
    std::vector<std::size_t> counts(ds.n_classes(), 0);
    for (int y : ds.labels()) ++counts.at(static_cast<std::size_t>(y));
    json classes = json::array();
    for (std::size_t k = 0; k < counts.size(); ++k) {
      classes.push_back({{"label", ds.class_names[k]}, {"count", counts[k]}});
    }
    report["classes"] = classes;
  }
  if (!ds.has_missing() && ds.n_features() >= 2) {
    const auto corr = data::correlation_matrix(ds);
    json rows = json::array();
    for (std::size_t i = 0; i < corr.r.rows(); ++i) {
      rows.push_back(std::vector<double>(corr.r.row(i).begin(), corr.r.row(i).end()));
    }
    report["correlation"] = {{"columns", ds.feature_names()},
                             {"matrix", rows},
                             {"constant_columns", corr.constant_columns}};
  } else {
    report["correlation"] = nullptr;
  }
  if (ctx.common->out_dir.empty()) {
    ctx.io->out << report.dump(2) << "\n";
  } else {
    write_json(ctx.out() / "inspect.json", report);
    ctx.io->out << "wrote " << (ctx.out() / "inspect.json").string() << "\n";
  }
}

data::ImputePolicy impute_policy(const std::string& name, double fill) {
  if (name == "median") return data::ImputePolicy::with_median();
  if (name == "mode") return data::ImputePolicy::with_mode();
  if (name == "constant") return data::ImputePolicy::with_constant(fill);
  throw UsageError("--impute must be median, mode, constant or none, got '" + name + "'");
}

}  // namespace

void register_data_commands(Registry& reg) {
  {
    struct Opts {
      std::string data_path, target;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("inspect", "Summarize the columns of a CSV file", false, true);
    sub->add_option("--data", o.data_path, "Input CSV");
    sub->add_option("--target", o.target, "Class column");
    auto& spec = reg.spec(sub);
    spec.required = {"data"};
    spec.uses_out = false;
    spec.handler = [&o](RunContext& ctx) { run_inspect(ctx, o.data_path, o.target); };
  }
  {
    struct Opts {
      std::string data_path, target, impute = "median", select, drop;
      double fill = 0.0;
      bool standardize = false;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("prep", "Select columns, impute and standardize", false, true);
    sub->add_option("--data", o.data_path, "Input CSV");
    sub->add_option("--target", o.target, "Class column");
    sub->add_option("--impute", o.impute, "median, mode, constant or none");
    sub->add_option("--fill-value", o.fill, "Value for --impute constant");
    sub->add_flag("--standardize", o.standardize, "z-score numeric columns");
    sub->add_option("--select", o.select, "Comma-separated columns to keep");
    sub->add_option("--drop", o.drop, "Comma-separated columns to remove");
    auto& spec = reg.spec(sub);
    spec.required = {"data", "out"};
    spec.handler = [&o](RunContext& ctx) {
      data::Dataset ds = load_dataset(o.data_path, o.target);
      if (!o.select.empty()) ds = data::select_columns(ds, split_list(o.select));
      if (!o.drop.empty()) ds = data::drop_columns(ds, split_list(o.drop));
      json report = report_header(ctx);
      std::size_t missing_cells = 0;
      for (double v : ds.X.data()) missing_cells += std::isnan(v) ? 1 : 0;
      report["missing_cells"] = missing_cells;
      if (o.impute != "none") {
        ds = data::impute_missing(ds, impute_policy(o.impute, o.fill));
      } else if (ds.has_missing()) {
        throw DataError("data has missing values; choose an --impute policy");
      }
      std::vector<std::string> constant;
      if (o.standardize) {
        auto st = data::standardize(ds);
        ds = std::move(st.train);
        constant = st.constant_columns;
      }
      report["rows"] = ds.n_rows();
      report["columns"] = ds.feature_names();
      report["constant_columns"] = constant;
      const auto out = ctx.out();
      data::save_csv(ds, out / "prepared.csv");
      write_json(out / "metadata.json", data::metadata_to_json(ds));
      write_json(out / "report.json", report);
      ctx.io->out << "wrote " << (out / "prepared.csv").string() << "\n";
    };
  }
  {
    struct Opts {
      std::string data_path, target;
      double test_fraction = 0.25;
      bool stratified = false;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("split", "Seeded train/test split", true, true);
    sub->add_option("--data", o.data_path, "Input CSV");
    sub->add_option("--target", o.target, "Class column");
    sub->add_option("--test-fraction", o.test_fraction, "Share of rows in the test part");
    sub->add_flag("--stratified", o.stratified, "Keep class proportions");
    auto& spec = reg.spec(sub);
    spec.required = {"data", "out"};
    spec.handler = [&o](RunContext& ctx) {
      const data::Dataset ds = load_dataset(o.data_path, o.target);
      data::SplitSpec s{o.test_fraction, o.stratified, ctx.seed()};
      const auto idx = data::split_indices(ds.n_rows(), ds.y ? &*ds.y : nullptr,
                                           ds.class_names, s);
      const auto out = ctx.out();
      data::save_csv(data::subset_rows(ds, idx.train), out / "train.csv");
      data::save_csv(data::subset_rows(ds, idx.test), out / "test.csv");
      json report = report_header(ctx);
      report["train_rows"] = idx.train;
      report["test_rows"] = idx.test;
      write_json(out / "split.json", report);
      ctx.io->out << "wrote " << idx.train.size() << " train and " << idx.test.size()
                  << " test rows to " << out.string() << "\n";
    };
  }
  {
    struct Opts {
      std::string model_path;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("export", "Write the portable model JSON of a bundle", false, true);
    sub->add_option("--model", o.model_path, "Model bundle or model JSON");
    auto& spec = reg.spec(sub);
    spec.required = {"model", "out"};
    spec.handler = [&o](RunContext& ctx) {
      const LoadedModel lm = load_model(o.model_path);
      const json exported = models::model_to_json(*lm.model);
      const auto out = ctx.out();
      write_json(out / "model.json", exported);
      if (lm.metadata) write_json(out / "metadata.json", *lm.metadata);
      json report = report_header(ctx);
      report["kind"] = models::to_string(lm.model->kind());
      report["n_features"] = lm.model->n_features();
      report["n_classes"] = lm.model->n_classes();
      report["identical_to_source"] = exported == lm.model_json;
      write_json(out / "report.json", report);
      ctx.io->out << "wrote " << (out / "model.json").string() << "\n";
    };
  }
  {
    struct Opts {
      std::string model_path, metadata_path, data_path, target;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("import", "Wrap a model JSON into a bundle with column metadata",
                            false, true);
    sub->add_option("--model", o.model_path, "Model JSON");
    sub->add_option("--metadata", o.metadata_path, "Column metadata JSON");
    sub->add_option("--data", o.data_path, "CSV whose encoding the model was trained on");
    sub->add_option("--target", o.target, "Class column of --data");
    auto& spec = reg.spec(sub);
    spec.required = {"model", "out"};
    spec.handler = [&o](RunContext& ctx) {
      const json model_json = read_json(o.model_path);
      const auto model = models::model_from_json(model_json);
      if (models::model_to_json(*model) != model_json) {
        throw ModelError("model JSON does not survive a load/save round trip");
      }
      json metadata;
      if (!o.metadata_path.empty()) {
        metadata = read_json(o.metadata_path);
      } else if (!o.data_path.empty()) {
        metadata = data::metadata_to_json(load_dataset(o.data_path, o.target));
      } else {
        throw UsageError("import needs --metadata or --data");
      }
      const auto columns = data::columns_from_json(metadata);
      if (columns.size() != model->n_features()) {
        throw ModelError("model expects " + std::to_string(model->n_features()) +
                         " features but the metadata lists " + std::to_string(columns.size()));
      }
      const auto classes = metadata.value("class_names", std::vector<std::string>{});
      if (!classes.empty() && classes.size() != model->n_classes()) {
        throw ModelError("model has " + std::to_string(model->n_classes()) +
                         " classes but the metadata lists " + std::to_string(classes.size()));
      }
      const json bundle{{"format_version", kBundleFormatVersion},
                        {"kind", "tabkit-model-bundle"},
                        {"model", model_json},
                        {"metadata", metadata}};
      const auto out = ctx.out();
      write_json(out / "model.json", bundle);
      ctx.io->out << "wrote " << (out / "model.json").string() << "\n";
    };
  }
}

}  // namespace tabkit::cli
