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
#include <ostream>

#include "common.hpp"
#include "tabkit/error.hpp"
#include "tabkit/metrics.hpp"
#include "tabkit/syneval.hpp"
#include "tabkit/tabgan.hpp"

namespace tabkit::cli {

namespace {

bool given(const CLI::App* app, const std::string& name) {
  return app->get_option("--" + name)->count() > 0;
}

/// Loads `path` encoded like `reference`, with the target when the file has it.
data::Dataset load_like(const data::Dataset& reference, const std::string& path) {
  const auto header = csv_header(path);
  const bool has_target =
      reference.has_target() &&
      std::find(header.begin(), header.end(), reference.target_name) != header.end();
  const auto raw = load_dataset(path, has_target ? reference.target_name : "");
  auto ds = data::apply_metadata(raw, reference.columns, reference.class_names);
  ds.target_name = raw.target_name;
  if (!raw.has_target()) {
    ds.y.reset();
  }
  return ds;
}

}  // namespace

void register_synth_commands(Registry& reg) {
  {
    struct Opts {
      std::string data_path, target, test_path, pipe_config, cat_cols;
      std::size_t gen_x_times = 100, epochs = 500, patience = 25, batch_size = 64, noise_dim = 100;
      double learning_rate = 2e-4;
      bool only_generated = false, no_post_process = false;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("gan-augment", "Generate synthetic rows with the GAN pipeline");
    sub->add_option("--data", o.data_path, "Numeric training CSV");
    sub->add_option("--target", o.target, "Class column");
    sub->add_option("--test-data", o.test_path, "Reference rows for the adversarial filter");
    sub->add_option("--pipe-config", o.pipe_config, "JSON object of pipeline settings");
    sub->add_option("--gen-x-times", o.gen_x_times, "Generated rows per training row");
    sub->add_option("--epochs", o.epochs, "GAN training epochs");
    sub->add_option("--patience", o.patience, "Early-stopping patience (0 disables)");
    sub->add_option("--batch-size", o.batch_size, "GAN batch size");
    sub->add_option("--learning-rate", o.learning_rate, "Adam learning rate");
    sub->add_option("--noise-dim", o.noise_dim, "Generator noise width");
    sub->add_option("--cat-cols", o.cat_cols, "Comma-separated categorical columns");
    sub->add_flag("--only-generated", o.only_generated, "Skip writing real rows to augmented.csv");
    sub->add_flag("--no-post-process", o.no_post_process, "Skip clipping and rounding");
    auto& spec = reg.spec(sub);
    spec.required = {"data", "out"};
    spec.handler = [&o, sub](RunContext& ctx) {
      json pj = o.pipe_config.empty() ? json::object()
                                      : parse_json_arg(o.pipe_config, "--pipe-config");
      if (!pj.is_object()) throw UsageError("--pipe-config must be a JSON object");
      if (given(sub, "gen-x-times")) pj["gen_x_times"] = o.gen_x_times;
      if (given(sub, "only-generated")) pj["only_generated_data"] = o.only_generated;
      if (given(sub, "no-post-process")) pj["is_post_process"] = !o.no_post_process;
      if (given(sub, "cat-cols")) pj["cat_cols"] = split_list(o.cat_cols);
      json gp = pj.value("gan_params", json::object());
      if (given(sub, "epochs")) gp["epochs"] = o.epochs;
      if (given(sub, "patience")) gp["patience"] = o.patience;
      if (given(sub, "batch-size")) gp["batch_size"] = o.batch_size;
      if (given(sub, "learning-rate")) gp["learning_rate"] = o.learning_rate;
      if (given(sub, "noise-dim")) gp["noise_dim"] = o.noise_dim;
      if (!gp.empty()) pj["gan_params"] = gp;
      const auto cfg = tabgan::pipe_config_from_json(pj);

      const auto train = load_dataset(o.data_path, o.target);
      std::optional<data::Dataset> test;
      if (!o.test_path.empty()) test = load_like(train, o.test_path);
      const auto result = tabgan::generate_data_pipe(train, test ? &test->X : nullptr, cfg,
                                                     ctx.seed(), ctx.exec());
      std::optional<std::vector<int>> gen_y;
      if (!result.gen_y.empty()) gen_y = result.gen_y;
      auto generated = data::make_dataset(result.gen_x, gen_y, train.feature_names(),
                                          train.has_target() ? train.class_names
                                                             : std::vector<std::string>{});
      generated.target_name = train.target_name;

      json report = report_header(ctx);
      report["pipe_config"] = tabgan::pipe_config_to_json(cfg);
      report["train_rows"] = train.n_rows();
      report["generated_rows"] = generated.n_rows();
      report["provenance"] = result.provenance;
      report["warnings"] = result.warnings;
      const auto out = ctx.out();
      data::save_csv(generated, out / "generated.csv");
      if (!cfg.only_generated_data) {
        data::save_csv(tabgan::combine_with_real(train, result), out / "augmented.csv");
      }
      write_json(out / "provenance.json", report);
      for (const auto& w : result.warnings) ctx.io->err << "warning: " << w << "\n";
      ctx.io->out << "generated " << generated.n_rows() << " rows from " << train.n_rows()
                  << " training rows\n";
    };
  }
  {
    struct Opts {
      std::size_t rows = 200, features = 5, informative = 2;
      double noise = 1.0;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("make-regression", "Seeded linear regression dataset");
    sub->add_option("--rows", o.rows, "Samples");
    sub->add_option("--features", o.features, "Features");
    sub->add_option("--informative", o.informative, "Features with nonzero coefficients");
    sub->add_option("--noise", o.noise, "Standard deviation of the additive noise");
    auto& spec = reg.spec(sub);
    spec.required = {"out"};
    spec.handler = [&o](RunContext& ctx) {
      const auto r = tabgan::make_regression(o.rows, o.features, o.informative, o.noise,
                                             ctx.seed());
      std::vector<std::string> names;
      for (std::size_t j = 0; j < o.features; ++j) names.push_back("x" + std::to_string(j));
      std::string csv;
      for (const auto& n : names) csv += n + ",";
      csv += "y\n";
      for (std::size_t i = 0; i < r.X.rows(); ++i) {
        for (std::size_t j = 0; j < r.X.cols(); ++j) csv += data::format_number(r.X(i, j)) + ",";
        csv += data::format_number(r.y[i]) + "\n";
      }
      std::string lines = "feature,intercept,slope\n";
      const auto fits = tabgan::feature_fit_lines(r.X, r.y);
      for (std::size_t j = 0; j < fits.size(); ++j) {
        lines += names[j] + "," + data::format_number(fits[j].intercept) + "," +
                 data::format_number(fits[j].slope) + "\n";
      }
      json report = report_header(ctx);
      report["coef"] = r.coef;
      report["informative"] = r.informative;
      const auto out = ctx.out();
      write_text(out / "regression.csv", csv);
      write_text(out / "fit_lines.csv", lines);
      write_json(out / "truth.json", report);
      ctx.io->out << "wrote " << o.rows << " rows to " << (out / "regression.csv").string()
                  << "\n";
    };
  }
  {
    struct Opts {
      std::string real_path, synth_path, target;
      double alpha = 0.05, spearman_threshold = 0.5;
      std::size_t n_trees = 100;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("syn-eval", "Fidelity of synthetic rows against real rows");
    sub->add_option("--real", o.real_path, "Real CSV");
    sub->add_option("--synth", o.synth_path, "Synthetic CSV with the same columns");
    sub->add_option("--target", o.target, "Class column used for importance similarity");
    sub->add_option("--alpha", o.alpha, "KS significance level");
    sub->add_option("--spearman-threshold", o.spearman_threshold,
                    "Minimum importance rank correlation");
    sub->add_option("--n-trees", o.n_trees, "Trees in the importance forests");
    auto& spec = reg.spec(sub);
    spec.required = {"real", "synth", "out"};
    spec.handler = [&o](RunContext& ctx) {
      const auto real = load_dataset(o.real_path, o.target);
      const auto synth = load_like(real, o.synth_path);
      syneval::FidelityOptions options;
      options.alpha = o.alpha;
      options.spearman_threshold = o.spearman_threshold;
      options.forest.n_trees = o.n_trees;
      options.seed = ctx.seed();
      options.exec = ctx.exec();
      const auto rep = syneval::fidelity_report(real, synth, options);
      json j = syneval::fidelity_to_json(rep);
      const json header = report_header(ctx);
      for (const auto& key : {"tool_version", "command", "seed", "config_echo"}) {
        j[key] = header[key];
      }
      const auto out = ctx.out();
      write_json(out / "fidelity.json", j);
      write_text(out / "fidelity.csv", syneval::fidelity_to_csv(rep));
      if (rep.importance) {
        write_text(out / "importance.csv", syneval::importance_to_csv(rep));
        std::vector<std::string> labels;
        std::vector<double> values;
        for (std::size_t f = 0; f < rep.per_feature.size(); ++f) {
          labels.push_back(rep.per_feature[f].name + " real");
          values.push_back(rep.importance->real[f]);
          labels.push_back(rep.per_feature[f].name + " synth");
          values.push_back(rep.importance->synth[f]);
        }
        write_text(out / "importance.svg",
                   metrics::svg_bars("Feature importance, real and synthetic", labels, values));
      }
      std::size_t rejected = 0;
      for (const auto& f : rep.per_feature) rejected += f.rejected ? 1 : 0;
      ctx.io->out << (rep.consistent ? "consistent" : "inconsistent") << ": " << rejected
                  << " of " << rep.per_feature.size() << " features rejected at alpha "
                  << data::format_number(o.alpha) << "\n";
    };
  }
}

}  // namespace tabkit::cli
