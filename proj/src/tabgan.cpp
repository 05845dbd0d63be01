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

#include "tabkit/tabgan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tabkit/metrics.hpp"

namespace tabkit::tabgan {

using nlohmann::json;

// --- MLP -------------------------------------------------------------------

Mlp::Mlp(std::vector<std::size_t> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw ModelError("mlp needs at least an input and an output width");
  for (std::size_t w : widths_) {
    if (w == 0) throw ModelError("mlp layer widths must be positive");
  }
  offsets_.push_back(0);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    offsets_.push_back(offsets_.back() + widths_[l + 1] * widths_[l] + widths_[l + 1]);
  }
}

std::pair<std::size_t, std::size_t> Mlp::layer_range(std::size_t l) const {
  return {offsets_.at(l), offsets_.at(l + 1)};
}

std::vector<double> Mlp::init(Rng& rng) const {
  std::vector<double> theta(n_params(), 0.0);
  for (std::size_t l = 0; l < n_layers(); ++l) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    const double scale = std::sqrt(2.0 / static_cast<double>(in));
    for (std::size_t i = 0; i < in * out; ++i) theta[offsets_[l] + i] = scale * rng.normal();
  }
  return theta;
}

Matrix Mlp::forward(std::span<const double> theta, const Matrix& X, Cache* cache) const {
  if (theta.size() != n_params()) throw ModelError("mlp parameter vector has wrong length");
  if (X.cols() != n_inputs()) throw ModelError("mlp input has wrong width");
  if (cache != nullptr) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  Matrix a = X;
  for (std::size_t l = 0; l < n_layers(); ++l) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    const double* W = theta.data() + offsets_[l];
    const double* b = W + in * out;
    Matrix z(a.rows(), out);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const auto ai = a.row(i);
      auto zi = z.row(i);
      for (std::size_t o = 0; o < out; ++o) {
        double s = b[o];
        const double* w = W + o * in;
        for (std::size_t k = 0; k < in; ++k) s += w[k] * ai[k];
        zi[o] = s;
      }
    }
    if (cache != nullptr) {
      cache->inputs.push_back(a);
      cache->pre.push_back(z);
    }
    if (l + 1 < n_layers()) {
      for (double& v : z.data()) v = std::max(v, 0.0);
    }
    a = std::move(z);
  }
  return a;
}

Matrix Mlp::backward(std::span<const double> theta, const Cache& cache, const Matrix& d_out,
                     std::span<double> grad) const {
  if (grad.size() != n_params()) throw ModelError("mlp gradient vector has wrong length");
  Matrix delta = d_out;
  for (std::size_t l = n_layers(); l-- > 0;) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    if (l + 1 < n_layers()) {
      const Matrix& z = cache.pre[l];
      for (std::size_t i = 0; i < delta.data().size(); ++i) {
        if (!(z.data()[i] > 0.0)) delta.data()[i] = 0.0;
      }
    }
    const Matrix& a = cache.inputs[l];
    const double* W = theta.data() + offsets_[l];
    double* gW = grad.data() + offsets_[l];
    double* gb = gW + in * out;
    Matrix d_in(a.rows(), in);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const auto ai = a.row(i);
      const auto di = delta.row(i);
      auto dini = d_in.row(i);
      for (std::size_t o = 0; o < out; ++o) {
        const double g = di[o];
        if (g == 0.0) continue;
        gb[o] += g;
        double* gw = gW + o * in;
        const double* w = W + o * in;
        for (std::size_t k = 0; k < in; ++k) {
          gw[k] += g * ai[k];
          dini[k] += g * w[k];
        }
      }
    }
    delta = std::move(d_in);
  }
  return delta;
}

// --- losses ----------------------------------------------------------------

double softplus(double a) { return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a))); }

namespace {

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

}  // namespace

double discriminator_loss_grad(const Mlp& D, std::span<const double> theta_d, const Matrix& real,
                               const Matrix& fake, std::span<double> grad) {
  const double total = static_cast<double>(real.rows() + fake.rows());
  if (total == 0.0) throw ModelError("discriminator loss on empty batches");
  double loss = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    const Matrix& X = pass == 0 ? real : fake;
    if (X.rows() == 0) continue;
    const double label = pass == 0 ? 1.0 : 0.0;
    Mlp::Cache cache;
    const Matrix logits = D.forward(theta_d, X, grad.empty() ? nullptr : &cache);
    Matrix d_out(X.rows(), 1);
    for (std::size_t i = 0; i < X.rows(); ++i) {
      const double a = logits(i, 0);
      loss += label == 1.0 ? softplus(-a) : softplus(a);
      d_out(i, 0) = (sigmoid(a) - label) / total;
    }
    if (!grad.empty()) D.backward(theta_d, cache, d_out, grad);
  }
  return loss / total;
}

double generator_loss_grad(const Mlp& G, std::span<const double> theta_g, const Mlp& D,
                           std::span<const double> theta_d, const Matrix& z,
                           std::span<double> grad) {
  if (z.rows() == 0) throw ModelError("generator loss on an empty batch");
  const double n = static_cast<double>(z.rows());
  Mlp::Cache g_cache;
  Mlp::Cache d_cache;
  const bool want = !grad.empty();
  const Matrix fake = G.forward(theta_g, z, want ? &g_cache : nullptr);
  const Matrix logits = D.forward(theta_d, fake, want ? &d_cache : nullptr);
  double loss = 0.0;
  Matrix d_out(z.rows(), 1);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const double a = logits(i, 0);
    loss += softplus(-a);
    d_out(i, 0) = (sigmoid(a) - 1.0) / n;
  }
  if (want) {
    std::vector<double> scratch(D.n_params(), 0.0);
    const Matrix d_fake = D.backward(theta_d, d_cache, d_out, scratch);
    G.backward(theta_g, g_cache, d_fake, grad);
  }
  return loss / n;
}

std::vector<double> discriminate(const GanModel& model, const Matrix& X) {
  const Matrix logits = model.discriminator.forward(model.theta_d, X);
  std::vector<double> out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) out[i] = sigmoid(logits(i, 0));
  return out;
}

// --- training --------------------------------------------------------------

json gan_params_to_json(const GanParams& p) {
  return {{"batch_size", p.batch_size},
          {"patience", p.patience},
          {"epochs", p.epochs},
          {"learning_rate", p.learning_rate},
          {"noise_dim", p.noise_dim},
          {"generator_hidden", p.generator_hidden},
          {"discriminator_hidden", p.discriminator_hidden}};
}

GanParams gan_params_from_json(const json& j) {
  GanParams p;
  for (const auto& [key, _] : j.items()) {
    if (key != "batch_size" && key != "patience" && key != "epochs" && key != "learning_rate" &&
        key != "noise_dim" && key != "generator_hidden" && key != "discriminator_hidden") {
      throw UsageError("gan_params: unknown key '" + key + "'");
    }
  }
  p.batch_size = j.value("batch_size", p.batch_size);
  p.patience = j.value("patience", p.patience);
  p.epochs = j.value("epochs", p.epochs);
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.noise_dim = j.value("noise_dim", p.noise_dim);
  p.generator_hidden = j.value("generator_hidden", p.generator_hidden);
  p.discriminator_hidden = j.value("discriminator_hidden", p.discriminator_hidden);
  if (p.batch_size == 0) throw UsageError("gan_params: batch_size must be >= 1");
  if (!(p.learning_rate > 0.0)) throw UsageError("gan_params: learning_rate must be > 0");
  if (p.noise_dim == 0) throw UsageError("gan_params: noise_dim must be >= 1");
  return p;
}

namespace {

Matrix noise(std::size_t n, std::size_t dim, Rng& rng) {
  Matrix z(n, dim);
  for (double& v : z.data()) v = rng.normal();
  return z;
}

std::vector<std::size_t> with_ends(std::size_t first, const std::vector<std::size_t>& hidden,
                                   std::size_t last) {
  std::vector<std::size_t> w{first};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(last);
  return w;
}

}  // namespace

GanModel gan_init(std::size_t d, const GanParams& params, std::uint64_t seed) {
  if (d == 0) throw ModelError("gan needs at least one data column");
  const Rng root(seed);
  Rng g_rng = root.split(0);
  Rng d_rng = root.split(1);
  Mlp G(with_ends(params.noise_dim, params.generator_hidden, d));
  Mlp D(with_ends(d, params.discriminator_hidden, 1));
  GanModel m{G, D, G.init(g_rng), D.init(d_rng),
             make_optimizer(OptimizerKind::adam, params.learning_rate, G.n_params()),
             make_optimizer(OptimizerKind::adam, params.learning_rate, D.n_params()),
             0,
             std::numeric_limits<double>::infinity(),
             0,
             {},
             {},
             params.noise_dim};
  return m;
}

GanModel gan_train(const Matrix& data, const GanParams& params, std::uint64_t seed) {
  if (data.rows() < params.batch_size) {
    throw DataError("gan training needs at least batch_size=" + std::to_string(params.batch_size) +
                    " rows, got " + std::to_string(data.rows()));
  }
  for (double v : data.data()) {
    if (!std::isfinite(v)) throw DataError("gan training data has missing or non-finite values");
  }
  GanModel m = gan_init(data.cols(), params, seed);
  Rng rng = Rng(seed).split(2);
  std::vector<double> grad_d(m.discriminator.n_params());
  std::vector<double> grad_g(m.generator.n_params());
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    const auto batches =
        epoch_schedule(data.rows(), BatchStrategy::mini_batch(params.batch_size), rng);
    double d_sum = 0.0;
    double g_sum = 0.0;
    for (const auto& batch : batches) {
      const Matrix real = data.select_rows(batch);
      const Matrix fake = m.generator.forward(m.theta_g, noise(batch.size(), m.noise_dim, rng));
      std::fill(grad_d.begin(), grad_d.end(), 0.0);
      d_sum += discriminator_loss_grad(m.discriminator, m.theta_d, real, fake, grad_d);
      optimizer_step(m.opt_d, m.theta_d, grad_d);
      std::fill(grad_g.begin(), grad_g.end(), 0.0);
      g_sum += generator_loss_grad(m.generator, m.theta_g, m.discriminator, m.theta_d,
                                   noise(batch.size(), m.noise_dim, rng), grad_g);
      optimizer_step(m.opt_g, m.theta_g, grad_g);
    }
    const double g_loss = g_sum / static_cast<double>(batches.size());
    m.d_loss_history.push_back(d_sum / static_cast<double>(batches.size()));
    m.g_loss_history.push_back(g_loss);
    m.epoch = epoch + 1;
    if (g_loss < m.best_loss) {
      m.best_loss = g_loss;
      m.patience_counter = 0;
    } else if (params.patience > 0 && ++m.patience_counter >= params.patience) {
      break;
    }
  }
  return m;
}

namespace {

void reject_categorical(const data::Dataset& ds) {
  for (const auto& c : ds.columns) {
    if (c.kind == data::ColumnKind::categorical) {
      throw DataError("column '" + c.name +
                      "' is categorical; the GAN models continuous columns only. Drop it or "
                      "one-hot encode it into numeric columns first");
    }
  }
}

}  // namespace

GanModel gan_train(const data::Dataset& real, const GanParams& params, std::uint64_t seed) {
  reject_categorical(real);
  return gan_train(real.X, params, seed);
}

Matrix gan_generate(const GanModel& model, std::size_t n, std::uint64_t seed) {
  Matrix out(n, model.generator.n_outputs());
  if (n == 0) return out;
  Rng rng(seed);
  constexpr std::size_t chunk = 4096;
  for (std::size_t start = 0; start < n; start += chunk) {
    const std::size_t m = std::min(chunk, n - start);
    const Matrix rows = model.generator.forward(model.theta_g, noise(m, model.noise_dim, rng));
    std::copy(rows.data().begin(), rows.data().end(),
              out.data().begin() + static_cast<std::ptrdiff_t>(start * out.cols()));
  }
  return out;
}

// --- filters ---------------------------------------------------------------

QuantileFilterResult quantile_filter(const Matrix& data, double bot_q, double top_q,
                                     const Matrix& reference) {
  if (!(bot_q < top_q)) throw UsageError("quantile_filter: bot_q must be < top_q");
  if (reference.cols() != data.cols()) throw DataError("quantile_filter: column counts differ");
  if (reference.rows() == 0) throw DataError("quantile_filter: empty reference");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> lo(data.cols(), -inf);
  std::vector<double> hi(data.cols(), inf);
  for (std::size_t j = 0; j < data.cols(); ++j) {
    const auto col = reference.column(j);
    if (bot_q > 0.0) lo[j] = quantile(col, bot_q);
    if (top_q < 1.0) hi[j] = quantile(col, top_q);
  }
  QuantileFilterResult r;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    bool inside = true;
    for (std::size_t j = 0; j < data.cols() && inside; ++j) {
      const double v = data(i, j);
      inside = v >= lo[j] && v <= hi[j];
    }
    if (inside) r.kept_rows.push_back(i);
  }
  r.kept = data.select_rows(r.kept_rows);
  r.dropped = data.rows() - r.kept_rows.size();
  return r;
}

models::ForestConfig default_adversarial_config() {
  models::ForestConfig c;
  c.n_trees = 50;
  c.max_depth = 8;
  c.min_samples_leaf = 10;
  return c;
}

AdversarialResult adversarial_filter(const Matrix& real, const Matrix& synthetic,
                                     const models::ForestConfig& config, double keep_frac,
                                     std::uint64_t seed, Exec exec) {
  if (real.rows() < 2 || synthetic.rows() < 2) {
    throw DataError("adversarial_filter needs at least two real and two synthetic rows");
  }
  if (real.cols() != synthetic.cols()) throw DataError("adversarial_filter: column counts differ");
  if (!(keep_frac > 0.0 && keep_frac <= 1.0)) throw UsageError("keep_frac must lie in (0, 1]");
  const Matrix all = real.vconcat(synthetic);
  std::vector<int> labels(all.rows(), 0);
  std::fill(labels.begin() + static_cast<std::ptrdiff_t>(real.rows()), labels.end(), 1);
  const Rng root(seed);
  // Folds are drawn per source with one seed, so row-aligned copies share a fold.
  const auto real_folds = data::kfold_splits(real.rows(), 2, root.split(0).state());
  const auto synth_folds = data::kfold_splits(synthetic.rows(), 2, root.split(0).state());
  std::vector<data::Fold> folds(2);
  for (std::size_t f = 0; f < 2; ++f) {
    folds[f].train = real_folds[f].train;
    folds[f].valid = real_folds[f].valid;
    // The larger source is subsampled so each fold model trains on balanced classes.
    std::vector<std::size_t> synth_train = synth_folds[f].train;
    if (synth_train.size() > folds[f].train.size()) {
      Rng pick = root.split(3 + f);
      pick.shuffle(std::span<std::size_t>(synth_train));
      synth_train.resize(folds[f].train.size());
      std::sort(synth_train.begin(), synth_train.end());
    } else if (synth_train.size() < folds[f].train.size()) {
      std::vector<std::size_t> real_train = folds[f].train;
      Rng pick = root.split(3 + f);
      pick.shuffle(std::span<std::size_t>(real_train));
      real_train.resize(synth_train.size());
      std::sort(real_train.begin(), real_train.end());
      folds[f].train = std::move(real_train);
    }
    for (std::size_t r : synth_train) folds[f].train.push_back(real.rows() + r);
    for (std::size_t r : synth_folds[f].valid) folds[f].valid.push_back(real.rows() + r);
  }
  std::vector<double> proba(all.rows(), 0.0);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const Matrix Xt = all.select_rows(folds[f].train);
    std::vector<int> yt;
    for (std::size_t r : folds[f].train) yt.push_back(labels[r]);
    const Matrix Xv = all.select_rows(folds[f].valid);
    const auto forest = models::fit_rforest(Xt, yt, 2, config, root.split(1 + f).state(), exec);
    const Matrix p = forest->predict_proba(Xv, exec);
    for (std::size_t i = 0; i < folds[f].valid.size(); ++i) proba[folds[f].valid[i]] = p(i, 1);
  }
  AdversarialResult r;
  r.auc = metrics::roc_curve(labels, proba).auc.value();
  r.synthetic_proba.assign(proba.begin() + static_cast<std::ptrdiff_t>(real.rows()), proba.end());
  std::vector<std::size_t> order(synthetic.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return r.synthetic_proba[a] < r.synthetic_proba[b];
  });
  const auto keep = static_cast<std::size_t>(
      std::ceil(keep_frac * static_cast<double>(synthetic.rows())));
  order.resize(std::min(keep, order.size()));
  r.order = std::move(order);
  return r;
}

// --- pipeline --------------------------------------------------------------

namespace {
constexpr double kTargetJitter = 0.8;
}  // namespace

void validate(const GanPipeConfig& cfg) {
  if (cfg.gen_x_times == 0) throw UsageError("gen_x_times must be >= 1");
  if (!(cfg.bot_filter_quantile >= 0.0 && cfg.bot_filter_quantile < cfg.top_filter_quantile &&
        cfg.top_filter_quantile <= 1.0)) {
    throw UsageError("filter quantiles must satisfy 0 <= bot < top <= 1");
  }
  if (!(cfg.pregeneration_frac >= 1.0)) throw UsageError("pregeneration_frac must be >= 1");
}

json pipe_config_to_json(const GanPipeConfig& cfg) {
  return {{"gen_x_times", cfg.gen_x_times},
          {"bot_filter_quantile", cfg.bot_filter_quantile},
          {"top_filter_quantile", cfg.top_filter_quantile},
          {"is_post_process", cfg.is_post_process},
          {"pregeneration_frac", cfg.pregeneration_frac},
          {"only_generated_data", cfg.only_generated_data},
          {"adversarial_config", models::config_to_json(cfg.adversarial_config)},
          {"gan_params", gan_params_to_json(cfg.gan_params)},
          {"cat_cols", cfg.cat_cols}};
}

GanPipeConfig pipe_config_from_json(const json& j) {
  GanPipeConfig c;
  for (const auto& [key, _] : j.items()) {
    if (!pipe_config_to_json(c).contains(key)) {
      throw UsageError("gan pipe config: unknown key '" + key + "'");
    }
  }
  c.gen_x_times = j.value("gen_x_times", c.gen_x_times);
  c.bot_filter_quantile = j.value("bot_filter_quantile", c.bot_filter_quantile);
  c.top_filter_quantile = j.value("top_filter_quantile", c.top_filter_quantile);
  c.is_post_process = j.value("is_post_process", c.is_post_process);
  c.pregeneration_frac = j.value("pregeneration_frac", c.pregeneration_frac);
  c.only_generated_data = j.value("only_generated_data", c.only_generated_data);
  if (j.contains("adversarial_config")) {
    json merged = models::config_to_json(c.adversarial_config);
    merged.update(j.at("adversarial_config"));
    c.adversarial_config =
        std::get<models::ForestConfig>(models::config_from_json(models::ModelKind::rforest, merged));
  }
  if (j.contains("gan_params")) {
    json merged = gan_params_to_json(c.gan_params);
    merged.update(j.at("gan_params"));
    c.gan_params = gan_params_from_json(merged);
  }
  c.cat_cols = j.value("cat_cols", c.cat_cols);
  validate(c);
  return c;
}

PipeResult generate_data_pipe(const data::Dataset& train, const Matrix* test_x,
                              const GanPipeConfig& cfg, std::uint64_t seed, Exec exec) {
  validate(cfg);
  if (!cfg.cat_cols.empty()) {
    throw DataError("cat_cols lists '" + cfg.cat_cols.front() +
                    "'; the GAN models continuous columns only. Drop categorical columns or "
                    "one-hot encode them first");
  }
  reject_categorical(train);
  if (train.n_rows() == 0) throw DataError("gan pipeline: empty training set");
  if (train.has_missing()) throw DataError("gan pipeline: training data has missing values; impute first");
  if (test_x != nullptr && test_x->cols() != train.n_features()) {
    throw DataError("gan pipeline: test_x column count differs from train");
  }
  const std::size_t n = train.n_rows();
  const std::size_t d = train.n_features();
  const bool with_y = train.has_target();

  // Data space [X | y], standardized per column.
  const Rng root(seed);
  Matrix space = train.X;
  if (with_y) {
    // Class codes are dequantized with uniform jitter; decoding rounds back.
    Rng jitter = root.split(3);
    Matrix ycol(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      ycol(i, 0) = train.labels()[i] + kTargetJitter * (jitter.uniform() - 0.5);
    }
    space = space.hconcat(ycol);
  }
  const std::size_t width = space.cols();
  std::vector<double> mu(width);
  std::vector<double> sd(width);
  for (std::size_t j = 0; j < width; ++j) {
    const auto col = space.column(j);
    mu[j] = mean(col);
    sd[j] = population_std(col);
    if (sd[j] == 0.0) sd[j] = 1.0;
  }
  Matrix scaled = space;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < width; ++j) scaled(i, j) = (space(i, j) - mu[j]) / sd[j];
  }

  GanParams gp = cfg.gan_params;
  gp.batch_size = std::min(gp.batch_size, n);
  const GanModel gan = gan_train(scaled, gp, root.split(0).state());

  const std::size_t budget = cfg.gen_x_times * n;
  const auto pregen = static_cast<std::size_t>(
      std::ceil(cfg.pregeneration_frac * static_cast<double>(budget)));
  Matrix raw = gan_generate(gan, pregen, root.split(1).state());
  for (std::size_t i = 0; i < raw.rows(); ++i) {
    for (std::size_t j = 0; j < width; ++j) raw(i, j) = raw(i, j) * sd[j] + mu[j];
  }

  PipeResult result;
  std::vector<std::size_t> feature_cols(d);
  std::iota(feature_cols.begin(), feature_cols.end(), std::size_t{0});
  const auto qf = quantile_filter(raw.select_cols(feature_cols), cfg.bot_filter_quantile,
                                  cfg.top_filter_quantile, train.X);
  Matrix candidates = raw.select_rows(qf.kept_rows);
  if (qf.kept_rows.empty()) {
    result.warnings.push_back("every pregenerated row fell outside the quantile band");
  }

  std::optional<AdversarialResult> adv;
  std::vector<std::size_t> ranked;
  if (candidates.rows() >= 2) {
    const Matrix& reference = test_x != nullptr ? *test_x : train.X;
    adv = adversarial_filter(reference, candidates.select_cols(feature_cols),
                             cfg.adversarial_config, 1.0, root.split(2).state(), exec);
    ranked = adv->order;
  } else {
    for (std::size_t i = 0; i < candidates.rows(); ++i) ranked.push_back(i);
  }
  if (ranked.size() > budget) ranked.resize(budget);
  if (ranked.size() < budget) {
    result.warnings.push_back("only " + std::to_string(ranked.size()) + " rows survived filtering; " +
                              std::to_string(budget) + " were requested");
  }
  Matrix kept = candidates.select_rows(ranked);

  if (cfg.is_post_process) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto col = train.X.column(j);
      const double lo = *std::min_element(col.begin(), col.end());
      const double hi = *std::max_element(col.begin(), col.end());
      const bool integral =
          std::all_of(col.begin(), col.end(), [](double v) { return v == std::round(v); });
      for (std::size_t i = 0; i < kept.rows(); ++i) {
        double v = std::clamp(kept(i, j), lo, hi);
        if (integral) v = std::round(v);
        kept(i, j) = v;
      }
    }
  }
  result.gen_x = kept.select_cols(feature_cols);
  if (with_y) {
    std::vector<int> present(train.labels().begin(), train.labels().end());
    std::sort(present.begin(), present.end());
    present.erase(std::unique(present.begin(), present.end()), present.end());
    for (std::size_t i = 0; i < kept.rows(); ++i) {
      const double v = kept(i, d);
      int best = present.front();
      for (int c : present) {
        if (std::abs(v - c) < std::abs(v - best)) best = c;
      }
      result.gen_y.push_back(best);
    }
  }

  result.provenance = {
      {"config", pipe_config_to_json(cfg)},
      {"seed", seed},
      {"epochs_run", gan.epoch},
      {"final_generator_loss", gan.g_loss_history.empty() ? json(nullptr) : json(gan.g_loss_history.back())},
      {"final_discriminator_loss", gan.d_loss_history.empty() ? json(nullptr) : json(gan.d_loss_history.back())},
      {"rows_pregenerated", pregen},
      {"rows_dropped_by_quantile_filter", qf.dropped},
      {"rows_kept", result.gen_x.rows()},
      {"rows_requested", budget},
      {"adversarial_model", "random_forest"},
      {"adversarial_reference", test_x != nullptr ? "test_x" : "train"},
      {"adversarial_auc", adv ? json(adv->auc) : json(nullptr)},
      {"use_with_real", !cfg.only_generated_data},
      {"warnings", result.warnings}};
  return result;
}

data::Dataset combine_with_real(const data::Dataset& train, const PipeResult& result) {
  data::Dataset out = train;
  out.X = train.X.vconcat(result.gen_x);
  if (train.has_target()) {
    std::vector<int> y = train.labels();
    y.insert(y.end(), result.gen_y.begin(), result.gen_y.end());
    out.y = std::move(y);
  }
  return out;
}

// --- regression ------------------------------------------------------------

RegressionData make_regression(std::size_t n, std::size_t d, std::size_t n_informative,
                               double noise_sd, std::uint64_t seed) {
  if (n_informative > d) {
    throw UsageError("make_regression: n_informative=" + std::to_string(n_informative) +
                     " exceeds d=" + std::to_string(d));
  }
  if (n == 0 || d == 0) throw UsageError("make_regression: n and d must be >= 1");
  if (noise_sd < 0.0) throw UsageError("make_regression: noise_sd must be >= 0");
  const Rng root(seed);
  Rng x_rng = root.split(0);
  Rng pick_rng = root.split(1);
  Rng coef_rng = root.split(2);
  Rng noise_rng = root.split(3);
  RegressionData r;
  const auto perm = permutation(d, pick_rng);
  r.informative.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_informative));
  std::sort(r.informative.begin(), r.informative.end());
  r.coef.assign(d, 0.0);
  for (std::size_t j : r.informative) r.coef[j] = 100.0 * coef_rng.uniform();
  r.X = Matrix(n, d);
  r.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      r.X(i, j) = x_rng.normal();
      s += r.coef[j] * r.X(i, j);
    }
    r.y[i] = s + noise_sd * noise_rng.normal();
  }
  return r;
}

std::vector<FitLine> feature_fit_lines(const Matrix& X, std::span<const double> y) {
  if (X.rows() != y.size()) throw DataError("feature_fit_lines: X and y lengths differ");
  std::vector<FitLine> out;
  for (std::size_t j = 0; j < X.cols(); ++j) {
    const auto x = X.column(j);
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    out.push_back({my - slope * mx, slope});
  }
  return out;
}

}  // namespace tabkit::tabgan
