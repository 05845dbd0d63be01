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

namespace tabkit::tabgan {

/// Fully connected network with ReLU hidden layers and a linear output.
/// Parameters live in one flat vector, layer by layer as [W (out x in) | b].
class Mlp {
 public:
  explicit Mlp(std::vector<std::size_t> widths);

  const std::vector<std::size_t>& widths() const { return widths_; }
  std::size_t n_inputs() const { return widths_.front(); }
  std::size_t n_outputs() const { return widths_.back(); }
  std::size_t n_layers() const { return widths_.size() - 1; }
  std::size_t n_params() const { return offsets_.back(); }
  /// Half-open range of layer l inside the flat parameter vector.
  std::pair<std::size_t, std::size_t> layer_range(std::size_t l) const;

  /// He-normal weights, zero biases.
  std::vector<double> init(Rng& rng) const;

  struct Cache {
    std::vector<Matrix> inputs;  // input to each layer
    std::vector<Matrix> pre;     // pre-activation of each layer
  };

  Matrix forward(std::span<const double> theta, const Matrix& X, Cache* cache = nullptr) const;
  /// Adds dL/dtheta to grad and returns dL/dX.
  Matrix backward(std::span<const double> theta, const Cache& cache, const Matrix& d_out,
                  std::span<double> grad) const;

 private:
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> offsets_;
};

struct GanParams {
  std::size_t batch_size = 64;
  /// 0 disables early stopping.
  std::size_t patience = 25;
  std::size_t epochs = 500;
  double learning_rate = 2e-4;
  std::size_t noise_dim = 100;
  std::vector<std::size_t> generator_hidden{50, 25, 12};
  std::vector<std::size_t> discriminator_hidden{50, 25, 12};
};

nlohmann::json gan_params_to_json(const GanParams& p);
GanParams gan_params_from_json(const nlohmann::json& j);

struct GanModel {
  Mlp generator;
  Mlp discriminator;
  std::vector<double> theta_g;
  std::vector<double> theta_d;
  OptimizerState opt_g;
  OptimizerState opt_d;
  std::size_t epoch = 0;
  double best_loss = 0.0;
  std::size_t patience_counter = 0;
  std::vector<double> d_loss_history;
  std::vector<double> g_loss_history;
  std::size_t noise_dim = 100;
};

/// Numerically stable log(1 + e^a).
double softplus(double a);

/// Mean binary cross-entropy over all real (label 1) and fake (label 0) rows.
double discriminator_loss_grad(const Mlp& D, std::span<const double> theta_d, const Matrix& real,
                               const Matrix& fake, std::span<double> grad);

/// Non-saturating generator loss -mean log D(G(z)); grad is w.r.t. theta_g.
double generator_loss_grad(const Mlp& G, std::span<const double> theta_g, const Mlp& D,
                           std::span<const double> theta_d, const Matrix& z,
                           std::span<double> grad);

/// Sigmoid of the discriminator logit per row.
std::vector<double> discriminate(const GanModel& model, const Matrix& X);

GanModel gan_init(std::size_t d, const GanParams& params, std::uint64_t seed);

/// Alternating discriminator and generator updates on standardized data,
/// stopping early when the epoch generator loss fails to improve for
/// `patience` epochs.
GanModel gan_train(const Matrix& data, const GanParams& params, std::uint64_t seed);
/// Rejects categorical columns before training.
GanModel gan_train(const data::Dataset& real, const GanParams& params, std::uint64_t seed);

Matrix gan_generate(const GanModel& model, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Filters and pipeline
// ---------------------------------------------------------------------------

struct QuantileFilterResult {
  Matrix kept;
  std::vector<std::size_t> kept_rows;
  std::size_t dropped = 0;
};

/// Drops rows with any value outside the reference column's [bot_q, top_q]
/// quantile band. bot_q <= 0 and top_q >= 1 leave that side open.
QuantileFilterResult quantile_filter(const Matrix& data, double bot_q, double top_q,
                                     const Matrix& reference);

struct AdversarialResult {
  /// Kept synthetic row indices, most real-like first.
  std::vector<std::size_t> order;
  /// Out-of-fold probability of being synthetic, per synthetic row.
  std::vector<double> synthetic_proba;
  double auc = 0.5;
};

models::ForestConfig default_adversarial_config();

/// Two-fold cross-fitted forest separating real (0) from synthetic (1);
/// folds are stratified by source and each fold model trains on a balanced
/// subsample of the larger source.
AdversarialResult adversarial_filter(const Matrix& real, const Matrix& synthetic,
                                     const models::ForestConfig& config, double keep_frac,
                                     std::uint64_t seed, Exec exec = Exec::parallel);

struct GanPipeConfig {
  std::size_t gen_x_times = 100;
  double bot_filter_quantile = 0.001;
  double top_filter_quantile = 0.999;
  bool is_post_process = true;
  double pregeneration_frac = 2.0;
  bool only_generated_data = false;
  models::ForestConfig adversarial_config = default_adversarial_config();
  GanParams gan_params;
  std::vector<std::string> cat_cols;
};

void validate(const GanPipeConfig& cfg);
nlohmann::json pipe_config_to_json(const GanPipeConfig& cfg);
GanPipeConfig pipe_config_from_json(const nlohmann::json& j);

struct PipeResult {
  Matrix gen_x;
  std::vector<int> gen_y;  // empty without a target
  nlohmann::json provenance;
  std::vector<std::string> warnings;
};

/// Trains on [X | y], pregenerates, filters by quantile band and realism,
/// post-processes and truncates to gen_x_times * n rows.
PipeResult generate_data_pipe(const data::Dataset& train, const Matrix* test_x,
                              const GanPipeConfig& cfg, std::uint64_t seed,
                              Exec exec = Exec::parallel);

/// Appends generated rows to the real training rows.
data::Dataset combine_with_real(const data::Dataset& train, const PipeResult& result);

// ---------------------------------------------------------------------------
// Synthetic regression
// ---------------------------------------------------------------------------

struct RegressionData {
  Matrix X;
  std::vector<double> y;
  std::vector<double> coef;
  std::vector<std::size_t> informative;  // ascending
};

RegressionData make_regression(std::size_t n, std::size_t d, std::size_t n_informative,
                               double noise_sd, std::uint64_t seed);

struct FitLine {
  double intercept = 0.0;
  double slope = 0.0;
};

/// Least-squares line of y against each feature separately.
std::vector<FitLine> feature_fit_lines(const Matrix& X, std::span<const double> y);

}  // namespace tabkit::tabgan
