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

#include "tabkit/models.hpp"

namespace tabkit::models {

using nlohmann::json;

InputScaling InputScaling::fit(const Matrix& X) {
  InputScaling s;
  s.mean.resize(X.cols());
  s.scale.resize(X.cols());
  for (std::size_t j = 0; j < X.cols(); ++j) {
    const auto col = X.column(j);
    s.mean[j] = tabkit::mean(col);
    const double sd = population_std(col);
    s.scale[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

InputScaling InputScaling::identity(std::size_t d) {
  return {std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
}

Matrix InputScaling::apply(const Matrix& X) const {
  Matrix out = X;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - mean[j]) / scale[j];
  }
  return out;
}

namespace {

json scaling_json(const InputScaling& s) { return {{"input_mean", s.mean}, {"input_scale", s.scale}}; }

InputScaling scaling_from(const json& p, std::size_t d) {
  InputScaling s{p.at("input_mean").get<std::vector<double>>(),
                 p.at("input_scale").get<std::vector<double>>()};
  if (s.mean.size() != d || s.scale.size() != d) throw ModelError("input scaling has wrong width");
  return s;
}

void softmax_row(std::span<double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    total += v;
  }
  for (double& v : z) v /= total;
}

}  // namespace

double softmax_loss_grad(std::span<const double> theta, const Matrix& X, std::span<const int> y,
                         std::size_t n_classes, double l2, std::span<const std::size_t> rows,
                         std::span<double> grad) {
  const std::size_t d = X.cols();
  const std::size_t K = n_classes;
  if (theta.size() != K * d + K) throw ModelError("softmax_loss_grad: theta has wrong size");
  const bool want_grad = !grad.empty();
  if (want_grad) {
    if (grad.size() != theta.size()) throw ModelError("softmax_loss_grad: grad has wrong size");
    std::fill(grad.begin(), grad.end(), 0.0);
  }
  const double inv_m = 1.0 / static_cast<double>(rows.size());
  std::vector<double> z(K);
  double loss = 0.0;
  for (std::size_t r : rows) {
    const auto x = X.row(r);
    for (std::size_t k = 0; k < K; ++k) z[k] = dot(theta.subspan(k * d, d), x) + theta[K * d + k];
    const double m = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) total += std::exp(z[k] - m);
    const auto label = static_cast<std::size_t>(y[r]);
    loss += (m + std::log(total) - z[label]) * inv_m;
    if (!want_grad) continue;
    for (std::size_t k = 0; k < K; ++k) {
      const double coeff = (std::exp(z[k] - m) / total - (k == label ? 1.0 : 0.0)) * inv_m;
      double* gw = grad.data() + k * d;
      for (std::size_t j = 0; j < d; ++j) gw[j] += coeff * x[j];
      grad[K * d + k] += coeff;
    }
  }
  double penalty = 0.0;
  for (std::size_t i = 0; i < K * d; ++i) {
    penalty += theta[i] * theta[i];
    if (want_grad) grad[i] += l2 * theta[i];
  }
  return loss + 0.5 * l2 * penalty;
}

LogisticRegression::LogisticRegression(ModelSpec spec, std::size_t d, std::size_t k,
                                       std::vector<double> theta, InputScaling scaling)
    : Classifier(std::move(spec), d, k), theta_(std::move(theta)), scaling_(std::move(scaling)) {
  if (theta_.size() != k * d + k) throw ModelError("logreg: parameter vector has wrong size");
}

Matrix LogisticRegression::predict_proba(const Matrix& X) const {
  check_input(X);
  const Matrix xs = scaling_.apply(X);
  const std::size_t d = n_features();
  const std::size_t K = n_classes();
  const std::span<const double> theta(theta_);
  Matrix p(X.rows(), K);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    auto z = p.row(r);
    for (std::size_t k = 0; k < K; ++k) z[k] = dot(theta.subspan(k * d, d), xs.row(r)) + theta_[K * d + k];
    softmax_row(z);
  }
  return p;
}

Matrix LogisticRegression::weights() const {
  Matrix w(n_classes(), n_features());
  std::copy(theta_.begin(), theta_.begin() + static_cast<std::ptrdiff_t>(w.data().size()),
            w.data().begin());
  return w;
}

json LogisticRegression::params_to_json() const {
  const auto wsize = static_cast<std::ptrdiff_t>(n_classes() * n_features());
  json p = scaling_json(scaling_);
  p["weights"] = std::vector<double>(theta_.begin(), theta_.begin() + wsize);
  p["bias"] = std::vector<double>(theta_.begin() + wsize, theta_.end());
  return p;
}

std::shared_ptr<LogisticRegression> LogisticRegression::from_params(ModelSpec spec, std::size_t d,
                                                                    std::size_t k,
                                                                    const json& params) {
  auto theta = params.at("weights").get<std::vector<double>>();
  const auto bias = params.at("bias").get<std::vector<double>>();
  theta.insert(theta.end(), bias.begin(), bias.end());
  return std::make_shared<LogisticRegression>(std::move(spec), d, k, std::move(theta),
                                              scaling_from(params, d));
}

std::shared_ptr<LogisticRegression> fit_logreg(const Matrix& X, std::span<const int> y,
                                               std::size_t n_classes, const LogRegConfig& config,
                                               std::uint64_t seed) {
  require_two_classes(y, "logreg");
  const InputScaling scaling =
      config.standardize_inputs ? InputScaling::fit(X) : InputScaling::identity(X.cols());
  const Matrix xs = scaling.apply(X);
  const std::size_t d = X.cols();
  std::vector<double> theta(n_classes * d + n_classes, 0.0);
  std::vector<double> grad(theta.size());
  OptimizerState opt = make_optimizer(config.optimizer, config.lr, theta.size(), config.batch);
  Rng rng(seed);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& rows : epoch_schedule(X.rows(), config.batch, rng)) {
      softmax_loss_grad(theta, xs, y, n_classes, config.l2, rows, grad);
      optimizer_step(opt, theta, grad);
    }
  }
  if (!std::all_of(theta.begin(), theta.end(), [](double v) { return std::isfinite(v); })) {
    throw ModelError("logreg: training diverged (non-finite weights); lower lr");
  }
  return std::make_shared<LogisticRegression>(ModelSpec{config, seed}, d, n_classes,
                                              std::move(theta), scaling);
}

double hinge_loss_grad(std::span<const double> theta, const Matrix& X, std::span<const double> t,
                       double C, std::size_t n_total, std::span<const std::size_t> rows,
                       std::span<double> grad) {
  const std::size_t d = X.cols();
  if (theta.size() != d + 1) throw ModelError("hinge_loss_grad: theta has wrong size");
  const bool want_grad = !grad.empty();
  const double reg = 1.0 / (C * static_cast<double>(n_total));
  const double inv_m = 1.0 / static_cast<double>(rows.size());
  const auto w = theta.first(d);
  const double b = theta[d];
  if (want_grad) {
    for (std::size_t j = 0; j < d; ++j) grad[j] = reg * w[j];
    grad[d] = 0.0;
  }
  double loss = 0.5 * reg * dot(w, w);
  for (std::size_t r : rows) {
    const auto x = X.row(r);
    const double margin = t[r] * (dot(w, x) + b);
    if (margin >= 1.0) continue;
    loss += (1.0 - margin) * inv_m;
    if (want_grad) {
      for (std::size_t j = 0; j < d; ++j) grad[j] -= t[r] * x[j] * inv_m;
      grad[d] -= t[r] * inv_m;
    }
  }
  return loss;
}

LinearSvm::LinearSvm(ModelSpec spec, std::size_t d, std::size_t k,
                     std::vector<std::vector<double>> thetas, InputScaling scaling)
    : Classifier(std::move(spec), d, k), thetas_(std::move(thetas)), scaling_(std::move(scaling)) {
  const std::size_t expected = k == 2 ? 1 : k;
  if (thetas_.size() != expected) throw ModelError("linsvm: wrong number of scorers");
  for (const auto& t : thetas_) {
    if (t.size() != d + 1) throw ModelError("linsvm: scorer has wrong width");
  }
}

Matrix LinearSvm::decision_function(const Matrix& X) const {
  check_input(X);
  const Matrix xs = scaling_.apply(X);
  const std::size_t d = n_features();
  Matrix out(X.rows(), thetas_.size());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    for (std::size_t s = 0; s < thetas_.size(); ++s) {
      const std::span<const double> theta(thetas_[s]);
      out(r, s) = dot(theta.first(d), xs.row(r)) + theta[d];
    }
  }
  return out;
}

std::vector<int> LinearSvm::predict(const Matrix& X) const {
  const Matrix scores = decision_function(X);
  std::vector<int> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    out[r] = scores.cols() == 1 ? (scores(r, 0) > 0.0 ? 1 : 0)
                                : static_cast<int>(argmax(scores.row(r)));
  }
  return out;
}

json LinearSvm::params_to_json() const {
  json p = scaling_json(scaling_);
  p["scorers"] = thetas_;
  return p;
}

std::shared_ptr<LinearSvm> LinearSvm::from_params(ModelSpec spec, std::size_t d, std::size_t k,
                                                  const json& params) {
  return std::make_shared<LinearSvm>(std::move(spec), d, k,
                                     params.at("scorers").get<std::vector<std::vector<double>>>(),
                                     scaling_from(params, d));
}

std::shared_ptr<LinearSvm> fit_linsvm(const Matrix& X, std::span<const int> y,
                                      std::size_t n_classes, const SvmConfig& config,
                                      std::uint64_t seed, Exec exec) {
  require_two_classes(y, "linsvm");
  const InputScaling scaling =
      config.standardize_inputs ? InputScaling::fit(X) : InputScaling::identity(X.cols());
  const Matrix xs = scaling.apply(X);
  const std::size_t d = X.cols();
  const std::size_t n_scorers = n_classes == 2 ? 1 : n_classes;
  std::vector<std::vector<double>> thetas(n_scorers);
  const Rng root(seed);
  // One-vs-rest scorers are independent; each owns a child stream.
  parallel_for(n_scorers, exec, [&](std::size_t s) {
    const int positive = n_classes == 2 ? 1 : static_cast<int>(s);
    std::vector<double> t(X.rows());
    for (std::size_t r = 0; r < X.rows(); ++r) t[r] = y[r] == positive ? 1.0 : -1.0;
    std::vector<double> theta(d + 1, 0.0);
    std::vector<double> grad(d + 1);
    OptimizerState opt = make_optimizer(config.optimizer, config.lr, theta.size(), config.batch);
    Rng rng = root.split(s);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      for (const auto& rows : epoch_schedule(X.rows(), config.batch, rng)) {
        hinge_loss_grad(theta, xs, t, config.C, X.rows(), rows, grad);
        optimizer_step(opt, theta, grad);
      }
    }
    thetas[s] = std::move(theta);
  });
  return std::make_shared<LinearSvm>(ModelSpec{config, seed}, d, n_classes, std::move(thetas),
                                     scaling);
}

}  // namespace tabkit::models
