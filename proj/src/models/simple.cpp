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
#include <numbers>
#include <numeric>

#include "tabkit/models.hpp"

namespace tabkit::models {

using nlohmann::json;

namespace {

std::vector<double> class_frequencies(std::span<const int> y, std::size_t n_classes) {
  std::vector<double> freq(n_classes, 0.0);
  for (int c : y) freq[static_cast<std::size_t>(c)] += 1.0;
  for (double& f : freq) f /= static_cast<double>(y.size());
  return freq;
}

}  // namespace

// --- k-nearest neighbours --------------------------------------------------

KNearestNeighbors::KNearestNeighbors(ModelSpec spec, std::size_t k_classes, Matrix X,
                                     std::vector<int> y)
    : Classifier(std::move(spec), X.cols(), k_classes), train_X_(std::move(X)),
      train_y_(std::move(y)) {
  const auto k = std::get<KnnConfig>(this->spec().config).k;
  if (k == 0 || k > train_X_.rows()) {
    throw ModelError("knn: k=" + std::to_string(k) + " must lie in [1, n=" +
                     std::to_string(train_X_.rows()) + "]");
  }
}

Matrix KNearestNeighbors::predict_proba(const Matrix& X) const {
  return predict_proba(X, Exec::parallel);
}

Matrix KNearestNeighbors::predict_proba(const Matrix& X, Exec exec) const {
  check_input(X);
  const std::size_t k = std::get<KnnConfig>(spec().config).k;
  const std::size_t n = train_X_.rows();
  Matrix p(X.rows(), n_classes());
  parallel_for(X.rows(), exec, [&](std::size_t r) {
    std::vector<std::pair<double, std::size_t>> dist(n);
    const auto q = X.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      const auto t = train_X_.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < q.size(); ++j) s += (q[j] - t[j]) * (q[j] - t[j]);
      dist[i] = {s, i};  // pair ordering breaks distance ties by lower index
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    auto out = p.row(r);
    for (std::size_t i = 0; i < k; ++i) {
      out[static_cast<std::size_t>(train_y_[dist[i].second])] += 1.0 / static_cast<double>(k);
    }
  });
  return p;
}

json KNearestNeighbors::params_to_json() const {
  return {{"train_X", std::vector<double>(train_X_.data().begin(), train_X_.data().end())},
          {"train_y", train_y_}};
}

std::shared_ptr<KNearestNeighbors> KNearestNeighbors::from_params(ModelSpec spec, std::size_t d,
                                                                  std::size_t k,
                                                                  const json& params) {
  const auto flat = params.at("train_X").get<std::vector<double>>();
  auto y = params.at("train_y").get<std::vector<int>>();
  if (flat.size() != y.size() * d) throw ModelError("knn: stored training matrix has wrong size");
  Matrix X(y.size(), d);
  std::copy(flat.begin(), flat.end(), X.data().begin());
  return std::make_shared<KNearestNeighbors>(std::move(spec), k, std::move(X), std::move(y));
}

std::shared_ptr<KNearestNeighbors> fit_knn(const Matrix& X, std::span<const int> y,
                                           std::size_t n_classes, const KnnConfig& config,
                                           std::uint64_t seed) {
  return std::make_shared<KNearestNeighbors>(ModelSpec{config, seed}, n_classes, X,
                                             std::vector<int>(y.begin(), y.end()));
}

// --- Gaussian naive Bayes --------------------------------------------------

GaussianNaiveBayes::GaussianNaiveBayes(ModelSpec spec, std::size_t d, std::size_t k,
                                       std::vector<double> priors, Matrix means, Matrix variances)
    : Classifier(std::move(spec), d, k), priors_(std::move(priors)), means_(std::move(means)),
      variances_(std::move(variances)) {
  if (priors_.size() != k || means_.rows() != k || means_.cols() != d ||
      variances_.rows() != k || variances_.cols() != d) {
    throw ModelError("gnb: parameter shapes do not match");
  }
}

Matrix GaussianNaiveBayes::predict_proba(const Matrix& X) const {
  check_input(X);
  const std::size_t K = n_classes();
  Matrix p(X.rows(), K);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    auto logp = p.row(r);
    for (std::size_t c = 0; c < K; ++c) {
      if (priors_[c] <= 0.0) {
        logp[c] = -std::numeric_limits<double>::infinity();
        continue;
      }
      double s = std::log(priors_[c]);
      for (std::size_t j = 0; j < X.cols(); ++j) {
        const double var = variances_(c, j);
        const double diff = X(r, j) - means_(c, j);
        s -= 0.5 * (std::log(2.0 * std::numbers::pi * var) + diff * diff / var);
      }
      logp[c] = s;
    }
    const double m = *std::max_element(logp.begin(), logp.end());
    double total = 0.0;
    for (double& v : logp) {
      v = std::exp(v - m);
      total += v;
    }
    for (double& v : logp) v /= total;
  }
  return p;
}

json GaussianNaiveBayes::params_to_json() const {
  return {{"priors", priors_},
          {"means", std::vector<double>(means_.data().begin(), means_.data().end())},
          {"variances", std::vector<double>(variances_.data().begin(), variances_.data().end())}};
}

std::shared_ptr<GaussianNaiveBayes> GaussianNaiveBayes::from_params(ModelSpec spec, std::size_t d,
                                                                    std::size_t k,
                                                                    const json& params) {
  auto to_matrix = [&](const char* key) {
    const auto flat = params.at(key).get<std::vector<double>>();
    if (flat.size() != k * d) throw ModelError(std::string("gnb: '") + key + "' has wrong size");
    Matrix m(k, d);
    std::copy(flat.begin(), flat.end(), m.data().begin());
    return m;
  };
  return std::make_shared<GaussianNaiveBayes>(std::move(spec), d, k,
                                              params.at("priors").get<std::vector<double>>(),
                                              to_matrix("means"), to_matrix("variances"));
}

std::shared_ptr<GaussianNaiveBayes> fit_gnb(const Matrix& X, std::span<const int> y,
                                            std::size_t n_classes, const GnbConfig& config,
                                            std::uint64_t seed) {
  const std::size_t d = X.cols();
  Matrix means(n_classes, d);
  Matrix variances(n_classes, d);
  std::vector<double> counts(n_classes, 0.0);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const auto c = static_cast<std::size_t>(y[r]);
    counts[c] += 1.0;
    for (std::size_t j = 0; j < d; ++j) means(c, j) += X(r, j);
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t j = 0; j < d; ++j) means(c, j) = counts[c] > 0 ? means(c, j) / counts[c] : 0.0;
  }
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const auto c = static_cast<std::size_t>(y[r]);
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = X(r, j) - means(c, j);
      variances(c, j) += diff * diff;
    }
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      const double v = counts[c] > 0 ? variances(c, j) / counts[c] : 0.0;
      variances(c, j) = std::max(v, config.var_floor);
    }
  }
  return std::make_shared<GaussianNaiveBayes>(ModelSpec{config, seed}, d, n_classes,
                                              class_frequencies(y, n_classes), std::move(means),
                                              std::move(variances));
}

// --- ZeroR -----------------------------------------------------------------

ZeroR::ZeroR(ModelSpec spec, std::size_t d, std::vector<double> frequencies)
    : Classifier(std::move(spec), d, frequencies.size()), frequencies_(std::move(frequencies)) {}

Matrix ZeroR::predict_proba(const Matrix& X) const {
  check_input(X);
  Matrix p(X.rows(), n_classes());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    std::copy(frequencies_.begin(), frequencies_.end(), p.row(r).begin());
  }
  return p;
}

json ZeroR::params_to_json() const { return {{"frequencies", frequencies_}}; }

std::shared_ptr<ZeroR> ZeroR::from_params(ModelSpec spec, std::size_t d, std::size_t k,
                                          const json& params) {
  auto f = params.at("frequencies").get<std::vector<double>>();
  if (f.size() != k) throw ModelError("zeror: frequency vector has wrong size");
  return std::make_shared<ZeroR>(std::move(spec), d, std::move(f));
}

std::shared_ptr<ZeroR> fit_zeror(const Matrix& X, std::span<const int> y, std::size_t n_classes,
                                 std::uint64_t seed) {
  return std::make_shared<ZeroR>(ModelSpec{ZeroRConfig{}, seed}, X.cols(),
                                 class_frequencies(y, n_classes));
}

}  // namespace tabkit::models
