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

#include "tabkit/syneval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace tabkit::syneval {

using nlohmann::json;

double kolmogorov_q(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  double q = 0.0;
  if (lambda < 1.18) {
    // Jacobi theta form, fast to converge for small lambda.
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int k = 1; k < 200; k += 2) {
      const double term = std::exp(-static_cast<double>(k) * k * c);
      s += term;
      if (term < 1e-16) break;
    }
    q = 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s;
  } else {
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      q += sign * term;
      sign = -sign;
      if (term < 1e-12) break;
    }
    q *= 2.0;
  }
  return std::clamp(q, 0.0, 1.0);
}

double ks_p_value(double D, std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) throw DataError("ks: empty sample");
  if (D <= 0.0) return 1.0;
  const double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
  const double root = std::sqrt(ne);
  return kolmogorov_q((root + 0.12 + 0.11 / root) * D);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DataError("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  for (double v : x) {
    if (std::isnan(v)) throw DataError("ks_two_sample: sample has missing values");
  }
  for (double v : y) {
    if (std::isnan(v)) throw DataError("ks_two_sample: sample has missing values");
  }
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto n = static_cast<double>(x.size());
  const auto m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double D = 0.0;
  while (i < x.size() || j < y.size()) {
    double v;
    if (j == y.size() || (i < x.size() && x[i] <= y[j])) {
      v = x[i];
    } else {
      v = y[j];
    }
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    D = std::max(D, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return {D, ks_p_value(D, x.size(), y.size())};
}

namespace {

struct ColumnPairing {
  std::vector<std::size_t> real;
  std::vector<std::size_t> synth;
};

ColumnPairing pair_columns(const data::Dataset& real, const data::Dataset& synth) {
  if (real.n_features() != synth.n_features()) {
    throw DataError("real and synthetic data have different feature counts (" +
                    std::to_string(real.n_features()) + " vs " +
                    std::to_string(synth.n_features()) + ")");
  }
  ColumnPairing p;
  for (std::size_t j = 0; j < real.n_features(); ++j) {
    p.real.push_back(j);
    p.synth.push_back(synth.column_index(real.columns[j].name));
  }
  return p;
}

}  // namespace

std::vector<StdComparison> std_compare(const data::Dataset& real, const data::Dataset& synth) {
  const auto pairing = pair_columns(real, synth);
  std::vector<StdComparison> out;
  for (std::size_t k = 0; k < pairing.real.size(); ++k) {
    StdComparison s;
    s.name = real.columns[pairing.real[k]].name;
    s.real_std = population_std(real.X.column(pairing.real[k]));
    s.synth_std = population_std(synth.X.column(pairing.synth[k]));
    s.abs_diff = std::abs(s.real_std - s.synth_std);
    out.push_back(s);
  }
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("cosine_similarity: length mismatch");
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("spearman: length mismatch");
  if (a.size() < 2) return 0.0;
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double ma = mean(ra);
  const double mb = mean(rb);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

ImportanceSimilarity importance_similarity(const data::Dataset& real, const data::Dataset& synth,
                                           const models::ForestConfig& config, std::uint64_t seed,
                                           Exec exec) {
  if (!real.has_target() || !synth.has_target()) {
    throw DataError("importance_similarity needs a target column on both datasets");
  }
  const auto pairing = pair_columns(real, synth);
  const Matrix Xs = synth.X.select_cols(pairing.synth);
  const std::size_t K = std::max(real.n_classes(), synth.n_classes());
  const auto fr = models::fit_rforest(real.X, real.labels(), K, config, seed, exec);
  const auto fs = models::fit_rforest(Xs, synth.labels(), K, config, seed, exec);
  ImportanceSimilarity s;
  s.real = fr->feature_importances();
  s.synth = fs->feature_importances();
  s.cosine = cosine_similarity(s.real, s.synth);
  s.spearman = spearman(s.real, s.synth);
  return s;
}

FidelityReport fidelity_report(const data::Dataset& real, const data::Dataset& synth,
                               const FidelityOptions& options) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  const auto pairing = pair_columns(real, synth);
  FidelityReport r;
  r.alpha = options.alpha;
  r.spearman_threshold = options.spearman_threshold;
  const auto stds = std_compare(real, synth);
  r.per_feature.resize(pairing.real.size());
  parallel_for(pairing.real.size(), options.exec, [&](std::size_t k) {
    const auto ks = ks_two_sample(real.X.column(pairing.real[k]), synth.X.column(pairing.synth[k]));
    auto& f = r.per_feature[k];
    f.name = stds[k].name;
    f.ks_D = ks.D;
    f.ks_p = ks.p;
    f.real_std = stds[k].real_std;
    f.synth_std = stds[k].synth_std;
    f.std_abs_diff = stds[k].abs_diff;
    f.rejected = ks.p < options.alpha;
  });
  bool any_rejected = false;
  for (const auto& f : r.per_feature) any_rejected = any_rejected || f.rejected;
  bool importance_ok = true;
  if (real.has_target() && synth.has_target()) {
    r.importance = importance_similarity(real, synth, options.forest, options.seed, options.exec);
    importance_ok = r.importance->spearman >= options.spearman_threshold;
  } else {
    r.notes.push_back("importance similarity skipped: a target column is missing");
  }
  r.consistent = !any_rejected && importance_ok;
  return r;
}

json fidelity_to_json(const FidelityReport& report) {
  json features = json::array();
  for (const auto& f : report.per_feature) {
    features.push_back({{"name", f.name},
                        {"ks_D", f.ks_D},
                        {"ks_p", f.ks_p},
                        {"real_std", f.real_std},
                        {"synth_std", f.synth_std},
                        {"std_abs_diff", f.std_abs_diff},
                        {"verdict", f.rejected ? "rejected" : "consistent"}});
  }
  json j = {{"format_version", kFidelityFormatVersion},
            {"alpha", report.alpha},
            {"spearman_threshold", report.spearman_threshold},
            {"per_feature", features},
            {"overall_verdict", report.consistent ? "consistent" : "inconsistent"},
            {"notes", report.notes}};
  if (report.importance) {
    j["importance"] = {{"real", report.importance->real},
                       {"synth", report.importance->synth},
                       {"cosine", report.importance->cosine},
                       {"spearman", report.importance->spearman},
                       {"model", "random_forest"}};
  } else {
    j["importance"] = nullptr;
  }
  return j;
}

std::string fidelity_to_csv(const FidelityReport& report) {
  std::string out = "name,ks_D,ks_p,real_std,synth_std,std_abs_diff,verdict\n";
  for (const auto& f : report.per_feature) {
    out += f.name + "," + data::format_number(f.ks_D) + "," + data::format_number(f.ks_p) + "," +
           data::format_number(f.real_std) + "," + data::format_number(f.synth_std) + "," +
           data::format_number(f.std_abs_diff) + "," + (f.rejected ? "rejected" : "consistent") +
           "\n";
  }
  return out;
}

std::string importance_to_csv(const FidelityReport& report) {
  std::string out = "feature,real,synth\n";
  if (!report.importance) return out;
  for (std::size_t j = 0; j < report.per_feature.size(); ++j) {
    out += report.per_feature[j].name + "," + data::format_number(report.importance->real[j]) +
           "," + data::format_number(report.importance->synth[j]) + "\n";
  }
  return out;
}

}  // namespace tabkit::syneval
