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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace oracle {

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  double D = 0.0;
  for (double t : pooled) {
    std::size_t ca = 0;
    std::size_t cb = 0;
    for (double v : a) ca += v <= t ? 1 : 0;
    for (double v : b) cb += v <= t ? 1 : 0;
    const double fa = static_cast<double>(ca) / static_cast<double>(a.size());
    const double fb = static_cast<double>(cb) / static_cast<double>(b.size());
    D = std::max(D, std::abs(fa - fb));
  }
  return D;
}

double kolmogorov_q(double lambda, int terms) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= terms; ++k) {
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    sum += sign * std::exp(-2.0 * k * k * lambda * lambda);
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

Tally tally_report(std::span<const int> y_true, std::span<const int> y_pred, std::size_t K) {
  Tally t;
  t.confusion.assign(K, std::vector<std::size_t>(K, 0));
  std::vector<std::size_t> tp(K, 0), fp(K, 0), fn(K, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const auto a = static_cast<std::size_t>(y_true[i]);
    const auto p = static_cast<std::size_t>(y_pred[i]);
    ++t.confusion[a][p];
    if (a == p) {
      ++tp[a];
      ++correct;
    } else {
      ++fp[p];
      ++fn[a];
    }
  }
  const auto n = static_cast<double>(y_true.size());
  t.accuracy = static_cast<double>(correct) / n;
  double sp = 0, sr = 0, sf = 0, wp = 0, wr = 0, wf = 0;
  for (std::size_t c = 0; c < K; ++c) {
    ClassTally ct;
    ct.support = tp[c] + fn[c];
    if (tp[c] + fp[c] == 0) {
      ct.precision_undefined = true;
    } else {
      ct.precision = static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fp[c]);
    }
    if (tp[c] + fn[c] == 0) {
      ct.recall_undefined = true;
    } else {
      ct.recall = static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fn[c]);
    }
    if (ct.precision + ct.recall > 0) {
      ct.f1 = 2.0 * ct.precision * ct.recall / (ct.precision + ct.recall);
    }
    sp += ct.precision;
    sr += ct.recall;
    sf += ct.f1;
    const auto w = static_cast<double>(ct.support);
    wp += w * ct.precision;
    wr += w * ct.recall;
    wf += w * ct.f1;
    t.per_class.push_back(ct);
  }
  const auto k = static_cast<double>(K);
  t.macro_precision = sp / k;
  t.macro_recall = sr / k;
  t.macro_f1 = sf / k;
  t.weighted_precision = wp / n;
  t.weighted_recall = wr / n;
  t.weighted_f1 = wf / n;
  return t;
}

double concordance_auc(std::span<const int> y, std::span<const double> s) {
  std::size_t pos = 0, neg = 0, twice = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 1) {
      ++pos;
    } else {
      ++neg;
    }
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] == 1) continue;
      if (s[i] > s[j]) twice += 2;
      if (s[i] == s[j]) twice += 1;
    }
  }
  return static_cast<double>(twice) /
         (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double average_precision(std::span<const int> y, std::span<const double> s) {
  std::set<double, std::greater<>> thresholds(s.begin(), s.end());
  std::size_t positives = 0;
  for (int v : y) positives += v == 1 ? 1 : 0;
  double ap = 0.0;
  double prev_recall = 0.0;
  for (double t : thresholds) {
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (s[i] >= t) {
        if (y[i] == 1) {
          ++tp;
        } else {
          ++fp;
        }
      }
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    if (tp == positives) break;
  }
  return ap;
}

double gini(std::span<const double> counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  if (total == 0.0) return 0.0;
  double g = 1.0;
  for (double c : counts) g -= (c / total) * (c / total);
  return g;
}

std::vector<double> ranks(std::span<const double> v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double smaller = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) smaller += 1;
      if (v[j] == v[i]) equal += 1;
    }
    r[i] = 1.0 + smaller + (equal - 1.0) / 2.0;
  }
  return r;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

std::vector<double> central_gradient(const std::function<double(std::span<const double>)>& f,
                                     std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    const double step = h * std::max(1.0, std::abs(orig));
    x[i] = orig + step;
    const double up = f(x);
    x[i] = orig - step;
    const double down = f(x);
    x[i] = orig;
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

double max_relative_error(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({1e-6, std::abs(a[i]), std::abs(b[i])});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

}  // namespace oracle
