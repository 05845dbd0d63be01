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

// Independent reference computations. None of these call into the library's
// implementation of the quantity they check.

#ifndef TABKIT_TESTS_ORACLES_HPP_
#define TABKIT_TESTS_ORACLES_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace oracle {

/// Supremum ECDF gap evaluated by counting at every pooled sample point.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Kolmogorov survival function summed term by term.
double kolmogorov_q(double lambda, int terms = 200);

struct ClassTally {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  bool precision_undefined = false;
  bool recall_undefined = false;
};

struct Tally {
  std::vector<ClassTally> per_class;
  std::vector<std::vector<std::size_t>> confusion;
  double accuracy = 0.0;
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
  double weighted_precision = 0.0, weighted_recall = 0.0, weighted_f1 = 0.0;
};

/// Per-sample tallies of true and false positives and negatives.
Tally tally_report(std::span<const int> y_true, std::span<const int> y_pred, std::size_t K);

/// (2 * concordant + ties) / (2 * positives * negatives) over all pairs.
double concordance_auc(std::span<const int> y, std::span<const double> s);

/// Sum over distinct thresholds of (recall gain) * precision, counting
/// positives at each threshold from scratch.
double average_precision(std::span<const int> y, std::span<const double> s);

/// Gini impurity 1 - sum p_k^2.
double gini(std::span<const double> counts);

/// Ranks by pairwise counting: 1 + #smaller + (#equal - 1) / 2.
std::vector<double> ranks(std::span<const double> v);
double pearson(std::span<const double> a, std::span<const double> b);

/// Central differences with step h scaled to the coordinate magnitude.
std::vector<double> central_gradient(const std::function<double(std::span<const double>)>& f,
                                     std::vector<double> x, double h = 1e-6);

/// Largest |a - b| / max(1e-6, |a|, |b|).
double max_relative_error(std::span<const double> a, std::span<const double> b);

}  // namespace oracle

#endif  // TABKIT_TESTS_ORACLES_HPP_
