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

#include "tabkit/models.hpp"

namespace tabkit::metrics {

using Confusion = std::vector<std::vector<std::size_t>>;

/// Entry (i, j) counts samples of true class i predicted as j.
Confusion confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                           std::size_t n_classes);

double accuracy(std::span<const int> y_true, std::span<const int> y_pred);

struct ClassScores {
  std::string class_name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  /// Set when the rate had a zero denominator and was reported as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
};

struct Averages {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ClassificationReport {
  std::vector<ClassScores> per_class;
  double accuracy = 0.0;
  Averages macro_avg;
  Averages weighted_avg;
  std::size_t total_support = 0;
  Confusion confusion;
};

ClassificationReport classification_report(std::span<const int> y_true,
                                           std::span<const int> y_pred,
                                           const std::vector<std::string>& class_names);

/// Fixed-width table with Precision, Recall, F1-score and Support columns.
std::string render_report(const ClassificationReport& report, int digits = 2);
nlohmann::json report_to_json(const ClassificationReport& report);

double f1_macro(std::span<const int> y_true, std::span<const int> y_pred, std::size_t n_classes);

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

enum class CurveKind { roc, pr, learning };
const char* to_string(CurveKind kind);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
  /// Threshold for roc/pr, training size for learning curves.
  double annotation = 0.0;
};

struct CurveData {
  CurveKind kind = CurveKind::roc;
  std::string label;
  std::vector<CurvePoint> points;
  std::optional<double> auc;
};

/// y_true holds 0/1 with 1 the positive class. Points run from (0,0) to (1,1)
/// over unique thresholds in descending order; equal scores form one step.
CurveData roc_curve(std::span<const int> y_true, std::span<const double> scores);

/// Points are (recall, precision) in ascending threshold order, so recall is
/// nonincreasing. The sweep stops at the first threshold reaching full
/// recall. auc holds the average precision.
CurveData pr_curve(std::span<const int> y_true, std::span<const double> scores);

/// One curve per class, class c against the rest, scored by column c.
std::vector<CurveData> roc_one_vs_rest(std::span<const int> y_true, const Matrix& scores);
std::vector<CurveData> pr_one_vs_rest(std::span<const int> y_true, const Matrix& scores);

/// Columns x,y,annotation.
std::string curve_to_csv(const CurveData& curve);
nlohmann::json curve_to_json(const CurveData& curve);

struct LearningCurve {
  CurveData train;
  CurveData valid;
};

/// For every size and every fold of kfold_splits(n, cv_k, seed), fits on a
/// seeded subsample of the fold's training rows and averages accuracies over
/// folds. A size equal to the fold's training size uses the whole fold.
LearningCurve learning_curve(const models::ModelSpec& spec, const Matrix& X,
                             std::span<const int> y, std::size_t n_classes,
                             std::span<const std::size_t> train_sizes, std::size_t cv_k,
                             std::uint64_t seed, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// SVG rendering
// ---------------------------------------------------------------------------

std::string svg_bars(const std::string& title, const std::vector<std::string>& labels,
                     std::span<const double> values);
std::string svg_lines(const std::string& title, const std::vector<CurveData>& curves);

}  // namespace tabkit::metrics
