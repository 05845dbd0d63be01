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

#include "tabkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "tabkit/data.hpp"

namespace tabkit::metrics {

using nlohmann::json;

namespace {

void check_pair(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw DataError("label vectors differ in length: " + std::to_string(y_true.size()) + " vs " +
                    std::to_string(y_pred.size()));
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

Confusion confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                           std::size_t n_classes) {
  check_pair(y_true, y_pred);
  Confusion m(n_classes, std::vector<std::size_t>(n_classes, 0));
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if (t < 0 || p < 0 || static_cast<std::size_t>(t) >= n_classes ||
        static_cast<std::size_t>(p) >= n_classes) {
      throw DataError("class code out of range at position " + std::to_string(i));
    }
    ++m[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
  }
  return m;
}

double accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
  check_pair(y_true, y_pred);
  if (y_true.empty()) throw DataError("accuracy of an empty label vector");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hits += y_true[i] == y_pred[i];
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

ClassificationReport classification_report(std::span<const int> y_true,
                                           std::span<const int> y_pred,
                                           const std::vector<std::string>& class_names) {
  const std::size_t K = class_names.size();
  ClassificationReport rep;
  rep.confusion = confusion_matrix(y_true, y_pred, K);
  rep.total_support = y_true.size();
  if (rep.total_support == 0) throw DataError("classification report of an empty label vector");
  std::size_t trace = 0;
  for (std::size_t c = 0; c < K; ++c) {
    ClassScores s;
    s.class_name = class_names[c];
    const std::size_t tp = rep.confusion[c][c];
    std::size_t predicted = 0;
    std::size_t actual = 0;
    for (std::size_t o = 0; o < K; ++o) {
      predicted += rep.confusion[o][c];
      actual += rep.confusion[c][o];
    }
    trace += tp;
    s.support = actual;
    if (predicted == 0) {
      s.precision_undefined = true;
    } else {
      s.precision = static_cast<double>(tp) / static_cast<double>(predicted);
    }
    if (actual == 0) {
      s.recall_undefined = true;
    } else {
      s.recall = static_cast<double>(tp) / static_cast<double>(actual);
    }
    if (s.precision + s.recall == 0.0) {
      s.f1_undefined = true;
    } else {
      s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    }
    rep.per_class.push_back(s);
  }
  rep.accuracy = static_cast<double>(trace) / static_cast<double>(rep.total_support);
  Averages sum;
  Averages weighted_sum;
  for (const auto& s : rep.per_class) {
    const auto support = static_cast<double>(s.support);
    sum.precision += s.precision;
    sum.recall += s.recall;
    sum.f1 += s.f1;
    weighted_sum.precision += support * s.precision;
    weighted_sum.recall += support * s.recall;
    weighted_sum.f1 += support * s.f1;
  }
  const auto k = static_cast<double>(K);
  const auto total = static_cast<double>(rep.total_support);
  rep.macro_avg = {sum.precision / k, sum.recall / k, sum.f1 / k};
  rep.weighted_avg = {weighted_sum.precision / total, weighted_sum.recall / total,
                      weighted_sum.f1 / total};
  return rep;
}

double f1_macro(std::span<const int> y_true, std::span<const int> y_pred, std::size_t n_classes) {
  std::vector<std::string> names(n_classes);
  return classification_report(y_true, y_pred, names).macro_avg.f1;
}

std::string render_report(const ClassificationReport& report, int digits) {
  std::size_t name_width = std::string("weighted avg").size();
  for (const auto& s : report.per_class) name_width = std::max(name_width, s.class_name.size());
  const std::size_t col = 10;
  std::ostringstream out;
  out << pad_right("", name_width) << pad_left("Precision", col) << pad_left("Recall", col)
      << pad_left("F1-score", col) << pad_left("Support", col) << "\n\n";
  for (const auto& s : report.per_class) {
    out << pad_right(s.class_name, name_width) << pad_left(fixed(s.precision, digits), col)
        << pad_left(fixed(s.recall, digits), col) << pad_left(fixed(s.f1, digits), col)
        << pad_left(std::to_string(s.support), col) << "\n";
  }
  out << "\n";
  const std::string total = std::to_string(report.total_support);
  out << pad_right("Accuracy", name_width) << pad_left("", 2 * col)
      << pad_left(fixed(report.accuracy, digits), col) << pad_left(total, col) << "\n";
  auto avg_row = [&](const char* name, const Averages& a) {
    out << pad_right(name, name_width) << pad_left(fixed(a.precision, digits), col)
        << pad_left(fixed(a.recall, digits), col) << pad_left(fixed(a.f1, digits), col)
        << pad_left(total, col) << "\n";
  };
  avg_row("macro avg", report.macro_avg);
  avg_row("weighted avg", report.weighted_avg);
  return out.str();
}

json report_to_json(const ClassificationReport& report) {
  json per_class = json::array();
  for (const auto& s : report.per_class) {
    json flags = json::array();
    if (s.precision_undefined) flags.push_back("precision");
    if (s.recall_undefined) flags.push_back("recall");
    if (s.f1_undefined) flags.push_back("f1");
    per_class.push_back({{"class_name", s.class_name},
                         {"precision", s.precision},
                         {"recall", s.recall},
                         {"f1", s.f1},
                         {"support", s.support},
                         {"zero_division", flags}});
  }
  auto avg = [](const Averages& a) {
    return json{{"precision", a.precision}, {"recall", a.recall}, {"f1", a.f1}};
  };
  return {{"per_class", per_class},
          {"accuracy", report.accuracy},
          {"macro_avg", avg(report.macro_avg)},
          {"weighted_avg", avg(report.weighted_avg)},
          {"total_support", report.total_support},
          {"confusion_matrix", report.confusion}};
}

// --- curves ----------------------------------------------------------------

const char* to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::roc: return "roc";
    case CurveKind::pr: return "pr";
    case CurveKind::learning: return "learning";
  }
  return "?";
}

namespace {

struct Sweep {
  // Cumulative true/false positives after each group of equal scores,
  // thresholds descending.
  std::vector<double> thresholds;
  std::vector<std::size_t> tp;
  std::vector<std::size_t> fp;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

Sweep sweep(std::span<const int> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) throw DataError("labels and scores differ in length");
  Sweep s;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] != 0 && y_true[i] != 1) throw DataError("curve labels must be 0 or 1");
    if (!std::isfinite(scores[i])) throw DataError("curve scores must be finite");
    (y_true[i] == 1 ? s.positives : s.negatives) += 1;
  }
  if (s.positives == 0 || s.negatives == 0) {
    throw DataError("curve needs both classes present in y_true");
  }
  std::vector<std::size_t> order(y_true.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (y_true[order[i]] == 1 ? tp : fp) += 1;
    if (i + 1 == order.size() || scores[order[i + 1]] != scores[order[i]]) {
      s.thresholds.push_back(scores[order[i]]);
      s.tp.push_back(tp);
      s.fp.push_back(fp);
    }
  }
  return s;
}

}  // namespace

CurveData roc_curve(std::span<const int> y_true, std::span<const double> scores) {
  const Sweep s = sweep(y_true, scores);
  CurveData c;
  c.kind = CurveKind::roc;
  c.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  const auto P = static_cast<double>(s.positives);
  const auto N = static_cast<double>(s.negatives);
  for (std::size_t i = 0; i < s.thresholds.size(); ++i) {
    c.points.push_back({static_cast<double>(s.fp[i]) / N, static_cast<double>(s.tp[i]) / P,
                        s.thresholds[i]});
  }
  // Trapezoids in integer counts, divided once by 2PN.
  std::uint64_t twice_area = 0;
  std::uint64_t prev_tp = 0;
  std::uint64_t prev_fp = 0;
  for (std::size_t i = 0; i < s.thresholds.size(); ++i) {
    twice_area += (s.fp[i] - prev_fp) * (s.tp[i] + prev_tp);
    prev_tp = s.tp[i];
    prev_fp = s.fp[i];
  }
  c.auc = static_cast<double>(twice_area) / (2.0 * P * N);
  return c;
}

CurveData pr_curve(std::span<const int> y_true, std::span<const double> scores) {
  const Sweep s = sweep(y_true, scores);
  CurveData c;
  c.kind = CurveKind::pr;
  const auto P = static_cast<double>(s.positives);
  std::vector<CurvePoint> descending;
  for (std::size_t i = 0; i < s.thresholds.size(); ++i) {
    const double recall = static_cast<double>(s.tp[i]) / P;
    const double precision =
        static_cast<double>(s.tp[i]) / static_cast<double>(s.tp[i] + s.fp[i]);
    descending.push_back({recall, precision, s.thresholds[i]});
    if (s.tp[i] == s.positives) break;
  }
  double ap = 0.0;
  double previous_recall = 0.0;
  for (const auto& p : descending) {
    ap += (p.x - previous_recall) * p.y;
    previous_recall = p.x;
  }
  c.points.assign(descending.rbegin(), descending.rend());
  c.auc = ap;
  return c;
}

namespace {

template <class Fn>
std::vector<CurveData> one_vs_rest(std::span<const int> y_true, const Matrix& scores, Fn fn) {
  if (scores.rows() != y_true.size()) throw DataError("labels and scores differ in length");
  std::vector<CurveData> out;
  for (std::size_t c = 0; c < scores.cols(); ++c) {
    std::vector<int> binary(y_true.size());
    for (std::size_t i = 0; i < y_true.size(); ++i) binary[i] = y_true[i] == static_cast<int>(c);
    CurveData curve = fn(binary, scores.column(c));
    curve.label = std::to_string(c);
    out.push_back(std::move(curve));
  }
  return out;
}

}  // namespace

std::vector<CurveData> roc_one_vs_rest(std::span<const int> y_true, const Matrix& scores) {
  return one_vs_rest(y_true, scores, [](const std::vector<int>& y, const std::vector<double>& s) {
    return roc_curve(y, s);
  });
}

std::vector<CurveData> pr_one_vs_rest(std::span<const int> y_true, const Matrix& scores) {
  return one_vs_rest(y_true, scores, [](const std::vector<int>& y, const std::vector<double>& s) {
    return pr_curve(y, s);
  });
}

std::string curve_to_csv(const CurveData& curve) {
  std::string out = "x,y,annotation\n";
  for (const auto& p : curve.points) {
    out += data::format_number(p.x) + "," + data::format_number(p.y) + "," +
           (std::isinf(p.annotation) ? std::string("inf") : data::format_number(p.annotation)) +
           "\n";
  }
  return out;
}

json curve_to_json(const CurveData& curve) {
  json points = json::array();
  for (const auto& p : curve.points) {
    points.push_back({{"x", p.x},
                      {"y", p.y},
                      {"annotation", std::isinf(p.annotation) ? json("inf") : json(p.annotation)}});
  }
  json j = {{"kind", to_string(curve.kind)}, {"label", curve.label}, {"points", points}};
  j["auc"] = curve.auc ? json(*curve.auc) : json(nullptr);
  return j;
}

LearningCurve learning_curve(const models::ModelSpec& spec, const Matrix& X,
                             std::span<const int> y, std::size_t n_classes,
                             std::span<const std::size_t> train_sizes, std::size_t cv_k,
                             std::uint64_t seed, Exec exec) {
  if (X.rows() != y.size()) throw DataError("learning_curve: X and y lengths differ");
  if (train_sizes.empty()) throw UsageError("learning_curve: no training sizes given");
  const auto folds = data::kfold_splits(X.rows(), cv_k, seed);
  std::size_t capacity = X.rows();
  for (const auto& f : folds) capacity = std::min(capacity, f.train.size());
  for (std::size_t size : train_sizes) {
    if (size == 0 || size > capacity) {
      throw UsageError("learning_curve: training size " + std::to_string(size) +
                       " exceeds the fold capacity " + std::to_string(capacity));
    }
  }
  const std::size_t units = train_sizes.size() * folds.size();
  std::vector<double> train_acc(units);
  std::vector<double> valid_acc(units);
  const Rng root(seed);
  parallel_for(units, exec, [&](std::size_t u) {
    const std::size_t s = u / folds.size();
    const auto& fold = folds[u % folds.size()];
    std::vector<std::size_t> rows = fold.train;
    if (train_sizes[s] < rows.size()) {
      Rng rng = root.split(u);
      rng.shuffle(std::span<std::size_t>(rows));
      rows.resize(train_sizes[s]);
      std::sort(rows.begin(), rows.end());
    }
    const Matrix Xt = X.select_rows(rows);
    std::vector<int> yt;
    for (std::size_t r : rows) yt.push_back(y[r]);
    const Matrix Xv = X.select_rows(fold.valid);
    std::vector<int> yv;
    for (std::size_t r : fold.valid) yv.push_back(y[r]);
    const auto model = models::fit(spec, Xt, yt, n_classes, Exec::serial);
    train_acc[u] = accuracy(yt, model->predict(Xt));
    valid_acc[u] = accuracy(yv, model->predict(Xv));
  });
  LearningCurve lc;
  lc.train.kind = lc.valid.kind = CurveKind::learning;
  lc.train.label = "train";
  lc.valid.label = "validation";
  for (std::size_t s = 0; s < train_sizes.size(); ++s) {
    double t = 0.0;
    double v = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      t += train_acc[s * folds.size() + f];
      v += valid_acc[s * folds.size() + f];
    }
    const auto x = static_cast<double>(train_sizes[s]);
    const auto nf = static_cast<double>(folds.size());
    lc.train.points.push_back({x, t / nf, x});
    lc.valid.points.push_back({x, v / nf, x});
  }
  return lc;
}

// --- SVG -------------------------------------------------------------------

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;

std::string svg_open(const std::string& title) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << xml_escape(title) << "</text>\n"
      << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin
      << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  return out.str();
}

const char* palette(std::size_t i) {
  static const char* colours[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return colours[i % 8];
}

}  // namespace

std::string svg_bars(const std::string& title, const std::vector<std::string>& labels,
                     std::span<const double> values) {
  if (labels.size() != values.size()) throw UsageError("svg_bars: label and value counts differ");
  std::ostringstream out;
  out << svg_open(title);
  double hi = 0.0;
  double lo = 0.0;
  for (double v : values) {
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  const double span = hi - lo > 0 ? hi - lo : 1.0;
  const double plot_h = kHeight - 2 * kMargin;
  const double zero_y = kMargin + plot_h * hi / span;
  const double slot = (kWidth - 2 * kMargin) / static_cast<double>(std::max<std::size_t>(1, values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double h = plot_h * std::abs(values[i]) / span;
    const double x = kMargin + slot * static_cast<double>(i) + slot * 0.1;
    const double y = values[i] >= 0 ? zero_y - h : zero_y;
    out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << slot * 0.8 << "\" height=\"" << h
        << "\" fill=\"" << palette(0) << "\"/>\n"
        << "<text x=\"" << x + slot * 0.4 << "\" y=\"" << kHeight - kMargin + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << xml_escape(labels[i]) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_lines(const std::string& title, const std::vector<CurveData>& curves) {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  if (!std::isfinite(xmin)) xmin = ymin = 0.0, xmax = ymax = 1.0;
  const double xs = xmax > xmin ? xmax - xmin : 1.0;
  const double ys = ymax > ymin ? ymax - ymin : 1.0;
  std::ostringstream out;
  out << svg_open(title);
  for (std::size_t i = 0; i < curves.size(); ++i) {
    out << "<polyline fill=\"none\" stroke=\"" << palette(i) << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : curves[i].points) {
      const double x = kMargin + (kWidth - 2 * kMargin) * (p.x - xmin) / xs;
      const double y = kHeight - kMargin - (kHeight - 2 * kMargin) * (p.y - ymin) / ys;
      out << x << "," << y << " ";
    }
    out << "\"/>\n"
        << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kMargin + 14.0 * static_cast<double>(i)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
        << palette(i) << "\">" << xml_escape(curves[i].label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace tabkit::metrics
