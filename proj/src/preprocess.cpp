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
#include <map>
#include <numeric>
#include <set>

#include "tabkit/data.hpp"

namespace tabkit::data {

namespace {

std::vector<double> present_values(const Matrix& X, std::size_t col) {
  std::vector<double> v;
  v.reserve(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    if (!std::isnan(X(r, col))) v.push_back(X(r, col));
  }
  return v;
}

/// Most frequent value; ties go to the smallest value.
double mode_of(const std::vector<double>& values) {
  std::map<double, std::size_t> counts;
  for (double v : values) ++counts[v];
  double best = counts.begin()->first;
  std::size_t best_count = 0;
  for (const auto& [v, c] : counts) {
    if (c > best_count) {
      best = v;
      best_count = c;
    }
  }
  return best;
}

}  // namespace

Dataset impute_missing(const Dataset& ds, ImputePolicy policy) {
  Dataset out = ds;
  for (std::size_t j = 0; j < out.n_features(); ++j) {
    auto& meta = out.columns[j];
    const auto values = present_values(out.X, j);
    if (values.size() == out.n_rows()) continue;
    double fill = policy.value;
    if (policy.kind != ImputePolicy::Kind::constant) {
      if (values.empty()) {
        throw DataError("column '" + meta.name + "' is entirely missing; cannot impute");
      }
      const bool use_median =
          policy.kind == ImputePolicy::Kind::median && meta.kind == ColumnKind::numeric;
      fill = use_median ? median(values) : mode_of(values);
    } else if (meta.kind == ColumnKind::categorical) {
      const double k = static_cast<double>(meta.categories.size());
      if (fill < 0 || fill >= k || fill != std::floor(fill)) {
        throw DataError("column '" + meta.name + "': constant fill is not a valid category code");
      }
    }
    for (std::size_t r = 0; r < out.n_rows(); ++r) {
      if (std::isnan(out.X(r, j))) out.X(r, j) = fill;
    }
    meta.imputed_value = fill;
  }
  validate(out);
  return out;
}

Standardized standardize(const Dataset& train, const std::vector<Dataset>& others) {
  if (train.n_rows() == 0) throw DataError("standardize: empty training set");
  Standardized result{train, others, {}};
  for (const auto& o : others) {
    if (o.n_features() != train.n_features()) {
      throw DataError("standardize: column count mismatch between datasets");
    }
  }
  for (std::size_t j = 0; j < train.n_features(); ++j) {
    if (train.columns[j].kind != ColumnKind::numeric) continue;
    const auto values = present_values(train.X, j);
    if (values.empty()) continue;
    const double m = mean(values);
    const double s = population_std(values);
    auto& meta = result.train.columns[j];
    if (s == 0.0) {
      meta.constant = true;
      for (auto& o : result.others) o.columns[j].constant = true;
      result.constant_columns.push_back(meta.name);
      continue;
    }
    // Compose with an earlier scaler so the metadata maps back to raw units.
    Scaler composed{m, s};
    if (meta.scaler) composed = {meta.scaler->mean + meta.scaler->std * m, meta.scaler->std * s};
    auto apply = [&](Dataset& d) {
      for (std::size_t r = 0; r < d.n_rows(); ++r) {
        double& v = d.X(r, j);
        if (!std::isnan(v)) v = (v - m) / s;
      }
      d.columns[j].scaler = composed;
    };
    apply(result.train);
    for (auto& o : result.others) apply(o);
  }
  return result;
}

Dataset apply_metadata(const Dataset& raw, const std::vector<ColumnMeta>& columns,
                       const std::vector<std::string>& class_names) {
  Dataset out;
  out.X = Matrix(raw.n_rows(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const auto& meta = columns[j];
    const std::size_t src = raw.column_index(meta.name);
    const auto& raw_meta = raw.columns[src];
    for (std::size_t r = 0; r < raw.n_rows(); ++r) {
      double v = raw.X(r, src);
      if (!std::isnan(v) && meta.kind == ColumnKind::categorical) {
        const std::string label = raw_meta.kind == ColumnKind::categorical
                                      ? raw_meta.categories.at(static_cast<std::size_t>(v))
                                      : format_number(v);
        const int code = meta.code_of(label);
        if (code < 0) {
          throw DataError("column '" + meta.name + "': unseen category '" + label + "'");
        }
        v = code;
      } else if (!std::isnan(v) && raw_meta.kind == ColumnKind::categorical) {
        throw DataError("column '" + meta.name + "' is numeric in the model but not in the data");
      }
      if (std::isnan(v)) {
        if (!meta.imputed_value) {
          throw DataError("column '" + meta.name + "': missing value and no stored imputation");
        }
        v = *meta.imputed_value;
      }
      // Imputation values are raw units; scalers map raw units to model units.
      if (meta.scaler) v = (v - meta.scaler->mean) / meta.scaler->std;
      out.X(r, j) = v;
    }
    out.columns.push_back(meta);
  }
  out.class_names = class_names;
  if (raw.y) {
    std::vector<int> y(raw.n_rows());
    for (std::size_t r = 0; r < raw.n_rows(); ++r) {
      const std::string& label = raw.class_names.at(static_cast<std::size_t>((*raw.y)[r]));
      const auto it = std::find(class_names.begin(), class_names.end(), label);
      if (it == class_names.end()) throw DataError("unseen class label '" + label + "'");
      y[r] = static_cast<int>(it - class_names.begin());
    }
    out.y = std::move(y);
    out.target_name = raw.target_name;
  }
  validate(out);
  return out;
}

IndexSplit split_indices(std::size_t n, const std::vector<int>* y,
                         const std::vector<std::string>& class_names,
                         const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw DataError("test_fraction must lie in (0, 1)");
  }
  if (n < 2) throw DataError("need at least 2 rows to split");
  Rng rng(spec.seed);
  IndexSplit split;
  if (!spec.stratified) {
    const auto order = permutation(n, rng);
    auto n_test = static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(n)));
    n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
    split.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  } else {
    if (!y) throw DataError("stratified split needs a target column");
    int k = 0;
    for (int c : *y) k = std::max(k, c + 1);
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>((*y)[i])].push_back(i);
    for (int c = 0; c < k; ++c) {
      auto& m = members[static_cast<std::size_t>(c)];
      if (m.empty()) continue;
      if (m.size() == 1) {
        const std::string name = static_cast<std::size_t>(c) < class_names.size()
                                     ? class_names[static_cast<std::size_t>(c)]
                                     : std::to_string(c);
        throw DataError("stratified split: class '" + name + "' has only one member");
      }
      Rng class_rng = rng.split(static_cast<std::uint64_t>(c));
      class_rng.shuffle(std::span<std::size_t>(m));
      auto t = static_cast<std::size_t>(
          std::llround(spec.test_fraction * static_cast<double>(m.size())));
      t = std::clamp<std::size_t>(t, 1, m.size() - 1);
      split.test.insert(split.test.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(t));
      split.train.insert(split.train.end(), m.begin() + static_cast<std::ptrdiff_t>(t), m.end());
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, const SplitSpec& spec) {
  const auto split = split_indices(ds.n_rows(), ds.y ? &*ds.y : nullptr, ds.class_names, spec);
  return {subset_rows(ds, split.train), subset_rows(ds, split.test)};
}

std::vector<Fold> kfold_splits(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw DataError("k-fold needs k >= 2");
  if (k > n) {
    throw DataError("k-fold: k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
  }
  Rng rng(seed);
  const auto order = permutation(n, rng);
  std::vector<Fold> folds(k);
  std::size_t start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    std::vector<std::size_t> valid(order.begin() + static_cast<std::ptrdiff_t>(start),
                                   order.begin() + static_cast<std::ptrdiff_t>(start + size));
    std::sort(valid.begin(), valid.end());
    std::vector<bool> in_valid(n, false);
    for (auto i : valid) in_valid[i] = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_valid[i]) folds[f].train.push_back(i);
    }
    folds[f].valid = std::move(valid);
    start += size;
  }
  return folds;
}

Dataset select_columns(const Dataset& ds, const std::vector<std::string>& names) {
  std::vector<std::size_t> idx;
  for (const auto& name : names) idx.push_back(ds.column_index(name));
  Dataset out;
  for (auto j : idx) out.columns.push_back(ds.columns[j]);
  out.X = ds.X.select_cols(idx);
  out.y = ds.y;
  out.class_names = ds.class_names;
  out.target_name = ds.target_name;
  validate(out);
  return out;
}

Dataset drop_columns(const Dataset& ds, const std::vector<std::string>& names) {
  std::set<std::size_t> dropped;
  for (const auto& name : names) dropped.insert(ds.column_index(name));
  std::vector<std::string> keep;
  for (std::size_t j = 0; j < ds.n_features(); ++j) {
    if (!dropped.count(j)) keep.push_back(ds.columns[j].name);
  }
  return select_columns(ds, keep);
}

Dataset merge_columns(const Dataset& left, const Dataset& right,
                      const std::optional<std::string>& key) {
  std::vector<std::size_t> right_cols;
  std::optional<std::size_t> right_key;
  if (key) {
    left.column_index(*key);
    right_key = right.column_index(*key);
  }
  std::set<std::string> names;
  for (const auto& c : left.columns) names.insert(c.name);
  for (std::size_t j = 0; j < right.n_features(); ++j) {
    if (right_key && j == *right_key) continue;
    if (!names.insert(right.columns[j].name).second) {
      throw DataError("merge: duplicate column name '" + right.columns[j].name + "'");
    }
    right_cols.push_back(j);
  }

  std::vector<std::size_t> left_rows;
  std::vector<std::size_t> right_rows;
  if (!key) {
    if (left.n_rows() != right.n_rows()) {
      throw DataError("merge: keyless merge needs equal row counts (" +
                      std::to_string(left.n_rows()) + " vs " +
                      std::to_string(right.n_rows()) + ")");
    }
    left_rows.resize(left.n_rows());
    std::iota(left_rows.begin(), left_rows.end(), std::size_t{0});
    right_rows = left_rows;
  } else {
    const std::size_t lk = left.column_index(*key);
    std::multimap<std::string, std::size_t> index;
    for (std::size_t r = 0; r < right.n_rows(); ++r) index.emplace(cell_text(right, r, *right_key), r);
    for (std::size_t r = 0; r < left.n_rows(); ++r) {
      const auto [lo, hi] = index.equal_range(cell_text(left, r, lk));
      for (auto it = lo; it != hi; ++it) {
        left_rows.push_back(r);
        right_rows.push_back(it->second);
      }
    }
  }

  Dataset l = subset_rows(left, left_rows);
  Dataset r = subset_rows(right, right_rows);
  Dataset out;
  out.columns = l.columns;
  for (auto j : right_cols) out.columns.push_back(r.columns[j]);
  out.X = l.X.hconcat(r.X.select_cols(right_cols));
  const Dataset& target_src = l.y ? l : r;
  out.y = target_src.y;
  out.class_names = target_src.class_names;
  out.target_name = target_src.target_name;
  validate(out);
  return out;
}

Correlation correlation_matrix(const Dataset& ds) {
  const std::size_t n = ds.n_rows();
  const std::size_t d = ds.n_features();
  if (n < 2) throw DataError("correlation needs at least 2 rows");
  if (ds.has_missing()) throw DataError("correlation: impute missing values first");
  std::vector<double> means(d);
  std::vector<double> norms(d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto col = ds.X.column(j);
    means[j] = mean(col);
    double s = 0.0;
    for (double v : col) s += (v - means[j]) * (v - means[j]);
    norms[j] = std::sqrt(s);
  }
  Correlation out{Matrix(d, d), {}};
  for (std::size_t j = 0; j < d; ++j) {
    if (norms[j] == 0.0) out.constant_columns.push_back(ds.columns[j].name);
    out.r(j, j) = 1.0;
    for (std::size_t k = j + 1; k < d; ++k) {
      double value = 0.0;
      if (norms[j] > 0.0 && norms[k] > 0.0) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += (ds.X(r, j) - means[j]) * (ds.X(r, k) - means[k]);
        value = std::clamp(s / (norms[j] * norms[k]), -1.0, 1.0);
      }
      out.r(j, k) = value;
      out.r(k, j) = value;
    }
  }
  return out;
}

}  // namespace tabkit::data
