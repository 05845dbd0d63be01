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
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tabkit/data.hpp"

namespace tabkit::data {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_missing(const std::string& cell, const std::vector<std::string>& markers) {
  const std::string t = lower(trim(cell));
  return std::any_of(markers.begin(), markers.end(),
                     [&](const std::string& m) { return lower(trim(m)) == t; });
}

bool nan_equal(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

}  // namespace

const char* to_string(ColumnKind kind) {
  return kind == ColumnKind::numeric ? "numeric" : "categorical";
}

ColumnKind column_kind_from_string(const std::string& s) {
  if (s == "numeric") return ColumnKind::numeric;
  if (s == "categorical") return ColumnKind::categorical;
  throw DataError("unknown column kind '" + s + "'");
}

int ColumnMeta::code_of(const std::string& label) const {
  const auto it = std::find(categories.begin(), categories.end(), label);
  return it == categories.end() ? -1 : static_cast<int>(it - categories.begin());
}

const std::vector<int>& Dataset::labels() const {
  if (!y) throw DataError("dataset has no target column");
  return *y;
}

std::size_t Dataset::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].name == name) return j;
  }
  throw DataError("unknown column '" + name + "'");
}

std::vector<std::string> Dataset::feature_names() const {
  std::vector<std::string> names;
  names.reserve(columns.size());
  for (const auto& c : columns) names.push_back(c.name);
  return names;
}

bool Dataset::has_missing() const {
  const auto d = X.data();
  return std::any_of(d.begin(), d.end(), [](double v) { return std::isnan(v); });
}

bool Dataset::same_as(const Dataset& other) const {
  if (columns != other.columns || y != other.y || class_names != other.class_names ||
      target_name != other.target_name || X.rows() != other.X.rows() ||
      X.cols() != other.X.cols()) {
    return false;
  }
  const auto a = X.data();
  const auto b = other.X.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!nan_equal(a[i], b[i])) return false;
  }
  return true;
}

void validate(const Dataset& ds) {
  if (ds.X.cols() != ds.columns.size()) {
    throw DataError("dataset: matrix has " + std::to_string(ds.X.cols()) +
                    " columns but metadata lists " + std::to_string(ds.columns.size()));
  }
  if (ds.y && ds.y->size() != ds.X.rows()) {
    throw DataError("dataset: target length does not match row count");
  }
  if (ds.y) {
    const int k = static_cast<int>(ds.class_names.size());
    for (int code : *ds.y) {
      if (code < 0 || code >= k) {
        throw DataError("dataset: class code " + std::to_string(code) + " out of range");
      }
    }
  }
  for (std::size_t j = 0; j < ds.columns.size(); ++j) {
    const auto& c = ds.columns[j];
    if (c.kind == ColumnKind::numeric && !c.categories.empty()) {
      throw DataError("column '" + c.name + "': numeric column carries an encoder");
    }
    if (c.scaler && !(c.scaler->std > 0.0)) {
      throw DataError("column '" + c.name + "': scaler std must be positive");
    }
    if (c.kind == ColumnKind::categorical && !c.scaler) {
      const double k = static_cast<double>(c.categories.size());
      for (std::size_t r = 0; r < ds.X.rows(); ++r) {
        const double v = ds.X(r, j);
        if (std::isnan(v)) continue;
        if (v < 0 || v >= k || v != std::floor(v)) {
          throw DataError("column '" + c.name + "': code outside encoder range");
        }
      }
    }
  }
}

Dataset make_dataset(Matrix X, std::optional<std::vector<int>> y,
                     std::vector<std::string> feature_names,
                     std::vector<std::string> class_names) {
  Dataset ds;
  if (feature_names.empty()) {
    for (std::size_t j = 0; j < X.cols(); ++j) feature_names.push_back("f" + std::to_string(j));
  }
  if (feature_names.size() != X.cols()) throw DataError("make_dataset: name count mismatch");
  for (auto& name : feature_names) {
    ColumnMeta meta;
    meta.name = std::move(name);
    ds.columns.push_back(std::move(meta));
  }
  if (y && class_names.empty()) {
    int k = 0;
    for (int code : *y) k = std::max(k, code + 1);
    for (int c = 0; c < k; ++c) class_names.push_back(std::to_string(c));
  }
  ds.X = std::move(X);
  ds.y = std::move(y);
  ds.class_names = std::move(class_names);
  if (ds.y) ds.target_name = "target";
  validate(ds);
  return ds;
}

Dataset subset_rows(const Dataset& ds, std::span<const std::size_t> rows) {
  Dataset out;
  out.columns = ds.columns;
  out.X = ds.X.select_rows(rows);
  if (ds.y) {
    std::vector<int> y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) y[i] = (*ds.y)[rows[i]];
    out.y = std::move(y);
  }
  out.class_names = ds.class_names;
  out.target_name = ds.target_name;
  return out;
}

std::vector<std::vector<std::string>> parse_delimited(const std::string& text,
                                                      char delimiter) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string cell;
  bool in_quotes = false;
  bool any_content = false;
  auto end_record = [&] {
    record.push_back(std::move(cell));
    cell.clear();
    const bool blank = record.size() == 1 && record[0].empty() && !any_content;
    if (!blank) records.push_back(std::move(record));
    record.clear();
    any_content = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cell.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      any_content = true;
    } else if (c == delimiter) {
      record.push_back(std::move(cell));
      cell.clear();
      any_content = true;
    } else if (c == '\n') {
      end_record();
    } else if (c == '\r') {
      // CRLF: the '\n' ends the record.
    } else {
      cell.push_back(c);
      any_content = true;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field");
  if (!cell.empty() || !record.empty() || any_content) end_record();
  return records;
}

std::optional<double> parse_number(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw DataError("format_number: conversion failed");
  return std::string(buf, ptr);
}

Dataset dataset_from_cells(const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows,
                           const LoadOptions& options) {
  if (header.empty()) throw CsvError(CsvError::Reason::empty_file, "empty file");
  if (rows.empty()) throw CsvError(CsvError::Reason::empty_dataset, "empty dataset");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw CsvError(CsvError::Reason::ragged_row,
                     "ragged row " + std::to_string(r + 1) + ": expected " +
                         std::to_string(header.size()) + " fields, found " +
                         std::to_string(rows[r].size()));
    }
  }
  std::vector<std::string> names;
  for (const auto& h : header) names.push_back(trim(h));

  std::optional<std::size_t> target_col;
  if (options.target) {
    const auto it = std::find(names.begin(), names.end(), *options.target);
    if (it == names.end()) {
      throw CsvError(CsvError::Reason::unknown_target,
                     "unknown target column '" + *options.target + "'");
    }
    target_col = static_cast<std::size_t>(it - names.begin());
  }

  const std::size_t n = rows.size();
  Dataset ds;
  std::vector<std::size_t> feature_cols;
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (target_col && *target_col == j) continue;
    feature_cols.push_back(j);
  }
  ds.X = Matrix(n, feature_cols.size());
  for (std::size_t f = 0; f < feature_cols.size(); ++f) {
    const std::size_t j = feature_cols[f];
    ColumnMeta meta;
    meta.name = names[j];
    bool all_numeric = true;
    for (std::size_t r = 0; r < n && all_numeric; ++r) {
      if (is_missing(rows[r][j], options.missing_markers)) continue;
      all_numeric = parse_number(rows[r][j]).has_value();
    }
    meta.kind = all_numeric ? ColumnKind::numeric : ColumnKind::categorical;
    if (const auto it = options.kind_overrides.find(meta.name); it != options.kind_overrides.end()) {
      meta.kind = it->second;
    }
    for (std::size_t r = 0; r < n; ++r) {
      const std::string& cell = rows[r][j];
      double v = std::numeric_limits<double>::quiet_NaN();
      if (!is_missing(cell, options.missing_markers)) {
        if (meta.kind == ColumnKind::numeric) {
          const auto parsed = parse_number(cell);
          if (!parsed) {
            throw DataError("column '" + meta.name + "': '" + cell + "' is not numeric");
          }
          v = *parsed;
        } else {
          const std::string label = trim(cell);
          int code = meta.code_of(label);
          if (code < 0) {
            code = static_cast<int>(meta.categories.size());
            meta.categories.push_back(label);
          }
          v = code;
        }
      }
      ds.X(r, f) = v;
    }
    ds.columns.push_back(std::move(meta));
  }

  if (target_col) {
    const std::size_t j = *target_col;
    ds.target_name = names[j];
    std::vector<std::string> labels(n);
    bool numeric = true;
    for (std::size_t r = 0; r < n; ++r) {
      labels[r] = trim(rows[r][j]);
      if (is_missing(labels[r], options.missing_markers)) {
        throw CsvError(CsvError::Reason::bad_target,
                       "missing target value in row " + std::to_string(r + 1));
      }
      numeric = numeric && parse_number(labels[r]).has_value();
    }
    std::vector<std::string> classes;
    for (const auto& l : labels) {
      if (std::find(classes.begin(), classes.end(), l) == classes.end()) classes.push_back(l);
    }
    if (numeric) {
      std::stable_sort(classes.begin(), classes.end(), [](const auto& a, const auto& b) {
        return *parse_number(a) < *parse_number(b);
      });
    }
    std::vector<int> y(n);
    for (std::size_t r = 0; r < n; ++r) {
      y[r] = static_cast<int>(std::find(classes.begin(), classes.end(), labels[r]) -
                              classes.begin());
    }
    ds.y = std::move(y);
    ds.class_names = std::move(classes);
  }
  validate(ds);
  return ds;
}

Dataset parse_csv(const std::string& text, const LoadOptions& options) {
  auto records = parse_delimited(text, options.delimiter);
  if (records.empty()) throw CsvError(CsvError::Reason::empty_file, "empty file");
  std::vector<std::string> header = std::move(records.front());
  records.erase(records.begin());
  return dataset_from_cells(header, records, options);
}

Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), options);
}

std::string cell_text(const Dataset& ds, std::size_t row, std::size_t col) {
  const double v = ds.X(row, col);
  if (std::isnan(v)) return "";
  const auto& meta = ds.columns[col];
  if (meta.kind == ColumnKind::categorical && !meta.scaler) {
    const auto code = static_cast<std::size_t>(v);
    if (v >= 0 && code < meta.categories.size() && v == std::floor(v)) {
      return meta.categories[code];
    }
  }
  return format_number(v);
}

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const Dataset& ds) {
  std::string out;
  std::vector<std::string> header = ds.feature_names();
  if (ds.y) header.push_back(ds.target_name.empty() ? "target" : ds.target_name);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out += ',';
    out += quote_if_needed(header[j]);
  }
  out += '\n';
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
      if (j) out += ',';
      out += quote_if_needed(cell_text(ds, r, j));
    }
    if (ds.y) {
      if (ds.n_features()) out += ',';
      out += quote_if_needed(ds.class_names.at(static_cast<std::size_t>((*ds.y)[r])));
    }
    out += '\n';
  }
  return out;
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << to_csv(ds);
}

nlohmann::json metadata_to_json(const Dataset& ds) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : ds.columns) {
    nlohmann::json j;
    j["name"] = c.name;
    j["kind"] = to_string(c.kind);
    if (c.kind == ColumnKind::categorical) {
      nlohmann::json enc = nlohmann::json::object();
      for (std::size_t k = 0; k < c.categories.size(); ++k) enc[c.categories[k]] = k;
      j["encoder"] = enc;
      j["categories"] = c.categories;
    } else {
      j["encoder"] = nullptr;
    }
    if (c.scaler) {
      j["scaler"] = {{"mean", c.scaler->mean}, {"std", c.scaler->std}};
    } else {
      j["scaler"] = nullptr;
    }
    j["imputed"] = c.imputed_value ? nlohmann::json(*c.imputed_value) : nlohmann::json(nullptr);
    j["constant"] = c.constant;
    cols.push_back(std::move(j));
  }
  return {{"columns", cols},
          {"class_names", ds.class_names},
          {"target", ds.y ? nlohmann::json(ds.target_name) : nlohmann::json(nullptr)}};
}

std::vector<ColumnMeta> columns_from_json(const nlohmann::json& j) {
  std::vector<ColumnMeta> out;
  for (const auto& c : j.at("columns")) {
    ColumnMeta meta;
    meta.name = c.at("name").get<std::string>();
    meta.kind = column_kind_from_string(c.at("kind").get<std::string>());
    if (c.contains("categories")) meta.categories = c.at("categories").get<std::vector<std::string>>();
    if (c.contains("scaler") && !c.at("scaler").is_null()) {
      meta.scaler = Scaler{c.at("scaler").at("mean").get<double>(), c.at("scaler").at("std").get<double>()};
    }
    if (c.contains("imputed") && !c.at("imputed").is_null()) {
      meta.imputed_value = c.at("imputed").get<double>();
    }
    meta.constant = c.value("constant", false);
    out.push_back(std::move(meta));
  }
  return out;
}

}  // namespace tabkit::data
