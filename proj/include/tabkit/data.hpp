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

#ifndef TABKIT_DATA_HPP_
#define TABKIT_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tabkit/error.hpp"
#include "tabkit/numkit.hpp"

namespace tabkit::data {

enum class ColumnKind { numeric, categorical };

const char* to_string(ColumnKind kind);
ColumnKind column_kind_from_string(const std::string& s);

struct Scaler {
  double mean = 0.0;
  double std = 1.0;  // always > 0
  bool operator==(const Scaler&) const = default;
};

struct ColumnMeta {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  /// code -> label; codes are contiguous 0..k-1. Empty for numeric columns.
  std::vector<std::string> categories;
  std::optional<Scaler> scaler;
  /// Fill value used by impute_missing, in encoded units.
  std::optional<double> imputed_value;
  /// Set by standardize/correlation_matrix for zero-variance columns.
  bool constant = false;

  /// Code of a category label, or -1.
  int code_of(const std::string& label) const;

  bool operator==(const ColumnMeta&) const = default;
};

/// Column-oriented table. Missing cells are NaN in X.
struct Dataset {
  std::vector<ColumnMeta> columns;
  Matrix X;
  std::optional<std::vector<int>> y;
  std::vector<std::string> class_names;
  std::string target_name;

  std::size_t n_rows() const { return X.rows(); }
  std::size_t n_features() const { return columns.size(); }
  bool has_target() const { return y.has_value(); }
  std::size_t n_classes() const { return class_names.size(); }
  const std::vector<int>& labels() const;

  /// Throws DataError naming the column when absent.
  std::size_t column_index(const std::string& name) const;
  std::vector<std::string> feature_names() const;
  bool has_missing() const;

  /// Equality that treats NaN cells as equal to each other.
  bool same_as(const Dataset& other) const;
};

/// Shared invariant checker; throws DataError describing the first violation.
void validate(const Dataset& ds);

/// Builds a Dataset from a numeric matrix and class codes.
Dataset make_dataset(Matrix X, std::optional<std::vector<int>> y,
                     std::vector<std::string> feature_names = {},
                     std::vector<std::string> class_names = {});

Dataset subset_rows(const Dataset& ds, std::span<const std::size_t> rows);

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

class CsvError : public DataError {
 public:
  enum class Reason { empty_file, empty_dataset, ragged_row, unknown_target, bad_target };
  CsvError(Reason reason, const std::string& what) : DataError(what), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

struct LoadOptions {
  std::optional<std::string> target;
  std::map<std::string, ColumnKind> kind_overrides;
  char delimiter = ',';
  /// Compared case-insensitively after trimming.
  std::vector<std::string> missing_markers{"", "NA", "NaN"};
};

/// Splits delimited text into records (header included). Handles
/// double-quote escaping and CRLF line ends.
std::vector<std::vector<std::string>> parse_delimited(const std::string& text,
                                                      char delimiter = ',');

/// Builds a Dataset from a header and string cells. Kinds are inferred
/// (every non-missing cell numeric -> numeric); categorical codes follow
/// first appearance. A numeric target is encoded in ascending value order,
/// any other target by first appearance.
Dataset dataset_from_cells(const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows,
                           const LoadOptions& options = {});

Dataset parse_csv(const std::string& text, const LoadOptions& options = {});
Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options = {});

std::string to_csv(const Dataset& ds);
void save_csv(const Dataset& ds, const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);
/// Strict full-string parse (surrounding spaces allowed).
std::optional<double> parse_number(std::string_view text);

/// {columns:[{name,kind,encoder,scaler,imputed}], class_names, target}
nlohmann::json metadata_to_json(const Dataset& ds);
std::vector<ColumnMeta> columns_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Preprocessing
// ---------------------------------------------------------------------------

struct ImputePolicy {
  enum class Kind { median, mode, constant };
  Kind kind = Kind::median;
  double value = 0.0;  // constant only

  static ImputePolicy with_median() { return {Kind::median, 0.0}; }
  static ImputePolicy with_mode() { return {Kind::mode, 0.0}; }
  static ImputePolicy with_constant(double v) { return {Kind::constant, v}; }
};

/// Fills every missing cell. Median applies to numeric columns; categorical
/// columns under a median policy fall back to the mode.
Dataset impute_missing(const Dataset& ds, ImputePolicy policy);

struct Standardized {
  Dataset train;
  std::vector<Dataset> others;
  std::vector<std::string> constant_columns;
};

/// z-scores numeric columns with the train mean and population std and
/// applies the same statistics to `others`. Zero-variance columns are left
/// unscaled and flagged.
Standardized standardize(const Dataset& train, const std::vector<Dataset>& others = {});

/// Re-encodes a freshly loaded dataset with stored column metadata (codes by
/// label, stored imputation values and scalers, stored class names).
Dataset apply_metadata(const Dataset& raw, const std::vector<ColumnMeta>& columns,
                       const std::vector<std::string>& class_names);

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

struct SplitSpec {
  double test_fraction = 0.25;
  bool stratified = false;
  std::uint64_t seed = 42;
};

struct IndexSplit {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

IndexSplit split_indices(std::size_t n, const std::vector<int>* y,
                         const std::vector<std::string>& class_names,
                         const SplitSpec& spec);

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, const SplitSpec& spec);

struct Fold {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> valid;  // ascending
};

/// Shuffled k-fold partition; the first n % k folds get one extra row.
std::vector<Fold> kfold_splits(std::size_t n, std::size_t k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Column helpers
// ---------------------------------------------------------------------------

Dataset select_columns(const Dataset& ds, const std::vector<std::string>& names);
Dataset drop_columns(const Dataset& ds, const std::vector<std::string>& names);

/// Keyless merge pairs rows positionally and needs equal row counts. A keyed
/// merge is an inner join on a column present in both, matched by cell text.
Dataset merge_columns(const Dataset& left, const Dataset& right,
                      const std::optional<std::string>& key = std::nullopt);

struct Correlation {
  Matrix r;
  std::vector<std::string> constant_columns;
};

/// Pearson correlation of every feature pair.
Correlation correlation_matrix(const Dataset& ds);

/// Text of one cell: category label, formatted number, or "" when missing.
std::string cell_text(const Dataset& ds, std::size_t row, std::size_t col);

}  // namespace tabkit::data

#endif  // TABKIT_DATA_HPP_
