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

#ifndef TABKIT_TOOLS_COMMON_HPP_
#define TABKIT_TOOLS_COMMON_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tabkit/data.hpp"
#include "tabkit/models.hpp"
#include "tabkit/parallel.hpp"

namespace tabkit::cli {

using nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportFormatVersion = 1;
inline constexpr int kBundleFormatVersion = 1;

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

/// Options every subcommand shares.
struct CommonOptions {
  std::string config_path;
  std::uint64_t seed = 42;
  int threads = 0;
  bool serial = false;
  std::string out_dir;
};

struct RunContext {
  std::string command;
  CLI::App* app = nullptr;
  const CommonOptions* common = nullptr;
  Streams* io = nullptr;
  json config_echo;

  Exec exec() const { return common->serial ? Exec::serial : Exec::parallel; }
  std::uint64_t seed() const { return common->seed; }
  /// Output directory, created on first use. UsageError when --out is absent.
  std::filesystem::path out() const;
};

using Handler = std::function<void(RunContext&)>;

struct CommandSpec {
  CLI::App* app = nullptr;
  Handler handler;
  std::vector<std::string> required;  // long option names checked after config merge
  bool uses_out = true;
};

class Registry {
 public:
  explicit Registry(CLI::App& root) : root_(root) {}

  /// Creates the subcommand with the shared options attached.
  CLI::App* add(const std::string& name, const std::string& description, bool with_seed = true,
                bool with_out = true);
  CommandSpec& spec(CLI::App* app);
  const std::vector<CommandSpec>& commands() const { return commands_; }
  CommonOptions& common() { return common_; }

  /// Option storage that lives as long as the registry.
  template <typename T>
  T& make() {
    auto p = std::make_shared<T>();
    storage_.push_back(p);
    return *p;
  }

 private:
  CLI::App& root_;
  CommonOptions common_;
  std::vector<std::shared_ptr<void>> storage_;
  std::vector<CommandSpec> commands_;
};

void register_data_commands(Registry& reg);
void register_model_commands(Registry& reg);
void register_xai_commands(Registry& reg);
void register_synth_commands(Registry& reg);
void register_llm_commands(Registry& reg);

// ---------------------------------------------------------------------------
// Config merging
// ---------------------------------------------------------------------------

/// Fills options absent from the command line with values from a JSON
/// object keyed by long option name. Unknown keys are a UsageError.
void merge_config(CLI::App& app, const json& config);

/// Every option of app with its effective value, as strings.
json echo_options(const CLI::App& app);

// ---------------------------------------------------------------------------
// Files and reports
// ---------------------------------------------------------------------------

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
json read_json(const std::filesystem::path& path);
/// Two-space indented JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const json& j);
json parse_json_arg(const std::string& text, const std::string& what);

/// {tool_version, format_version, command, seed, config_echo}
json report_header(const RunContext& ctx);

std::vector<std::string> split_list(const std::string& text);

/// Column names of a delimited file's header row.
std::vector<std::string> csv_header(const std::filesystem::path& path);

/// Loads a CSV, using `target` as the class column when non-empty.
data::Dataset load_dataset(const std::string& path, const std::string& target);
data::Dataset require_target(data::Dataset ds, const std::string& what);

// ---------------------------------------------------------------------------
// Model bundles
// ---------------------------------------------------------------------------

/// {format_version, kind: "tabkit-model-bundle", model, metadata}. The
/// metadata re-encodes raw CSV rows the same way as the training data.
json make_bundle(const models::Classifier& model, const data::Dataset& encoded);

struct LoadedModel {
  models::ClassifierPtr model;
  json model_json;
  std::optional<json> metadata;
};

/// Accepts a bundle or a bare model JSON.
LoadedModel load_model(const std::string& path);

/// Reads a CSV for the model: stored metadata when present, else the file's
/// own encoding. The target is loaded when the file has that column.
data::Dataset load_for_model(const LoadedModel& lm, const std::string& path,
                             const std::string& target_override);

/// Optional preprocessing metadata (from `prep`) applied to a raw dataset.
data::Dataset apply_prep_metadata(const data::Dataset& raw, const std::string& metadata_path);

std::vector<double> column_std(const Matrix& X);

}  // namespace tabkit::cli

#endif  // TABKIT_TOOLS_COMMON_HPP_
