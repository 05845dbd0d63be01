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

#include "common.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tabkit/error.hpp"
#include "tabkit/numkit.hpp"

namespace tabkit::cli {

namespace fs = std::filesystem;

fs::path RunContext::out() const {
  if (common->out_dir.empty()) throw UsageError("--out is required for " + command);
  const fs::path dir(common->out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

CLI::App* Registry::add(const std::string& name, const std::string& description, bool with_seed,
                        bool with_out) {
  CLI::App* sub = root_.add_subcommand(name, description);
  sub->add_option("--config", common_.config_path,
                  "JSON object of option values; command-line flags take precedence");
  if (with_seed) sub->add_option("--seed", common_.seed, "Random seed");
  sub->add_option("--threads", common_.threads, "Worker threads (0: all cores)");
  sub->add_flag("--serial", common_.serial, "Run the serial reference kernels");
  if (with_out) sub->add_option("--out", common_.out_dir, "Output directory");
  CommandSpec spec;
  spec.app = sub;
  spec.uses_out = with_out;
  commands_.push_back(std::move(spec));
  return sub;
}

CommandSpec& Registry::spec(CLI::App* app) {
  for (auto& c : commands_) {
    if (c.app == app) return c;
  }
  throw std::logic_error("unregistered subcommand");
}

// ---------------------------------------------------------------------------
// Config merging
// ---------------------------------------------------------------------------

namespace {

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

const std::vector<std::string>& execution_only_options() {
  static const std::vector<std::string> names{"config", "threads", "serial", "out", "help"};
  return names;
}

}  // namespace

void merge_config(CLI::App& app, const json& config) {
  if (!config.is_object()) throw UsageError("--config file must hold a JSON object");
  for (const auto& [key, value] : config.items()) {
    if (key == "config") throw UsageError("--config files cannot nest another config");
    CLI::Option* opt = app.get_option_no_throw("--" + key);
    if (!opt) throw UsageError("unknown config key '" + key + "' for " + app.get_name());
    if (opt->count() > 0 || value.is_null()) continue;
    if (value.is_array()) {
      for (const auto& item : value) opt->add_result(scalar_text(item));
    } else {
      opt->add_result(scalar_text(value));
    }
    try {
      opt->run_callback();
    } catch (const CLI::ParseError& e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
  }
}

namespace {

json typed_value(const CLI::Option& opt, const std::string& text) {
  const std::string type = opt.get_type_name();
  if (type == "INT" || type == "UINT" || type == "FLOAT") {
    const json v = json::parse(text, nullptr, false);
    if (v.is_number()) return v;
  }
  return text;
}

}  // namespace

json echo_options(const CLI::App& app) {
  json echo = json::object();
  const auto& skip = execution_only_options();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || std::find(skip.begin(), skip.end(), name) != skip.end()) continue;
    const bool is_flag = opt->get_expected_min() == 0 && opt->get_expected_max() == 0;
    if (is_flag) {
      echo[name] = opt->count() > 0 ? opt->as<bool>() : false;
      continue;
    }
    if (opt->count() > 0) {
      const auto& results = opt->results();
      if (opt->get_items_expected_max() > 1) {
        json items = json::array();
        for (const auto& r : results) items.push_back(typed_value(*opt, r));
        echo[name] = items;
      } else {
        echo[name] = typed_value(*opt, results.back());
      }
    } else if (!opt->get_default_str().empty()) {
      echo[name] = typed_value(*opt, opt->get_default_str());
    } else {
      echo[name] = nullptr;
    }
  }
  return echo;
}

// ---------------------------------------------------------------------------
// Files and reports
// ---------------------------------------------------------------------------

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DataError("cannot write '" + path.string() + "'");
}

json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DataError("'" + path.string() + "' is not valid JSON");
  return j;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json parse_json_arg(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw UsageError(what + " is not valid JSON");
  return j;
}

json report_header(const RunContext& ctx) {
  return json{{"tool_version", kToolVersion},
              {"format_version", kReportFormatVersion},
              {"command", ctx.command},
              {"seed", ctx.seed()},
              {"config_echo", ctx.config_echo}};
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      const auto b = cur.find_first_not_of(' ');
      const auto e = cur.find_last_not_of(' ');
      if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

std::vector<std::string> csv_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  const auto records = data::parse_delimited(line, ',');
  std::vector<std::string> names;
  if (records.empty()) return names;
  for (auto name : records.front()) {
    const auto b = name.find_first_not_of(" \t");
    const auto e = name.find_last_not_of(" \t");
    names.push_back(b == std::string::npos ? "" : name.substr(b, e - b + 1));
  }
  return names;
}

data::Dataset load_dataset(const std::string& path, const std::string& target) {
  data::LoadOptions options;
  if (!target.empty()) options.target = target;
  return data::load_csv(path, options);
}

data::Dataset require_target(data::Dataset ds, const std::string& what) {
  if (!ds.has_target()) throw UsageError(what + " needs --target naming the class column");
  return ds;
}

// ---------------------------------------------------------------------------
// Model bundles
// ---------------------------------------------------------------------------

json make_bundle(const models::Classifier& model, const data::Dataset& encoded) {
  return json{{"format_version", kBundleFormatVersion},
              {"kind", "tabkit-model-bundle"},
              {"model", models::model_to_json(model)},
              {"metadata", data::metadata_to_json(encoded)}};
}

LoadedModel load_model(const std::string& path) {
  const json j = read_json(path);
  LoadedModel lm;
  if (!j.is_object()) throw ModelError("'" + path + "' is not a model");
  if (j.value("kind", "") == "tabkit-model-bundle") {
    if (j.value("format_version", 0) != kBundleFormatVersion) {
      throw ModelError("unsupported model bundle format_version in '" + path + "'");
    }
    lm.model_json = j.at("model");
    lm.metadata = j.at("metadata");
  } else {
    lm.model_json = j;
  }
  try {
    lm.model = models::model_from_json(lm.model_json);
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("'" + path + "' is not a model: " + e.what());
  }
  return lm;
}

data::Dataset load_for_model(const LoadedModel& lm, const std::string& path,
                             const std::string& target_override) {
  std::string target = target_override;
  if (target.empty() && lm.metadata && (*lm.metadata)["target"].is_string()) {
    target = (*lm.metadata)["target"].get<std::string>();
  }
  const auto header = csv_header(path);
  const bool has_target =
      !target.empty() && std::find(header.begin(), header.end(), target) != header.end();
  if (!target_override.empty() && !has_target) {
    throw DataError("target column '" + target_override + "' not found in '" + path + "'");
  }
  data::Dataset raw = load_dataset(path, has_target ? target : "");
  if (!lm.metadata) return raw;
  const auto columns = data::columns_from_json(*lm.metadata);
  const auto class_names = lm.metadata->at("class_names").get<std::vector<std::string>>();
  data::Dataset ds = data::apply_metadata(raw, columns, class_names);
  ds.target_name = raw.target_name;
  return ds;
}

data::Dataset apply_prep_metadata(const data::Dataset& raw, const std::string& metadata_path) {
  if (metadata_path.empty()) return raw;
  const json meta = read_json(metadata_path);
  auto class_names = meta.value("class_names", std::vector<std::string>{});
  if (!raw.has_target() || class_names.empty()) class_names = raw.class_names;
  data::Dataset ds = data::apply_metadata(raw, data::columns_from_json(meta), class_names);
  ds.target_name = raw.target_name;
  return ds;
}

std::vector<double> column_std(const Matrix& X) {
  std::vector<double> out(X.cols());
  for (std::size_t j = 0; j < X.cols(); ++j) {
    const auto col = X.column(j);
    out[j] = population_std(col);
  }
  return out;
}

}  // namespace tabkit::cli
