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

#include "tabkit/llmgen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <regex>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace tabkit::llmgen {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Spec and messages
// ---------------------------------------------------------------------------

void validate(const GenSpec& spec) {
  if (trim(spec.topic).empty()) throw UsageError("generation topic must not be empty");
  if (spec.n_rows < 1) throw UsageError("n_rows must be at least 1");
  if (spec.n_cols < 1) throw UsageError("n_cols must be at least 1");
  if (!std::isfinite(spec.temperature) || spec.temperature < 0) {
    throw UsageError("temperature must be a finite value >= 0");
  }
  if (spec.model_id.empty()) throw UsageError("model_id must not be empty");
}

json spec_to_json(const GenSpec& spec) {
  return json{{"topic", spec.topic},         {"n_rows", spec.n_rows},
              {"n_cols", spec.n_cols},       {"column_hints", spec.column_hints},
              {"model_id", spec.model_id},   {"temperature", spec.temperature}};
}

GenSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("generation spec must be a JSON object");
  static const std::vector<std::string> known{"topic",    "n_rows",   "n_cols",
                                              "column_hints", "model_id", "temperature"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw UsageError("unknown generation spec key '" + key + "'");
    }
  }
  GenSpec spec;
  try {
    spec.topic = j.value("topic", spec.topic);
    spec.n_rows = j.value("n_rows", spec.n_rows);
    spec.n_cols = j.value("n_cols", spec.n_cols);
    spec.column_hints = j.value("column_hints", spec.column_hints);
    spec.model_id = j.value("model_id", spec.model_id);
    spec.temperature = j.value("temperature", spec.temperature);
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid generation spec: ") + e.what());
  }
  validate(spec);
  return spec;
}

const char* to_string(Role role) {
  switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

Role role_from_string(const std::string& s) {
  if (s == "system") return Role::system;
  if (s == "user") return Role::user;
  if (s == "assistant") return Role::assistant;
  throw UsageError("unknown message role '" + s + "'");
}

std::string build_prompt(const GenSpec& spec) {
  validate(spec);
  std::string p = "Generate a synthetic dataset about " + spec.topic + " with " +
                  std::to_string(spec.n_cols) + (spec.n_cols == 1 ? " column" : " columns") +
                  " and " + std::to_string(spec.n_rows) + (spec.n_rows == 1 ? " row" : " rows") +
                  ".";
  if (!spec.column_hints.empty()) {
    p += " Use these column names: " + join(spec.column_hints, ", ") + ".";
  }
  p += " Return the data as a pipe-delimited table with one header row followed by exactly " +
       std::to_string(spec.n_rows) +
       " data rows. Write plain numbers without units in the cells.";
  return p;
}

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------

HttpStatusError::HttpStatusError(int status, std::string body)
    : TransportError("endpoint returned HTTP status " + std::to_string(status)),
      status_(status),
      body_(std::move(body)) {}

MalformedResponseError::MalformedResponseError(const std::string& what, std::string body)
    : TransportError("malformed completion response: " + what), body_(std::move(body)) {}

HttpTransport::HttpTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

HttpResponse HttpTransport::post(const HttpRequest& request) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(request.url, m, url_re)) {
    throw UsageError("endpoint must be an http:// or https:// URL, got '" + request.url + "'");
  }
  const std::string base = m[1].str();
  const std::string path = m[2].matched ? m[2].str() : "/";

  httplib::Client client(base);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers headers;
  std::string content_type = "application/json";
  for (const auto& [k, v] : request.headers) {
    if (lower(k) == "content-type") {
      content_type = v;
    } else {
      headers.emplace(k, v);
    }
  }
  auto res = client.Post(path, headers, request.body, content_type);
  if (!res) {
    throw TransportFailure("request to " + base + " failed: " + httplib::to_string(res.error()));
  }
  return HttpResponse{res->status, res->body};
}

MockTransport::MockTransport(Handler handler) : handler_(std::move(handler)) {}

namespace {

std::string last_user_message(const std::string& body) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.contains("messages")) return {};
  std::string last;
  for (const auto& m : j["messages"]) {
    if (m.value("role", "") == "user") last = m.value("content", "");
  }
  return last;
}

}  // namespace

MockTransport MockTransport::with_builtin_fixtures() {
  return MockTransport([](const HttpRequest& request) {
    const std::string text = lower(last_user_message(request.body));
    std::string reply;
    if (text.find("carbon") != std::string::npos) {
      reply = carbon_emissions_fixture();
    } else if (text.find("happiness") != std::string::npos ||
               text.find("gdp") != std::string::npos) {
      reply = gdp_happiness_fixture();
    } else {
      reply = "I can only offer the carbon emission and GDP/happiness example tables.";
    }
    return HttpResponse{200, completion_body(reply)};
  });
}

MockTransport MockTransport::echo(std::string content) {
  return MockTransport([content = std::move(content)](const HttpRequest&) {
    return HttpResponse{200, completion_body(content)};
  });
}

HttpResponse MockTransport::post(const HttpRequest& request) {
  log_.push_back(request);
  return handler_(request);
}

std::string completion_body(const std::string& content) {
  const json j{{"choices", json::array({json{
                               {"message", json{{"role", "assistant"}, {"content", content}}}}})}};
  return j.dump();
}

const std::string& carbon_emissions_fixture() {
  static const std::string text =
      "Here is a synthetic dataset on carbon emissions with 4 columns and 10 rows:\n"
      "\n"
      "| Country | Year | CO2 Emissions (kt) | CO2 Emissions per capita (metric tons) |\n"
      "|---------|------|--------------------|----------------------------------------|\n"
      "| USA     | 2010 | 5,395,532          | 17.6                                   |\n"
      "| China   | 2010 | 8,286,892          | 6.2                                    |\n"
      "| India   | 2010 | 1,708,505          | 1.4                                    |\n"
      "| Russia  | 2010 | 1,677,115          | 11.8                                   |\n"
      "| Japan   | 2010 | 1,155,554          | 9.1                                    |\n"
      "| Germany | 2010 | 798,565            | 9.9                                    |\n"
      "| Canada  | 2010 | 541,020            | 15.9                                   |\n"
      "| UK      | 2010 | 491,324            | 7.9                                    |\n"
      "| Brazil  | 2010 | 422,598            | 2.2                                    |\n"
      "| France  | 2010 | 365,666            | 5.6                                    |\n"
      "\n"
      "Note: the values are illustrative and should be checked before use.\n";
  return text;
}

const std::string& gdp_happiness_fixture() {
  static const std::string text =
      "Sure. The table below relates happiness to GDP for 10 countries.\n"
      "\n"
      "Country      Happiness Rank  Happiness Score  GDP per Capita\n"
      "Norway       1               7.537            1.616463\n"
      "Denmark      2               7.522            1.482383\n"
      "Iceland      3               7.504            1.480633\n"
      "Switzerland  4               7.494            1.56498\n"
      "Finland      5               7.469            1.443572\n"
      "Netherlands  6               7.377            1.503945\n"
      "Canada       7               7.316            1.479204\n"
      "New Zealand  8               7.314            1.405706\n"
      "Sweden       9               7.284            1.494387\n"
      "Australia    10              7.284            1.484415\n";
  return text;
}

// ---------------------------------------------------------------------------
// Client
// ---------------------------------------------------------------------------

ChatClient::ChatClient(Transport& transport, ClientConfig config)
    : transport_(transport), config_(std::move(config)) {
  if (config_.max_attempts == 0) throw UsageError("max_attempts must be at least 1");
}

std::string request_body(const std::vector<ChatMessage>& messages, const std::string& model_id,
                         double temperature) {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back(json{{"role", to_string(m.role)}, {"content", m.content}});
  return json{{"model", model_id}, {"messages", msgs}, {"temperature", temperature}}.dump();
}

std::string ChatClient::complete(const std::vector<ChatMessage>& messages,
                                 const std::string& model_id, double temperature) {
  if (messages.empty()) throw UsageError("message list must not be empty");
  if (!std::isfinite(temperature) || temperature < 0) {
    throw UsageError("temperature must be a finite value >= 0");
  }
  HttpRequest request;
  request.url = config_.endpoint;
  request.headers.emplace_back("Content-Type", "application/json");
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      request.headers.emplace_back("Authorization", std::string("Bearer ") + key);
    }
  }
  request.body = request_body(messages, model_id, temperature);

  attempts_ = 0;
  std::string last_error;
  for (std::size_t attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) std::this_thread::sleep_for(config_.backoff * (1LL << (attempt - 2)));
    attempts_ = attempt;
    HttpResponse response;
    try {
      response = transport_.post(request);
    } catch (const TransportFailure&) {
      if (attempt == config_.max_attempts) throw;
      continue;
    }
    if (response.status == 429 || response.status >= 500) {
      if (attempt == config_.max_attempts) throw HttpStatusError(response.status, response.body);
      continue;
    }
    if (response.status < 200 || response.status >= 300) {
      throw HttpStatusError(response.status, response.body);
    }
    const json j = json::parse(response.body, nullptr, false);
    if (j.is_discarded()) throw MalformedResponseError("body is not JSON", response.body);
    const json::json_pointer ptr("/choices/0/message/content");
    if (!j.is_object() || !j.contains(ptr) || !j.at(ptr).is_string()) {
      throw MalformedResponseError("missing choices[0].message.content", response.body);
    }
    return j.at(ptr).get<std::string>();
  }
  throw TransportFailure("no attempts made");
}

std::string get_completion(ChatClient& client, const std::string& prompt,
                           const std::string& model_id, double temperature) {
  return client.complete({ChatMessage{Role::user, prompt}}, model_id, temperature);
}

std::string get_completion_from_messages(ChatClient& client,
                                         const std::vector<ChatMessage>& messages,
                                         const std::string& model_id, double temperature) {
  return client.complete(messages, model_id, temperature);
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

namespace {

enum class Layout { pipe, tab, aligned, csv };

using Cells = std::vector<std::string>;

Cells split_pipe(const std::string& line) {
  const std::string t = trim(line);
  Cells cells;
  std::string cur;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == '\\' && i + 1 < t.size() && t[i + 1] == '|') {
      cur += '|';
      ++i;
    } else if (t[i] == '|') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur += t[i];
    }
  }
  cells.push_back(trim(cur));
  if (!t.empty() && t.front() == '|') cells.erase(cells.begin());
  const bool trailing = t.size() >= 2 && t.back() == '|' && t[t.size() - 2] != '\\';
  if ((trailing || t == "|") && !cells.empty()) cells.pop_back();
  return cells;
}

std::optional<Cells> fit(Layout layout, const std::string& line) {
  const std::string t = trim(line);
  if (t.empty()) return std::nullopt;
  switch (layout) {
    case Layout::pipe:
      if (t.find('|') == std::string::npos) return std::nullopt;
      return split_pipe(t);
    case Layout::tab: {
      if (t.find('\t') == std::string::npos) return std::nullopt;
      Cells cells;
      std::size_t start = 0;
      while (true) {
        const auto pos = t.find('\t', start);
        cells.push_back(trim(t.substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
      }
      return cells;
    }
    case Layout::aligned: {
      static const std::regex gap(R"( {2,}|\t)");
      Cells cells;
      for (std::sregex_token_iterator it(t.begin(), t.end(), gap, -1), end; it != end; ++it) {
        cells.push_back(trim(it->str()));
      }
      if (cells.size() < 2) return std::nullopt;
      return cells;
    }
    case Layout::csv: {
      if (t.find(',') == std::string::npos) return std::nullopt;
      auto records = data::parse_delimited(t, ',');
      if (records.empty() || records.front().size() < 2) return std::nullopt;
      Cells cells;
      for (const auto& c : records.front()) cells.push_back(trim(c));
      return cells;
    }
  }
  return std::nullopt;
}

bool is_separator(const Cells& cells) {
  static const std::regex rule(R"(^:?-{2,}:?$|^=+$)");
  bool any = false;
  for (const auto& c : cells) {
    if (c.empty()) continue;
    if (!std::regex_match(c, rule)) return false;
    any = true;
  }
  return any;
}

bool is_fence(const std::string& line) { return trim(line).rfind("```", 0) == 0; }

std::string strip_thousands(const std::string& cell) {
  static const std::regex grouped(R"(^-?\d{1,3}(,\d{3})+(\.\d+)?$)");
  if (!std::regex_match(cell, grouped)) return cell;
  std::string out;
  for (char c : cell) {
    if (c != ',') out += c;
  }
  return out;
}

struct Block {
  Cells header;
  std::vector<Cells> rows;
  std::size_t first_line = 0;
};

/// First run of consecutive lines in this layout, separator rows removed.
std::optional<Block> find_block(Layout layout, const std::vector<std::string>& lines) {
  std::size_t i = 0;
  while (i < lines.size()) {
    if (is_fence(lines[i]) || !fit(layout, lines[i])) {
      ++i;
      continue;
    }
    Block block;
    block.first_line = i;
    bool have_header = false;
    for (; i < lines.size() && !is_fence(lines[i]); ++i) {
      auto cells = fit(layout, lines[i]);
      if (!cells) break;
      if (is_separator(*cells)) continue;
      if (!have_header) {
        block.header = std::move(*cells);
        have_header = true;
      } else {
        block.rows.push_back(std::move(*cells));
      }
    }
    if (have_header) return block;
  }
  return std::nullopt;
}

}  // namespace

TableParseError::TableParseError(Reason reason, const std::string& what, std::string raw)
    : DataError(what), reason_(reason), raw_(std::move(raw)) {}

data::Dataset parse_table(const std::string& text, const GenSpec* spec,
                          const std::optional<std::string>& target) {
  std::vector<std::string> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto pos = text.find('\n', start);
      std::string line = text.substr(start, pos == std::string::npos ? pos : pos - start);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(std::move(line));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
  }

  std::optional<Block> chosen;
  bool header_only = false;
  for (Layout layout : {Layout::pipe, Layout::tab, Layout::aligned, Layout::csv}) {
    auto block = find_block(layout, lines);
    if (!block) continue;
    if (block->rows.empty()) {
      header_only = true;
      continue;
    }
    chosen = std::move(block);
    break;
  }
  if (!chosen) {
    if (header_only) {
      throw TableParseError(TableParseError::Reason::no_data_rows, "no data rows", text);
    }
    throw TableParseError(TableParseError::Reason::no_table, "no table found in reply", text);
  }

  const std::size_t width = chosen->header.size();
  for (std::size_t r = 0; r < chosen->rows.size(); ++r) {
    if (chosen->rows[r].size() != width) {
      throw TableParseError(TableParseError::Reason::ragged_row,
                            "ragged row " + std::to_string(r + 1) + ": expected " +
                                std::to_string(width) + " cells, found " +
                                std::to_string(chosen->rows[r].size()),
                            text);
    }
    for (auto& cell : chosen->rows[r]) cell = strip_thousands(cell);
  }
  if (spec && (chosen->rows.size() != spec->n_rows || width != spec->n_cols)) {
    throw TableParseError(TableParseError::Reason::count_mismatch,
                          "expected " + std::to_string(spec->n_rows) + " rows and " +
                              std::to_string(spec->n_cols) + " columns, found " +
                              std::to_string(chosen->rows.size()) + " rows and " +
                              std::to_string(width) + " columns",
                          text);
  }
  data::LoadOptions options;
  options.target = target;
  return data::dataset_from_cells(chosen->header, chosen->rows, options);
}

namespace {

std::string escape_pipe(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    if (c == '\n' || c == '\r') throw DataError("table cells must not contain line breaks");
    out += c;
  }
  return out;
}

std::string pipe_row(const Cells& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + escape_pipe(c) + " |";
  return out + "\n";
}

}  // namespace

std::string render_table(const data::Dataset& ds) {
  Cells header = ds.feature_names();
  if (ds.y) header.push_back(ds.target_name.empty() ? "target" : ds.target_name);
  if (header.empty()) throw DataError("cannot render a table without columns");
  std::string out = pipe_row(header);
  out += pipe_row(Cells(header.size(), "---"));
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    Cells row;
    for (std::size_t j = 0; j < ds.n_features(); ++j) row.push_back(data::cell_text(ds, r, j));
    if (ds.y) row.push_back(ds.class_names.at(static_cast<std::size_t>((*ds.y)[r])));
    out += pipe_row(row);
  }
  return out;
}

json transcript_to_json(const Transcript& t) {
  return json{{"spec", spec_to_json(t.spec)},
              {"prompt", t.prompt},
              {"raw_reply", t.raw_reply},
              {"parse_status", t.parse_status}};
}

GenerationResult llm_generate_dataset(const GenSpec& spec, ChatClient& client,
                                      Transcript* transcript_out) {
  Transcript t;
  t.spec = spec;
  t.prompt = build_prompt(spec);
  t.raw_reply = get_completion(client, t.prompt, spec.model_id, spec.temperature);
  t.parse_status = "pending";
  if (transcript_out) *transcript_out = t;
  try {
    data::Dataset ds = parse_table(t.raw_reply, &spec);
    t.parse_status = "ok";
    if (transcript_out) *transcript_out = t;
    return GenerationResult{std::move(ds), std::move(t)};
  } catch (const DataError& e) {
    t.parse_status = e.what();
    if (transcript_out) *transcript_out = t;
    throw;
  }
}

std::vector<ChatMessage> run_chat(std::istream& in, std::ostream& out, ChatClient& client,
                                  const ChatOptions& options) {
  std::vector<ChatMessage> history;
  if (!options.system_prompt.empty()) history.push_back({Role::system, options.system_prompt});
  std::string line;
  while (true) {
    out << "> " << std::flush;
    if (!std::getline(in, line)) break;
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text == "exit" || text == "quit") break;
    history.push_back({Role::user, text});
    try {
      std::string reply = client.complete(history, options.model_id, options.temperature);
      out << reply << "\n";
      history.push_back({Role::assistant, std::move(reply)});
    } catch (const TransportError& e) {
      history.pop_back();
      out << "error: " << e.what() << "\n";
    }
  }
  out << "\n";
  return history;
}

}  // namespace tabkit::llmgen
