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

#ifndef TABKIT_LLMGEN_HPP_
#define TABKIT_LLMGEN_HPP_

#include <chrono>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tabkit/data.hpp"
#include "tabkit/error.hpp"

namespace tabkit::llmgen {

struct GenSpec {
  std::string topic;
  std::size_t n_rows = 10;
  std::size_t n_cols = 4;
  std::vector<std::string> column_hints;
  std::string model_id = "gpt-3.5-turbo";
  double temperature = 0.0;
};

void validate(const GenSpec& spec);
nlohmann::json spec_to_json(const GenSpec& spec);
GenSpec spec_from_json(const nlohmann::json& j);

enum class Role { system, user, assistant };
const char* to_string(Role role);
Role role_from_string(const std::string& s);

struct ChatMessage {
  Role role = Role::user;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

std::string build_prompt(const GenSpec& spec);

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------

struct HttpRequest {
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

/// Connection-level failure (DNS, refused, timeout).
class TransportFailure : public TransportError {
 public:
  using TransportError::TransportError;
};

class HttpStatusError : public TransportError {
 public:
  HttpStatusError(int status, std::string body);
  int status() const { return status_; }
  const std::string& body() const { return body_; }

 private:
  int status_;
  std::string body_;
};

class MalformedResponseError : public TransportError {
 public:
  MalformedResponseError(const std::string& what, std::string body);
  const std::string& body() const { return body_; }

 private:
  std::string body_;
};

class Transport {
 public:
  virtual ~Transport() = default;
  /// Throws TransportFailure when no response was received.
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(std::chrono::seconds timeout = std::chrono::seconds(60));
  HttpResponse post(const HttpRequest& request) override;

 private:
  std::chrono::seconds timeout_;
};

class MockTransport final : public Transport {
 public:
  using Handler = std::function<HttpResponse(const HttpRequest&)>;

  explicit MockTransport(Handler handler);
  /// Replies with the bundled carbon-emission table when the last user
  /// message mentions carbon, the GDP/happiness table for happiness or GDP,
  /// and a refusal otherwise.
  static MockTransport with_builtin_fixtures();
  /// Always replies with `content` as the assistant message.
  static MockTransport echo(std::string content);

  HttpResponse post(const HttpRequest& request) override;
  const std::vector<HttpRequest>& log() const { return log_; }

 private:
  Handler handler_;
  std::vector<HttpRequest> log_;
};

/// {"choices":[{"message":{"role":"assistant","content":...}}]}
std::string completion_body(const std::string& content);

/// Bundled reply texts.
const std::string& carbon_emissions_fixture();
const std::string& gdp_happiness_fixture();

// ---------------------------------------------------------------------------
// Client
// ---------------------------------------------------------------------------

struct ClientConfig {
  /// Chat-completions URL; required for real requests.
  std::string endpoint;
  /// Name of the environment variable holding the API key.
  std::string api_key_env = "OPENAI_API_KEY";
  std::size_t max_attempts = 3;
  std::chrono::milliseconds backoff{500};
};

class ChatClient {
 public:
  ChatClient(Transport& transport, ClientConfig config);

  /// Sends the history as one request; retries transport failures, 429 and
  /// 5xx statuses with exponential backoff.
  std::string complete(const std::vector<ChatMessage>& messages, const std::string& model_id,
                       double temperature);

  std::size_t attempts_last_call() const { return attempts_; }

 private:
  Transport& transport_;
  ClientConfig config_;
  std::size_t attempts_ = 0;
};

std::string request_body(const std::vector<ChatMessage>& messages, const std::string& model_id,
                         double temperature);

std::string get_completion(ChatClient& client, const std::string& prompt,
                           const std::string& model_id = "gpt-3.5-turbo",
                           double temperature = 0.0);
std::string get_completion_from_messages(ChatClient& client,
                                         const std::vector<ChatMessage>& messages,
                                         const std::string& model_id = "gpt-3.5-turbo",
                                         double temperature = 0.0);

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

class TableParseError : public DataError {
 public:
  enum class Reason { no_table, no_data_rows, ragged_row, count_mismatch };
  TableParseError(Reason reason, const std::string& what, std::string raw);
  Reason reason() const { return reason_; }
  const std::string& raw_reply() const { return raw_; }

 private:
  Reason reason_;
  std::string raw_;
};

/// Finds a pipe-delimited, tab-delimited, aligned (two or more spaces) or
/// comma-delimited table in text. Numeric cells may carry thousands
/// separators. Counts are checked against spec when given; `target` names a
/// column to read as class labels.
data::Dataset parse_table(const std::string& text, const GenSpec* spec = nullptr,
                          const std::optional<std::string>& target = std::nullopt);

/// Pipe-delimited table with a header row; the target column comes last.
/// A literal pipe inside a cell is written as a backslash followed by the pipe.
std::string render_table(const data::Dataset& ds);

struct Transcript {
  GenSpec spec;
  std::string prompt;
  std::string raw_reply;
  std::string parse_status;  // "ok" or the error message
};

nlohmann::json transcript_to_json(const Transcript& t);

struct GenerationResult {
  data::Dataset dataset;
  Transcript transcript;
};

/// build_prompt, get_completion, parse_table. The transcript is filled in
/// before parsing so callers can persist it when parsing throws.
GenerationResult llm_generate_dataset(const GenSpec& spec, ChatClient& client,
                                      Transcript* transcript_out = nullptr);

struct ChatOptions {
  std::string model_id = "gpt-3.5-turbo";
  double temperature = 0.0;
  std::string system_prompt;
};

/// Terminal conversation: each input line is a user turn, "exit", "quit" or
/// end of input stops. Returns the full history.
std::vector<ChatMessage> run_chat(std::istream& in, std::ostream& out, ChatClient& client,
                                  const ChatOptions& options = {});

}  // namespace tabkit::llmgen

#endif  // TABKIT_LLMGEN_HPP_
