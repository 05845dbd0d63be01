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

#include <memory>
#include <ostream>

#include "common.hpp"
#include "tabkit/error.hpp"
#include "tabkit/llmgen.hpp"

namespace tabkit::cli {

namespace {

struct TransportOptions {
  std::string endpoint, api_key_env = "OPENAI_API_KEY", mock_reply;
  int timeout = 60;
  bool mock = false;
};

void add_transport_options(CLI::App* sub, TransportOptions& t) {
  sub->add_option("--endpoint", t.endpoint, "Chat-completions URL");
  sub->add_option("--api-key-env", t.api_key_env, "Environment variable holding the API key");
  sub->add_option("--timeout", t.timeout, "Request timeout in seconds");
  sub->add_flag("--mock", t.mock, "Answer from the bundled example tables, no network");
  sub->add_option("--mock-reply", t.mock_reply, "Answer every request with this file's text");
}

std::unique_ptr<llmgen::Transport> make_transport(const TransportOptions& t) {
  if (!t.mock_reply.empty()) {
    return std::make_unique<llmgen::MockTransport>(llmgen::MockTransport::echo(read_text(t.mock_reply)));
  }
  if (t.mock) {
    return std::make_unique<llmgen::MockTransport>(llmgen::MockTransport::with_builtin_fixtures());
  }
  if (t.endpoint.empty()) throw UsageError("--endpoint is required unless --mock is given");
  if (t.timeout <= 0) throw UsageError("--timeout must be positive");
  return std::make_unique<llmgen::HttpTransport>(std::chrono::seconds(t.timeout));
}

llmgen::ClientConfig client_config(const TransportOptions& t) {
  llmgen::ClientConfig c;
  c.endpoint = t.endpoint;
  c.api_key_env = t.api_key_env;
  return c;
}

}  // namespace

void register_llm_commands(Registry& reg) {
  {
    struct Opts {
      TransportOptions transport;
      std::string topic, hints, model_id = "gpt-3.5-turbo";
      std::size_t rows = 10, cols = 4;
      double temperature = 0.0;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("llm-generate", "Ask a chat model for a synthetic table", false, true);
    sub->add_option("--topic", o.topic, "Subject of the dataset");
    sub->add_option("--rows", o.rows, "Requested data rows");
    sub->add_option("--cols", o.cols, "Requested columns");
    sub->add_option("--hints", o.hints, "Comma-separated column names to request");
    sub->add_option("--model-id", o.model_id, "Chat model name");
    sub->add_option("--temperature", o.temperature, "Sampling temperature");
    add_transport_options(sub, o.transport);
    auto& spec = reg.spec(sub);
    spec.required = {"topic", "out"};
    spec.handler = [&o](RunContext& ctx) {
      llmgen::GenSpec gs;
      gs.topic = o.topic;
      gs.n_rows = o.rows;
      gs.n_cols = o.cols;
      gs.column_hints = split_list(o.hints);
      gs.model_id = o.model_id;
      gs.temperature = o.temperature;
      llmgen::validate(gs);
      auto transport = make_transport(o.transport);
      llmgen::ChatClient client(*transport, client_config(o.transport));
      const auto out = ctx.out();
      llmgen::Transcript transcript;
      auto save_transcript = [&] {
        json j = report_header(ctx);
        j["transcript"] = llmgen::transcript_to_json(transcript);
        write_json(out / "transcript.json", j);
      };
      try {
        const auto result = llmgen::llm_generate_dataset(gs, client, &transcript);
        save_transcript();
        data::save_csv(result.dataset, out / "dataset.csv");
        ctx.io->out << "parsed " << result.dataset.n_rows() << " rows and "
                    << result.dataset.n_features() << " columns\n";
      } catch (const DataError&) {
        if (!transcript.prompt.empty()) save_transcript();
        throw;
      }
    };
  }
  {
    struct Opts {
      TransportOptions transport;
      std::string system_prompt, transcript, model_id = "gpt-3.5-turbo";
      double temperature = 0.0;
    };
    auto& o = reg.make<Opts>();
    CLI::App* sub = reg.add("llm-chat", "Terminal conversation with a chat model", false, false);
    sub->add_option("--system", o.system_prompt, "System message opening the conversation");
    sub->add_option("--model-id", o.model_id, "Chat model name");
    sub->add_option("--temperature", o.temperature, "Sampling temperature");
    sub->add_option("--transcript", o.transcript, "Write the conversation as JSON here");
    add_transport_options(sub, o.transport);
    auto& spec = reg.spec(sub);
    spec.uses_out = false;
    spec.handler = [&o](RunContext& ctx) {
      auto transport = make_transport(o.transport);
      llmgen::ChatClient client(*transport, client_config(o.transport));
      const auto history = llmgen::run_chat(ctx.io->in, ctx.io->out, client,
                                            {o.model_id, o.temperature, o.system_prompt});
      if (!o.transcript.empty()) {
        json msgs = json::array();
        for (const auto& m : history) {
          msgs.push_back({{"role", llmgen::to_string(m.role)}, {"content", m.content}});
        }
        json j = report_header(ctx);
        j["messages"] = msgs;
        write_json(o.transcript, j);
      }
    };
  }
}

}  // namespace tabkit::cli
