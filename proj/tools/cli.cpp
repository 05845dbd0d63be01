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

#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <iostream>

#include "common.hpp"
#include "tabkit/error.hpp"

namespace tabkit::cli {

namespace {

const char* category_name(int code) {
  switch (code) {
    case 2: return "usage";
    case 3: return "data";
    case 4: return "model";
    case 5: return "transport";
    default: return "internal";
  }
}

int report_error(std::ostream& err, int code, const std::string& message,
                 const std::string& command) {
  json j{{"error",
          {{"category", category_name(code)}, {"exit_code", code}, {"message", message}}}};
  if (!command.empty()) j["error"]["command"] = command;
  err << j.dump() << "\n";
  return code;
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"tabkit: tabular learning, explanation and synthetic data toolkit", "tabkit"};
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  Registry reg(app);
  register_data_commands(reg);
  register_model_commands(reg);
  register_xai_commands(reg);
  register_synth_commands(reg);
  register_llm_commands(reg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return report_error(err, 2, e.what(), "");
  }

  const CommandSpec* cmd = nullptr;
  for (const auto& c : reg.commands()) {
    if (c.app->parsed()) cmd = &c;
  }
  if (!cmd) return report_error(err, 2, "no subcommand given", "");

  Streams io{in, out, err};
  RunContext ctx;
  ctx.command = cmd->app->get_name();
  ctx.app = cmd->app;
  ctx.common = &reg.common();
  ctx.io = &io;

  try {
    if (!reg.common().config_path.empty()) {
      merge_config(*cmd->app, read_json(reg.common().config_path));
    }
    for (const auto& name : cmd->required) {
      if (cmd->app->get_option("--" + name)->count() == 0) {
        throw UsageError("--" + name + " is required");
      }
    }
    if (reg.common().threads < 0) throw UsageError("--threads must be >= 0");
    set_threads(reg.common().threads);
    ctx.config_echo = echo_options(*cmd->app);

    const auto started = std::chrono::system_clock::now();
    const auto t0 = std::chrono::steady_clock::now();
    cmd->handler(ctx);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cmd->uses_out && !reg.common().out_dir.empty()) {
      write_json(ctx.out() / "run_meta.json",
                 json{{"command", ctx.command},
                      {"started_at", utc_timestamp(started)},
                      {"finished_at", utc_timestamp(std::chrono::system_clock::now())},
                      {"elapsed_seconds", elapsed},
                      {"threads", ctx.exec() == Exec::serial ? 1 : max_threads()},
                      {"exec", ctx.exec() == Exec::serial ? "serial" : "parallel"}});
    }
    return 0;
  } catch (const Error& e) {
    return report_error(err, static_cast<int>(e.category()), e.what(), ctx.command);
  } catch (const CLI::ParseError& e) {
    return report_error(err, 2, e.what(), ctx.command);
  } catch (const nlohmann::json::exception& e) {
    return report_error(err, 3, std::string("invalid JSON content: ") + e.what(), ctx.command);
  } catch (const std::exception& e) {
    return report_error(err, 1, e.what(), ctx.command);
  }
}

}  // namespace tabkit::cli
