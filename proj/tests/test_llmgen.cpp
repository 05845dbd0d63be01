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

#include <gtest/gtest.h>

#include <sstream>

#include "tabkit/llmgen.hpp"

using namespace tabkit;
using namespace tabkit::llmgen;
using nlohmann::json;

namespace {

ClientConfig fast_config() {
  ClientConfig c;
  c.endpoint = "http://mock.invalid/v1/chat/completions";
  c.api_key_env = "";
  c.backoff = std::chrono::milliseconds(0);
  return c;
}

json sent(const HttpRequest& r) { return json::parse(r.body); }

}  // namespace

TEST(Prompt, NamesTopicCountsAndHints) {
  GenSpec s;
  s.topic = "carbon emissions";
  s.n_rows = 10;
  s.n_cols = 4;
  s.column_hints = {"Country", "Year"};
  const auto p = build_prompt(s);
  for (const char* part : {"carbon emissions", "4 columns", "10 rows", "Country, Year", "pipe"}) {
    EXPECT_NE(p.find(part), std::string::npos) << part;
  }
  EXPECT_EQ(p, build_prompt(s));
  s.topic = "";
  EXPECT_THROW(validate(s), UsageError);
  EXPECT_THROW(spec_from_json({{"topic", "x"}, {"rows", 3}}), UsageError);
  GenSpec t;
  t.topic = "x";
  EXPECT_EQ(spec_to_json(spec_from_json(spec_to_json(t))), spec_to_json(t));
}

TEST(Client, SingleUserMessageAndParametersForwarded) {
  auto mock = MockTransport::echo("hello");
  ChatClient client(mock, fast_config());
  EXPECT_EQ(get_completion(client, "tell me", "gpt-x", 0.7), "hello");
  ASSERT_EQ(mock.log().size(), 1u);
  const auto body = sent(mock.log()[0]);
  EXPECT_EQ(body["model"], "gpt-x");
  EXPECT_EQ(body["temperature"], 0.7);
  ASSERT_EQ(body["messages"].size(), 1u);
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "tell me");
  EXPECT_EQ(mock.log()[0].url, fast_config().endpoint);
}

TEST(Client, HistoryOrderIsPreservedAndEmptyRejected) {
  auto mock = MockTransport::echo("ok");
  ChatClient client(mock, fast_config());
  const std::vector<ChatMessage> msgs{{Role::system, "be brief"},
                                      {Role::user, "one"},
                                      {Role::assistant, "two"},
                                      {Role::user, "three"}};
  get_completion_from_messages(client, msgs);
  const auto m = sent(mock.log()[0])["messages"];
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m[0]["role"], "system");
  EXPECT_EQ(m[2]["role"], "assistant");
  EXPECT_EQ(m[3]["content"], "three");
  EXPECT_THROW(get_completion_from_messages(client, {}), UsageError);
  EXPECT_THROW(get_completion(client, "x", "m", -1.0), UsageError);
}

TEST(Client, IdenticalInputsGiveByteIdenticalRequests) {
  auto mock = MockTransport::echo("ok");
  ChatClient client(mock, fast_config());
  get_completion(client, "same", "m", 0.0);
  get_completion(client, "same", "m", 0.0);
  EXPECT_EQ(mock.log()[0].body, mock.log()[1].body);
  EXPECT_EQ(mock.log()[0].headers, mock.log()[1].headers);
}

TEST(Retry, ServerErrorsExhaustAttempts) {
  int calls = 0;
  MockTransport mock([&](const HttpRequest&) {
    ++calls;
    return HttpResponse{500, "boom"};
  });
  ChatClient client(mock, fast_config());
  try {
    get_completion(client, "x");
    FAIL();
  } catch (const HttpStatusError& e) {
    EXPECT_EQ(e.status(), 500);
    EXPECT_EQ(e.category(), Error::Category::transport);
  }
  EXPECT_EQ(calls, 3);
  EXPECT_EQ(client.attempts_last_call(), 3u);
}

TEST(Retry, RateLimitThenSuccess) {
  int calls = 0;
  MockTransport mock([&](const HttpRequest&) {
    return ++calls == 1 ? HttpResponse{429, "slow down"} : HttpResponse{200, completion_body("fine")};
  });
  ChatClient client(mock, fast_config());
  EXPECT_EQ(get_completion(client, "x"), "fine");
  EXPECT_EQ(client.attempts_last_call(), 2u);
}

TEST(Retry, ClientErrorsAreNotRetried) {
  int calls = 0;
  MockTransport mock([&](const HttpRequest&) {
    ++calls;
    return HttpResponse{404, "no such model"};
  });
  ChatClient client(mock, fast_config());
  EXPECT_THROW(get_completion(client, "x"), HttpStatusError);
  EXPECT_EQ(calls, 1);
}

TEST(Retry, ConnectionFailuresAreRetried) {
  int calls = 0;
  MockTransport mock([&](const HttpRequest&) -> HttpResponse {
    if (++calls < 3) throw TransportFailure("refused");
    return HttpResponse{200, completion_body("late")};
  });
  ChatClient client(mock, fast_config());
  EXPECT_EQ(get_completion(client, "x"), "late");
  EXPECT_EQ(calls, 3);
}

TEST(Retry, MalformedBodiesKeepTheRawText) {
  for (const std::string body : {"not json", "{\"choices\":[]}", "{\"choices\":[{\"message\":{}}]}"}) {
    auto mock = MockTransport([&](const HttpRequest&) { return HttpResponse{200, body}; });
    ChatClient client(mock, fast_config());
    try {
      get_completion(client, "x");
      FAIL() << body;
    } catch (const MalformedResponseError& e) {
      EXPECT_EQ(e.body(), body);
    }
  }
}

TEST(Tables, CarbonFixtureParsesWithNumericValues) {
  GenSpec s;
  s.topic = "carbon";
  const auto ds = parse_table(carbon_emissions_fixture(), &s);
  ASSERT_EQ(ds.n_rows(), 10u);
  ASSERT_EQ(ds.n_features(), 4u);
  EXPECT_EQ(ds.columns[0].kind, data::ColumnKind::categorical);
  EXPECT_EQ(ds.columns[2].name, "CO2 Emissions (kt)");
  EXPECT_EQ(ds.columns[2].kind, data::ColumnKind::numeric);
  EXPECT_EQ(ds.X(0, 2), 5395532.0);
  EXPECT_EQ(ds.X(9, 3), 5.6);
  EXPECT_EQ(data::cell_text(ds, 1, 0), "China");
}

TEST(Tables, AlignedFixtureParses) {
  const auto ds = parse_table(gdp_happiness_fixture(), nullptr, std::string("Country"));
  ASSERT_EQ(ds.n_rows(), 10u);
  ASSERT_EQ(ds.n_features(), 3u);
  EXPECT_EQ(ds.class_names[0], "Norway");
  EXPECT_EQ(ds.class_names[7], "New Zealand");
  EXPECT_EQ(ds.X(0, ds.column_index("Happiness Score")), 7.537);
}

TEST(Tables, OtherLayouts) {
  const auto csv = parse_table("Here you go:\nx,y\n1,2\n3,4\nThanks");
  EXPECT_EQ(csv.n_rows(), 2u);
  EXPECT_EQ(csv.X(1, 1), 4.0);
  const auto tab = parse_table("a\tb\n1\t2\n");
  EXPECT_EQ(tab.X(0, 1), 2.0);
  const auto fenced = parse_table("```\n| p | q |\n|---|---|\n| 1 | 2 |\n```\n");
  EXPECT_EQ(fenced.n_rows(), 1u);
  EXPECT_EQ(fenced.feature_names(), (std::vector<std::string>{"p", "q"}));
}

TEST(Tables, FailuresCarryReasonAndRawReply) {
  auto expect_reason = [](const std::string& text, TableParseError::Reason r, const GenSpec* s) {
    try {
      parse_table(text, s);
      FAIL() << text;
    } catch (const TableParseError& e) {
      EXPECT_EQ(e.reason(), r) << text;
      EXPECT_EQ(e.raw_reply(), text);
      EXPECT_EQ(e.category(), Error::Category::data);
    }
  };
  expect_reason("| a | b |\n|---|---|\n", TableParseError::Reason::no_data_rows, nullptr);
  expect_reason("I cannot help with that.", TableParseError::Reason::no_table, nullptr);
  expect_reason("| a | b |\n| 1 | 2 |\n| 3 |\n| 4 | 5 | 6 |\n", TableParseError::Reason::ragged_row,
                nullptr);
  GenSpec s;
  s.topic = "carbon";
  s.n_rows = 3;
  expect_reason(carbon_emissions_fixture(), TableParseError::Reason::count_mismatch, &s);
}

TEST(Tables, RenderParseRoundTrip) {
  data::LoadOptions opt;
  opt.target = "label";
  const auto ds = data::parse_csv("name,v,label\n\"a|b\",1.5,yes\nc,-2,no\n", opt);
  const auto text = render_table(ds);
  EXPECT_NE(text.find("a\\|b"), std::string::npos);
  const auto back = parse_table(text, nullptr, std::string("label"));
  EXPECT_TRUE(back.same_as(ds));
}

TEST(Generate, MockFixtureEndToEnd) {
  auto mock = MockTransport::with_builtin_fixtures();
  ChatClient client(mock, fast_config());
  GenSpec s;
  s.topic = "carbon emissions";
  Transcript t;
  const auto r = llm_generate_dataset(s, client, &t);
  EXPECT_EQ(r.dataset.n_rows(), 10u);
  EXPECT_EQ(t.parse_status, "ok");
  EXPECT_EQ(t.raw_reply, carbon_emissions_fixture());
  EXPECT_EQ(t.prompt, build_prompt(s));
  EXPECT_EQ(mock.log().size(), 1u);
  s.n_rows = 4;
  Transcript failed;
  EXPECT_THROW(llm_generate_dataset(s, client, &failed), TableParseError);
  EXPECT_EQ(failed.raw_reply, carbon_emissions_fixture());
  EXPECT_NE(failed.parse_status, "ok");
  EXPECT_EQ(transcript_to_json(failed)["raw_reply"], carbon_emissions_fixture());
}

TEST(Chat, TwoTurnsThenExit) {
  int n = 0;
  MockTransport mock([&](const HttpRequest&) {
    return HttpResponse{200, completion_body("reply " + std::to_string(++n))};
  });
  ChatClient client(mock, fast_config());
  std::istringstream in("hi\nand again\nexit\nnever sent\n");
  std::ostringstream out;
  ChatOptions opt;
  opt.system_prompt = "sys";
  const auto h = run_chat(in, out, client, opt);
  ASSERT_EQ(h.size(), 5u);
  EXPECT_EQ(h[0].role, Role::system);
  EXPECT_EQ(h[3].content, "and again");
  EXPECT_EQ(h[4].content, "reply 2");
  ASSERT_EQ(mock.log().size(), 2u);
  EXPECT_EQ(sent(mock.log()[1])["messages"].size(), 4u);
  EXPECT_NE(out.str().find("reply 1"), std::string::npos);
}

TEST(Chat, TransportErrorDropsFailedTurn) {
  int n = 0;
  MockTransport mock([&](const HttpRequest&) {
    return ++n == 1 ? HttpResponse{400, "bad"} : HttpResponse{200, completion_body("ok")};
  });
  ChatClient client(mock, fast_config());
  std::istringstream in("first\nsecond\n");
  std::ostringstream out;
  const auto h = run_chat(in, out, client);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0].content, "second");
  EXPECT_NE(out.str().find("error:"), std::string::npos);
}
