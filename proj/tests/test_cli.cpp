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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "helpers.hpp"
#include "tabkit/syneval.hpp"

namespace fs = std::filesystem;
using namespace tabkit;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "tabkit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  Run r;
  r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

json read(const fs::path& p) { return json::parse(testkit::slurp(p)); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testkit::temp_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    csv_ = (dir_ / "blobs.csv").string();
    data::save_csv(testkit::blobs(90, 3, 2, 2.5, 17), csv_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  std::string csv_;
};

}  // namespace

TEST_F(CliTest, VersionHelpAndUsageErrors) {
  EXPECT_EQ(run({"--version"}).code, 0);
  const auto help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("train"), std::string::npos);
  const auto bad = run({"train", "--bogus"});
  EXPECT_EQ(bad.code, 2);
  const auto e = json::parse(bad.err);
  EXPECT_EQ(e["error"]["category"], "usage");
  EXPECT_EQ(e["error"]["exit_code"], 2);
  EXPECT_EQ(run({"train", "--data", csv_, "--target", "target"}).code, 2);
  EXPECT_EQ(run({"nosuchcommand"}).code, 2);
}

TEST_F(CliTest, TrainIsDeterministicAcrossOutputDirectories) {
  const std::vector<std::string> base{"train", "--data", csv_, "--target", "target", "--model",
                                      "rforest", "--params", "{\"n_trees\": 10}", "--cv-folds", "3"};
  auto a = base;
  a.insert(a.end(), {"--out", path("a")});
  auto b = base;
  b.insert(b.end(), {"--out", path("b")});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  EXPECT_EQ(testkit::slurp(path("a/model.json")), testkit::slurp(path("b/model.json")));
  EXPECT_EQ(testkit::slurp(path("a/report.json")), testkit::slurp(path("b/report.json")));
  const auto meta = read(path("a/run_meta.json"));
  EXPECT_EQ(meta["command"], "train");
  EXPECT_TRUE(meta.contains("elapsed_seconds"));
  const auto bundle = read(path("a/model.json"));
  EXPECT_EQ(bundle["kind"], "tabkit-model-bundle");
  EXPECT_EQ(bundle["model"]["config"]["n_trees"], 10);
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  std::ofstream(path("cfg.json")) << R"({"model": "dtree", "seed": 7, "cv-folds": 3})";
  ASSERT_EQ(run({"train", "--config", path("cfg.json"), "--data", csv_, "--target", "target",
                 "--out", path("c1")})
                .code,
            0);
  auto rep = read(path("c1/report.json"));
  EXPECT_EQ(rep["seed"], 7);
  EXPECT_EQ(rep["config_echo"]["model"], "dtree");
  ASSERT_EQ(run({"train", "--config", path("cfg.json"), "--data", csv_, "--target", "target",
                 "--seed", "9", "--out", path("c2")})
                .code,
            0);
  rep = read(path("c2/report.json"));
  EXPECT_EQ(rep["seed"], 9);
  std::ofstream(path("bad.json")) << R"({"modle": "dtree"})";
  EXPECT_EQ(run({"train", "--config", path("bad.json"), "--data", csv_, "--target", "target",
                 "--out", path("c3")})
                .code,
            2);
}

TEST_F(CliTest, ExitCodesByCategory) {
  EXPECT_EQ(run({"train", "--data", csv_, "--target", "nope", "--out", path("x")}).code, 3);
  EXPECT_EQ(run({"train", "--data", path("missing.csv"), "--target", "target", "--out", path("x")}).code,
            3);
  std::ofstream(path("notmodel.json")) << R"({"hello": 1})";
  EXPECT_EQ(run({"evaluate", "--model", path("notmodel.json"), "--data", csv_, "--out", path("y")}).code,
            4);
  const auto r = run({"llm-generate", "--topic", "carbon", "--out", path("z")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.err)["error"]["category"], "usage");
}

TEST_F(CliTest, ExportImportKeepsPredictions) {
  ASSERT_EQ(run({"train", "--data", csv_, "--target", "target", "--model", "logreg", "--cv-folds", "3",
                 "--out", path("m")})
                .code,
            0);
  ASSERT_EQ(run({"evaluate", "--model", path("m/model.json"), "--data", csv_, "--out", path("e1")}).code,
            0);
  ASSERT_EQ(run({"export", "--model", path("m/model.json"), "--out", path("ex")}).code, 0);
  ASSERT_EQ(run({"import", "--model", path("ex/model.json"), "--metadata", path("ex/metadata.json"),
                 "--out", path("im")})
                .code,
            0);
  ASSERT_EQ(run({"evaluate", "--model", path("im/model.json"), "--data", csv_, "--out", path("e2")}).code,
            0);
  EXPECT_EQ(testkit::slurp(path("e1/predictions.csv")), testkit::slurp(path("e2/predictions.csv")));
  const auto rep = read(path("e1/report.json"));
  EXPECT_GT(rep["report"]["accuracy"].get<double>(), 0.8);
}

TEST_F(CliTest, InterpretWritesOneEntryPerFeature) {
  ASSERT_EQ(run({"train", "--data", csv_, "--target", "target", "--model", "dtree", "--cv-folds", "3",
                 "--out", path("m")})
                .code,
            0);
  ASSERT_EQ(run({"interpret", "--model", path("m/model.json"), "--data", csv_, "--row", "4", "--out",
                 path("i")})
                .code,
            0);
  const auto e = read(path("i/explanation.json"))["explanation"];
  ASSERT_EQ(e["features"].size(), 3u);
  EXPECT_EQ(e["features"][0]["name"], "f0");
  for (const auto& f : e["features"]) {
    EXPECT_DOUBLE_EQ(f["combined"].get<double>(), f["drop"].get<double>() + f["perm"].get<double>());
  }
  EXPECT_TRUE(fs::exists(path("i/explanation.svg")));
}

TEST_F(CliTest, SynEvalMatchesLibrary) {
  const auto synth = path("synth.csv");
  data::save_csv(testkit::blobs(90, 3, 2, 2.5, 18), synth);
  ASSERT_EQ(run({"syn-eval", "--real", csv_, "--synth", synth, "--target", "target", "--n-trees", "20",
                 "--seed", "5", "--out", path("s")})
                .code,
            0);
  const auto j = read(path("s/fidelity.json"));
  data::LoadOptions opt;
  opt.target = "target";
  syneval::FidelityOptions fo;
  fo.forest.n_trees = 20;
  fo.seed = 5;
  const auto rep = syneval::fidelity_report(data::load_csv(csv_, opt), data::load_csv(synth, opt), fo);
  const auto lib = syneval::fidelity_to_json(rep);
  EXPECT_EQ(j["per_feature"], lib["per_feature"]);
  EXPECT_EQ(j["importance"], lib["importance"]);
  EXPECT_EQ(j["overall_verdict"], lib["overall_verdict"]);
  EXPECT_EQ(testkit::slurp(path("s/fidelity.csv")), syneval::fidelity_to_csv(rep));
}

TEST_F(CliTest, LlmGenerateWithMockTransport) {
  const auto ok = run({"llm-generate", "--mock", "--topic", "carbon emissions", "--out", path("g")});
  ASSERT_EQ(ok.code, 0) << ok.err;
  const auto ds = data::load_csv(path("g/dataset.csv"));
  EXPECT_EQ(ds.n_rows(), 10u);
  EXPECT_EQ(ds.X(0, 2), 5395532.0);
  const auto tr = read(path("g/transcript.json"));
  EXPECT_EQ(tr["transcript"]["parse_status"], "ok");
  EXPECT_EQ(tr["config_echo"]["mock"], true);
  EXPECT_EQ(tr["config_echo"]["rows"], 10);
  const auto bad = run({"llm-generate", "--mock", "--topic", "carbon emissions", "--rows", "3", "--out",
                        path("h")});
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(read(path("h/transcript.json"))["transcript"]["parse_status"], "ok");
  const auto chat = run({"llm-chat", "--mock", "--transcript", path("chat.json")}, "tell me about gdp\nquit\n");
  EXPECT_EQ(chat.code, 0);
  EXPECT_NE(chat.out.find("Norway"), std::string::npos);
  EXPECT_EQ(read(path("chat.json"))["messages"].size(), 2u);
}

TEST_F(CliTest, GanAugmentIsDeterministic) {
  const std::vector<std::string> base{"gan-augment", "--data", csv_, "--target", "target",
                                      "--gen-x-times", "1", "--epochs", "5", "--noise-dim", "4"};
  auto a = base;
  a.insert(a.end(), {"--out", path("ga")});
  auto b = base;
  b.insert(b.end(), {"--out", path("gb")});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  EXPECT_EQ(testkit::slurp(path("ga/generated.csv")), testkit::slurp(path("gb/generated.csv")));
  const auto aug = data::load_csv(path("ga/augmented.csv"));
  const auto gen = data::load_csv(path("ga/generated.csv"));
  EXPECT_EQ(aug.n_rows(), 90 + gen.n_rows());
  EXPECT_TRUE(read(path("ga/provenance.json")).is_object());
}
