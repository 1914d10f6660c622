// Copyright (c) 2026 DCA Verification Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the dca executable end to end.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

#include "dca/experiment.h"
#include "test_util.h"

namespace dca {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int status;
  std::string out;
};

// Runs the CLI with stderr discarded; returns exit status and stdout.
Result RunCli(const std::string& args) {
  const std::string cmd = std::string(DCA_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 512> buf;
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string WriteText(const std::string& dir, const std::string& name,
                      const std::string& text) {
  const std::string path = dir + "/" + name;
  std::ofstream(path) << text;
  return path;
}

const char* kTinyConfig = R"({
  "n_speakers": 4, "utterances_per_speaker": 6, "train_per_speaker": 3,
  "d_a": 5, "d_v": 4, "clips": 4, "d_latent": 3, "epochs": 2,
  "batch_size": 4, "n_target_trials": 8, "n_nontarget_trials": 20,
  "seeds": 2, "corruption": {"prob": 0.3, "modality": "visual", "severity": 1.0}
})";

TEST(CliTest, MetricsHandCase) {
  const std::string dir = testing::TempDir("cli_metrics");
  const std::string f = WriteText(dir, "s.txt",
                                  "a x 1 0.9\nb x 1 0.8\nc x 1 0.3\n"
                                  "d x 0 0.7\ne x 0 0.2\nf x 0 0.1\n");
  const Result r = RunCli("metrics " + f + " --det " + dir + "/det.csv");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "EER: 33.3333%\nminDCF: 0.333\n");
  std::ifstream det(dir + "/det.csv");
  std::string header;
  std::getline(det, header);
  EXPECT_EQ(header, "threshold,far,frr");
}

TEST(CliTest, MetricsSeparable) {
  const std::string dir = testing::TempDir("cli_sep");
  const std::string f = WriteText(dir, "s.txt", "a x 1 0.9\nb x 0 0.1\n");
  EXPECT_EQ(RunCli("metrics " + f).out, "EER: 0.0000%\nminDCF: 0.000\n");
}

TEST(CliTest, MetricsEmptyFileIsStructuredError) {
  const std::string dir = testing::TempDir("cli_empty");
  const Result r = RunCli("metrics " + WriteText(dir, "s.txt", ""));
  EXPECT_NE(r.status, 0);
  const json err = json::parse(r.out);
  EXPECT_EQ(err["error"], "insufficient-trials");
  EXPECT_TRUE(err["message"].is_string());
}

TEST(CliTest, BadArguments) {
  EXPECT_NE(RunCli("").status, 0);
  EXPECT_NE(RunCli("frobnicate").status, 0);
  EXPECT_NE(RunCli("score --checkpoint x").status, 0);
  const Result r = RunCli("train --config /nonexistent.json --out /tmp/x");
  EXPECT_NE(r.status, 0);
  EXPECT_EQ(json::parse(r.out)["error"], "io");
}

TEST(CliTest, SynthTrainScoreMetrics) {
  const std::string dir = testing::TempDir("cli_pipeline");
  const std::string cfg = WriteText(dir, "cfg.json", kTinyConfig);
  ASSERT_EQ(RunCli("synth --quiet --config " + cfg + " --out " + dir + "/data").status, 0);
  for (const char* f : {"train.tsv", "eval.tsv", "trials.txt", "annotations.tsv"})
    EXPECT_TRUE(fs::exists(dir + "/data/" + f)) << f;
  ASSERT_EQ(RunCli("train --quiet --variant ca_dca --config " + cfg + " --out " + dir + "/model").status, 0);
  EXPECT_TRUE(fs::exists(dir + "/model/checkpoint.dcac"));
  EXPECT_TRUE(fs::exists(dir + "/model/train_loss.txt"));
  const Result score =
      RunCli("score --checkpoint " + dir + "/model/checkpoint.dcac --manifest " +
          dir + "/data/eval.tsv --trials " + dir + "/data/trials.txt --out " +
          dir + "/scores.txt");
  ASSERT_EQ(score.status, 0);
  const Result m = RunCli("metrics " + dir + "/scores.txt");
  EXPECT_EQ(m.status, 0);
  EXPECT_EQ(m.out.rfind("EER: ", 0), 0u);

  // A config that points at the written manifests trains on them.
  const std::string manifest_cfg = WriteText(
      dir, "manifest.json",
      R"({"d_a": 5, "d_v": 4, "clips": 4, "n_speakers": 4, "epochs": 1,
          "train_manifest": ")" + dir + R"(/data/train.tsv",
          "eval_manifest": ")" + dir + R"(/data/eval.tsv",
          "trials": ")" + dir + "/data/trials.txt\"}");
  EXPECT_EQ(RunCli("train --quiet --config " + manifest_cfg + " --out " + dir + "/m2").status, 0);
}

TEST(CliTest, AblateIsDeterministic) {
  const std::string dir = testing::TempDir("cli_ablate");
  const std::string cfg = WriteText(dir, "cfg.json", kTinyConfig);
  for (const char* run : {"a", "b"}) {
    ASSERT_EQ(RunCli("ablate --quiet --config " + cfg + " --variant ca --variant ca_dca --out " +
                  dir + "/" + run).status, 0);
  }
  std::ifstream a(dir + "/a/report.json"), b(dir + "/b/report.json");
  EXPECT_EQ(StripTimings(json::parse(a)).dump(), StripTimings(json::parse(b)).dump());
}

TEST(CliTest, Gradcheck) {
  const Result r = RunCli("gradcheck --points 2");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("jca_dca"), std::string::npos);
}

}  // namespace
}  // namespace dca
