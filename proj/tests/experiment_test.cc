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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include <gtest/gtest.h>

#include "dca/config.h"
#include "dca/error.h"
#include "dca/experiment.h"
#include "dca/metrics.h"
#include "test_util.h"

namespace dca {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no dca::Error thrown";
  return ErrorCode::kIo;
}

ExperimentConfig Tiny() {
  ExperimentConfig c;
  c.n_speakers = 4;
  c.utterances_per_speaker = 6;
  c.train_per_speaker = 3;
  c.d_a = 5;
  c.d_v = 4;
  c.clips = 4;
  c.d_latent = 3;
  c.epochs = 2;
  c.batch_size = 4;
  c.n_target_trials = 8;
  c.n_nontarget_trials = 20;
  c.seeds = 1;
  return c;
}

TEST(ExperimentTest, SingleEntrySmoke) {
  RunOptions opt;
  opt.ladder = {"concat"};
  const json report = RunExperiment(Tiny(), opt);
  EXPECT_EQ(report["format"], "dca-report");
  ASSERT_EQ(report["entries"].size(), 1u);
  const json& e = report["entries"][0];
  EXPECT_EQ(e["name"], "concat");
  ASSERT_EQ(e["runs"].size(), 1u);
  EXPECT_TRUE(std::isfinite(e["runs"][0]["eer"].get<double>()));
  EXPECT_TRUE(std::isfinite(e["runs"][0]["min_dcf"].get<double>()));
  EXPECT_EQ(e["runs"][0]["trials"], 28);
}

TEST(ExperimentTest, DeterministicModuloTimings) {
  RunOptions opt;
  opt.ladder = {"score_fusion", "ca", "ca_dca"};
  opt.seeds = 2;
  ExperimentConfig c = Tiny();
  c.corruption.prob = 0.3;
  const json a = RunExperiment(c, opt);
  opt.threads = 3;  // thread count must not leak into results
  const json b = RunExperiment(c, opt);
  EXPECT_EQ(StripTimings(a).dump(), StripTimings(b).dump());
  EXPECT_TRUE(a.contains("timings"));
  EXPECT_FALSE(StripTimings(a).contains("timings"));
}

TEST(ExperimentTest, WritesArtifacts) {
  const std::string dir = testing::TempDir("experiment");
  RunOptions opt;
  opt.ladder = {"ca"};
  opt.out_dir = dir;
  RunExperiment(Tiny(), opt);
  EXPECT_TRUE(fs::exists(dir + "/report.json"));
  EXPECT_TRUE(fs::exists(dir + "/config.json"));
  const ScoreSet s = ReadScoreFile(dir + "/scores/ca.seed0.txt");
  EXPECT_EQ(s.size(), 28u);
  EXPECT_TRUE(fs::exists(dir + "/det/ca.seed0.csv"));
  // The saved config reproduces the hash in the report.
  std::ifstream in(dir + "/report.json");
  const json report = json::parse(in);
  std::ifstream cfg(dir + "/config.json");
  EXPECT_EQ(ConfigHash(ConfigFromJson(json::parse(cfg))),
            report["config_hash"].get<std::string>());
}

TEST(ExperimentTest, DefaultLadderAndSeeds) {
  ExperimentConfig c = Tiny();
  c.seeds = 2;
  c.epochs = 1;
  const json report = RunExperiment(c, RunOptions{});
  EXPECT_EQ(report["seeds"], 2);
  std::vector<std::string> names;
  for (const json& e : report["entries"]) {
    names.push_back(e["name"]);
    EXPECT_EQ(e["runs"].size(), 2u);
  }
  EXPECT_EQ(names, DefaultLadder(c));
}

TEST(ExperimentTest, RejectsBadLadders) {
  RunOptions opt;
  opt.ladder = {"ca", "ca"};
  EXPECT_EQ(CodeOf([&] { RunExperiment(Tiny(), opt); }),
            ErrorCode::kInvalidParameter);
  opt.ladder = {"mystery"};
  EXPECT_EQ(CodeOf([&] { RunExperiment(Tiny(), opt); }),
            ErrorCode::kInvalidParameter);
  opt.ladder = {"jca"};  // needs d_a == d_v
  EXPECT_EQ(CodeOf([&] { RunExperiment(Tiny(), opt); }),
            ErrorCode::kInvalidParameter);
}

TEST(ExperimentTest, GradientSuiteSmall) {
  for (const GradSuiteEntry& e :
       RunGradientSuite({Variant::kCa, Variant::kJcaDca}, 3, 1)) {
    EXPECT_EQ(e.points, 3u);
    EXPECT_LT(e.max_error, 1e-4);
  }
}

}  // namespace
}  // namespace dca
