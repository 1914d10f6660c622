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

// dca: synthesize data, train fusion models, score trials, compute
// verification metrics and run fusion ablations.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dca/config.h"
#include "dca/error.h"
#include "dca/experiment.h"
#include "dca/feature_io.h"
#include "dca/metrics.h"
#include "dca/synthdata.h"
#include "dca/trainer.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::size_t seeds = 0;
  std::vector<std::string> variants;
  bool quiet = false;
};

void Log(const Flags& flags, const std::string& message) {
  if (!flags.quiet) std::cerr << message << '\n';
}

dca::ExperimentConfig RequireConfig(const Flags& flags) {
  if (flags.config.empty()) {
    dca::Fail(dca::ErrorCode::kInvalidParameter, "--config is required");
  }
  return dca::LoadConfig(flags.config);
}

std::string OutDir(const Flags& flags, const dca::ExperimentConfig& config) {
  std::string out = flags.out.empty() ? config.output_dir : flags.out;
  if (out.empty()) {
    dca::Fail(dca::ErrorCode::kInvalidParameter,
              "--out (or output_dir in the config) is required");
  }
  fs::create_directories(out);
  return out;
}

int RunSynth(const Flags& flags) {
  const dca::ExperimentConfig config = RequireConfig(flags);
  const std::string out = OutDir(flags, config);
  dca::SynthDataset data = dca::Generate(config.MakeSynthSpec(config.seed));
  std::vector<dca::Utterance> train, eval;
  dca::SplitPerSpeaker(data.utterances, config.train_per_speaker, &train, &eval);

  fs::create_directories(fs::path(out) / "features");
  auto write_split = [&](const std::vector<dca::Utterance>& utts,
                         const std::string& name) {
    dca::Manifest manifest{config.d_a, config.d_v, config.clips, {}};
    for (const dca::Utterance& u : utts) {
      const std::string rel = "features/" + u.id + ".avf";
      dca::WriteAvf((fs::path(out) / rel).string(), u.audio, u.visual);
      manifest.entries.push_back({u.id, u.speaker_id, rel});
    }
    dca::WriteManifest((fs::path(out) / name).string(), manifest);
  };
  write_split(train, "train.tsv");
  write_split(eval, "eval.tsv");
  dca::WriteTrialFile((fs::path(out) / "trials.txt").string(),
                      dca::MakeTrials(eval, config.n_target_trials,
                                      config.n_nontarget_trials,
                                      dca::DeriveSeed(config.seed, 7)));
  std::ofstream notes(fs::path(out) / "annotations.tsv");
  notes << "utterance_id\tcorrupted\tmodality\n";
  for (const auto& a : data.annotations) {
    notes << a.utterance_id << '\t' << (a.corrupted ? 1 : 0) << '\t'
          << (a.modality ? (*a.modality == dca::Modality::kAudio ? "audio"
                                                                 : "visual")
                         : "-")
          << '\n';
  }
  Log(flags, "wrote " + std::to_string(data.utterances.size()) +
                 " utterances to " + out);
  return 0;
}

int RunTrain(const Flags& flags) {
  dca::ExperimentConfig config = RequireConfig(flags);
  if (!flags.variants.empty()) {
    config.variant = dca::ParseVariant(flags.variants.front());
  }
  const std::string out = OutDir(flags, config);
  const dca::RunData data = dca::PrepareRunData(config, config.seed);
  dca::TrainResult result = dca::Train(config, data.train);
  dca::SaveCheckpoint((fs::path(out) / "checkpoint.dcac").string(),
                      result.checkpoint);
  std::ofstream losses(fs::path(out) / "train_loss.txt");
  losses << std::setprecision(17);
  for (double l : result.losses) losses << l << '\n';
  std::ofstream(fs::path(out) / "config.json")
      << dca::ToJson(config).dump(2) << '\n';
  Log(flags, std::string("trained ") + dca::VariantName(config.variant) +
                 " for " + std::to_string(result.losses.size()) +
                 " steps, config hash " + result.checkpoint.config_hash);
  return 0;
}

int RunScore(const Flags& flags, const std::string& checkpoint,
             const std::string& manifest, const std::string& trials) {
  const dca::Checkpoint ckpt = dca::LoadCheckpoint(checkpoint);
  const dca::ScoreSet scores =
      dca::ScoreTrials(ckpt, dca::ReadTrialFile(trials),
                       dca::LoadUtterances(manifest), dca::ThreadsFromEnv());
  if (flags.out.empty() || flags.out == "-") {
    dca::WriteScores(std::cout, scores);
  } else {
    dca::WriteScoreFile(flags.out, scores);
  }
  return 0;
}

int RunMetrics(const std::string& score_file, const std::string& det_path) {
  const dca::ScoreSet scores = dca::ReadScoreFile(score_file);
  const dca::EerResult eer = dca::ComputeEer(scores);
  const dca::DcfResult dcf = dca::ComputeMinDcf(scores);
  char line[128];
  std::snprintf(line, sizeof line, "EER: %.4f%%\nminDCF: %.3f\n",
                100.0 * eer.eer, dcf.min_dcf);
  std::cout << line;
  if (!det_path.empty()) dca::WriteDetCsvFile(det_path, dca::DetCurve(scores));
  return 0;
}

int RunAblate(const Flags& flags) {
  const dca::ExperimentConfig config = RequireConfig(flags);
  dca::RunOptions options;
  options.seeds = flags.seeds;
  options.ladder = flags.variants;
  options.threads = dca::ThreadsFromEnv();
  options.quiet = flags.quiet;
  options.out_dir = OutDir(flags, config);
  const json report = dca::RunExperiment(config, options);
  if (!flags.quiet) {
    std::printf("%-16s %10s %10s\n", "fusion", "EER(%)", "minDCF");
    for (const json& e : report["entries"]) {
      std::printf("%-16s %10.3f %10.3f\n", e["name"].get<std::string>().c_str(),
                  e["eer_percent"]["mean"].get<double>(),
                  e["min_dcf"]["mean"].get<double>());
    }
  }
  return 0;
}

int RunGradcheck(const Flags& flags, std::size_t points) {
  std::vector<dca::Variant> variants;
  if (flags.variants.empty()) {
    variants = {dca::Variant::kConcat, dca::Variant::kSelfAttention,
                dca::Variant::kCa,     dca::Variant::kJca,
                dca::Variant::kCaDca,  dca::Variant::kJcaDca};
  } else {
    for (const std::string& v : flags.variants)
      variants.push_back(dca::ParseVariant(v));
  }
  constexpr double kTolerance = 1e-4;
  bool ok = true;
  for (const auto& r : dca::RunGradientSuite(variants, points, 0)) {
    const bool pass = r.max_error < kTolerance;
    ok = ok && pass;
    if (!flags.quiet || !pass) {
      std::printf("%-16s points=%zu max_rel_error=%.3e %s\n",
                  dca::VariantName(r.variant), r.points, r.max_error,
                  pass ? "ok" : "FAIL");
    }
  }
  return ok ? 0 : 1;
}

std::string OneLine(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic cross-attention audio-visual verification toolkit"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", flags.config, "Experiment config (JSON)");
    cmd->add_option("--out", flags.out, "Output directory or file");
    cmd->add_flag("--quiet", flags.quiet, "Suppress progress output");
  };

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  add_common(synth);

  CLI::App* train = app.add_subcommand("train", "Train one fusion model");
  add_common(train);
  train->add_option("--variant", flags.variants, "Fusion variant to train");

  std::string checkpoint, manifest, trials;
  CLI::App* score = app.add_subcommand("score", "Score a trial list");
  score->add_option("--checkpoint", checkpoint)->required();
  score->add_option("--manifest", manifest)->required();
  score->add_option("--trials", trials)->required();
  score->add_option("--out", flags.out, "Score file (default stdout)");
  score->add_flag("--quiet", flags.quiet);

  std::string score_file, det_path;
  CLI::App* metrics = app.add_subcommand("metrics", "EER and minDCF of a score file");
  metrics->add_option("scores", score_file, "Score file")->required();
  metrics->add_option("--det", det_path, "Write the DET curve as CSV");
  metrics->add_flag("--quiet", flags.quiet);

  CLI::App* ablate = app.add_subcommand("ablate", "Run the fusion ladder");
  add_common(ablate);
  ablate->add_option("--seeds", flags.seeds, "Number of seeds");
  ablate->add_option("--variant", flags.variants,
                     "Ladder entry (repeatable; default: full ladder)");

  std::size_t points = 20;
  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "Finite-difference check of every variant");
  gradcheck->add_option("--points", points, "Random points per variant");
  gradcheck->add_option("--variant", flags.variants, "Variant (repeatable)");
  gradcheck->add_flag("--quiet", flags.quiet);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return RunSynth(flags);
    if (*train) return RunTrain(flags);
    if (*score) return RunScore(flags, checkpoint, manifest, trials);
    if (*metrics) return RunMetrics(score_file, det_path);
    if (*ablate) return RunAblate(flags);
    if (*gradcheck) return RunGradcheck(flags, points);
  } catch (const dca::Error& e) {
    std::cerr << e.what() << '\n';
    std::cout << json{{"error", dca::ErrorCodeName(e.code())},
                      {"message", OneLine(e.what())}}
                     .dump()
              << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    std::cout << json{{"error", "internal"}, {"message", OneLine(e.what())}}
                     .dump()
              << '\n';
    return 3;
  }
  return 1;
}
