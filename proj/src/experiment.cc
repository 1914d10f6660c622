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

#include "dca/experiment.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include "dca/error.h"
#include "dca/feature_io.h"
#include "dca/metrics.h"
#include "dca/model.h"
#include "dca/random.h"
#include "dca/synthdata.h"
#include "dca/trainer.h"

namespace dca {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTrialStream = 7;

struct RunOutcome {
  ScoreSet scores;
  EerResult eer{};
  DcfResult dcf{};
  std::optional<double> final_loss;
  double seconds = 0.0;
};

struct Job {
  std::size_t entry;
  std::size_t seed_index;
};

ScoreSet TrainAndScore(const ExperimentConfig& config, Variant variant,
                       const RunData& data, std::optional<double>* final_loss) {
  ExperimentConfig run = config;
  run.variant = variant;
  TrainResult trained = Train(run, data.train);
  if (final_loss != nullptr && !trained.losses.empty()) {
    *final_loss = trained.losses.back();
  }
  return ScoreTrials(trained.checkpoint, data.trials, data.eval);
}

RunOutcome RunEntry(const ExperimentConfig& config, const std::string& entry,
                    const RunData& data) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  if (entry == "score_fusion") {
    ScoreSet audio = TrainAndScore(config, Variant::kAudioOnly, data, nullptr);
    ScoreSet visual = TrainAndScore(config, Variant::kVisualOnly, data, nullptr);
    out.scores = FuseScores(audio, visual, config.score_fusion_weight);
  } else {
    out.scores =
        TrainAndScore(config, ParseVariant(entry), data, &out.final_loss);
  }
  out.eer = ComputeEer(out.scores);
  out.dcf = ComputeMinDcf(out.scores);
  out.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return out;
}

json Summary(const std::vector<double>& values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= double(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double stddev =
      values.size() > 1 ? std::sqrt(var / double(values.size() - 1)) : 0.0;
  return json{{"mean", mean}, {"std", stddev}};
}

}  // namespace

RunData PrepareRunData(const ExperimentConfig& config, std::uint64_t run_seed) {
  RunData data;
  if (!config.synthetic()) {
    data.train = LoadUtterances(config.train_manifest);
    data.eval = LoadUtterances(config.eval_manifest);
    data.trials = ReadTrialFile(config.trials);
    return data;
  }
  SynthDataset synth = Generate(config.MakeSynthSpec(run_seed));
  SplitPerSpeaker(synth.utterances, config.train_per_speaker, &data.train,
                  &data.eval);
  data.trials = MakeTrials(data.eval, config.n_target_trials,
                           config.n_nontarget_trials,
                           DeriveSeed(run_seed, kTrialStream));
  return data;
}

json RunExperiment(const ExperimentConfig& config, const RunOptions& options) {
  config.Validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> ladder = options.ladder;
  if (ladder.empty()) ladder = config.variants;
  if (ladder.empty()) ladder = DefaultLadder(config);
  std::set<std::string> listed;
  for (const std::string& name : ladder) {
    if (name != "score_fusion") ParseVariant(name);
    if (!listed.insert(name).second) {
      Fail(ErrorCode::kInvalidParameter, "ladder entry '" + name + "' listed twice");
    }
  }
  const std::size_t seeds = options.seeds > 0 ? options.seeds : config.seeds;

  std::vector<RunData> data;
  for (std::size_t k = 0; k < seeds; ++k) {
    data.push_back(PrepareRunData(config, config.seed + k));
  }

  std::vector<Job> jobs;
  for (std::size_t e = 0; e < ladder.size(); ++e)
    for (std::size_t k = 0; k < seeds; ++k) jobs.push_back({e, k});
  std::vector<RunOutcome> outcomes(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j; (j = next++) < jobs.size();) {
      ExperimentConfig run = config;
      run.seed = config.seed + jobs[j].seed_index;
      try {
        outcomes[j] = RunEntry(run, ladder[jobs[j].entry],
                               data[jobs[j].seed_index]);
        if (!options.quiet) {
          std::cerr << "[ablate] " << ladder[jobs[j].entry] << " seed "
                    << run.seed << ": EER "
                    << 100.0 * outcomes[j].eer.eer << "% minDCF "
                    << outcomes[j].dcf.min_dcf << '\n';
        }
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, options.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, jobs.size()); ++t)
      pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const bool write = !options.out_dir.empty();
  namespace fs = std::filesystem;
  if (write) {
    fs::create_directories(fs::path(options.out_dir) / "scores");
    fs::create_directories(fs::path(options.out_dir) / "det");
  }

  json entries = json::array();
  for (std::size_t e = 0; e < ladder.size(); ++e) {
    json runs = json::array();
    std::vector<double> eers, dcfs;
    double wall = 0.0;
    for (std::size_t k = 0; k < seeds; ++k) {
      const RunOutcome& o = outcomes[e * seeds + k];
      const std::uint64_t seed = config.seed + k;
      json run{{"seed", seed},
               {"eer", o.eer.eer},
               {"eer_percent", 100.0 * o.eer.eer},
               {"eer_threshold", o.eer.threshold},
               {"min_dcf", o.dcf.min_dcf},
               {"min_dcf_threshold", o.dcf.threshold},
               {"trials", o.scores.size()},
               {"wall_seconds", o.seconds}};
      if (o.final_loss) run["final_train_loss"] = *o.final_loss;
      runs.push_back(std::move(run));
      eers.push_back(o.eer.eer);
      dcfs.push_back(o.dcf.min_dcf);
      wall += o.seconds;
      if (write) {
        const std::string stem = ladder[e] + ".seed" + std::to_string(seed);
        WriteScoreFile((fs::path(options.out_dir) / "scores" / (stem + ".txt")).string(),
                       o.scores);
        WriteDetCsvFile((fs::path(options.out_dir) / "det" / (stem + ".csv")).string(),
                        DetCurve(o.scores));
      }
    }
    json eer = Summary(eers);
    json eer_percent{{"mean", 100.0 * eer["mean"].get<double>()},
                     {"std", 100.0 * eer["std"].get<double>()}};
    entries.push_back(json{{"name", ladder[e]},
                           {"runs", std::move(runs)},
                           {"eer", std::move(eer)},
                           {"eer_percent", std::move(eer_percent)},
                           {"min_dcf", Summary(dcfs)},
                           {"wall_seconds", wall}});
  }

  json report{{"format", "dca-report"},
              {"version", 1},
              {"config", ToJson(config)},
              {"config_hash", ConfigHash(config)},
              {"seeds", seeds},
              {"entries", std::move(entries)}};
  report["timings"] = {
      {"total_seconds", std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count()},
      {"threads", threads}};
  if (write) {
    std::ofstream(fs::path(options.out_dir) / "report.json")
        << report.dump(2) << '\n';
    std::ofstream(fs::path(options.out_dir) / "config.json")
        << ToJson(config).dump(2) << '\n';
  }
  return report;
}

json StripTimings(const json& report) {
  if (report.is_object()) {
    json out = json::object();
    for (const auto& [key, value] : report.items()) {
      if (key == "wall_seconds" || key == "timings") continue;
      out[key] = StripTimings(value);
    }
    return out;
  }
  if (report.is_array()) {
    json out = json::array();
    for (const json& v : report) out.push_back(StripTimings(v));
    return out;
  }
  return report;
}

std::size_t ThreadsFromEnv() {
  const char* env = std::getenv("DCA_THREADS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  return (end != env && n > 0) ? static_cast<std::size_t>(n) : 1;
}

std::vector<GradSuiteEntry> RunGradientSuite(const std::vector<Variant>& variants,
                                             std::size_t points,
                                             std::uint64_t seed) {
  std::vector<GradSuiteEntry> results;
  for (Variant variant : variants) {
    GradSuiteEntry entry{variant, points, 0.0};
    Rng rng(DeriveSeed(seed, static_cast<std::uint64_t>(variant)));
    ModelShape shape;
    shape.variant = variant;
    shape.d_a = 4;
    shape.d_v = 4;
    shape.n_speakers = 3;
    for (std::size_t p = 0; p < points; ++p) {
      ModelParams params = InitModel(shape, rng);
      Utterance utt{"probe", "spk", rng.UniformInt(shape.n_speakers),
                    FeatureSequence(Modality::kAudio, rng.NormalMatrix(4, 3)),
                    FeatureSequence(Modality::kVisual, rng.NormalMatrix(4, 3))};
      entry.max_error = std::max(entry.max_error, ModelGradCheck(params, utt));
    }
    results.push_back(entry);
  }
  return results;
}

}  // namespace dca
