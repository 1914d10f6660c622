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

// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and
// benchmark settings are fixed here on purpose; configs/benchmark_*.json
// mirror the benchmark for use with the CLI.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dca/attention.h"
#include "dca/binary_io.h"
#include "dca/config.h"
#include "dca/error.h"
#include "dca/experiment.h"
#include "dca/feature_io.h"
#include "dca/metrics.h"
#include "dca/random.h"
#include "dca/synthdata.h"
#include "dca/trainer.h"
#include "metric_oracles.h"

namespace {

using dca::Matrix;
using dca::Rng;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kGradTolerance = 1e-4;
constexpr double kGradSeconds = 60.0;
constexpr std::size_t kGradPoints = 20;
constexpr double kSumTolerance = 1e-9;
constexpr double kReductionTolerance = 1e-9;
constexpr double kReductionGap = 10.0;
constexpr double kMetricTolerance = 1e-9;
constexpr double kTrainabilityFloor = 0.25;
constexpr double kDirectionalSeconds = 300.0;
constexpr double kCleanCeiling = 0.05;
constexpr double kCleanMaxGapPoints = 1.0;

int failures = 0;

void Report(bool pass, const std::string& name, const std::string& detail) {
  std::printf("%s  %-28s %s\n", pass ? "PASS" : "FAIL", name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Runs a check, turning unexpected exceptions into a failed line.
void Criterion(const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    Report(false, name, std::string("error: ") + e.what());
  }
}

dca::ExperimentConfig Benchmark(double corrupt_prob) {
  dca::ExperimentConfig c;
  c.n_speakers = 8;
  c.utterances_per_speaker = 20;
  c.d_latent = 8;
  c.d_a = 16;
  c.d_v = 12;
  c.clips = 10;
  c.seeds = 3;
  c.seed = 0;
  c.corruption.prob = corrupt_prob;
  c.corruption.modality = dca::CorruptTarget::kVisual;
  c.corruption.severity = 1.0;
  return c;
}

double MeanEer(const json& report, const std::string& name) {
  for (const json& e : report["entries"])
    if (e["name"] == name) return e["eer"]["mean"].get<double>();
  throw std::runtime_error("entry " + name + " missing from report");
}

void GradientSuite() {
  const auto start = std::chrono::steady_clock::now();
  const auto results = dca::RunGradientSuite(
      {dca::Variant::kConcat, dca::Variant::kSelfAttention, dca::Variant::kCa,
       dca::Variant::kJca, dca::Variant::kCaDca, dca::Variant::kJcaDca},
      kGradPoints, 0);
  const double secs = Seconds(start);
  double worst = 0.0;
  std::string detail;
  for (const auto& r : results) {
    worst = std::max(worst, r.max_error);
    detail += Fmt("%s=%.1e ", dca::VariantName(r.variant), r.max_error);
  }
  Report(worst < kGradTolerance && secs < kGradSeconds && results.size() == 6,
         "gradient_suite",
         Fmt("max rel err %.2e (< %.0e), %zu pts/variant, %.2fs (< %.0fs); ",
             worst, kGradTolerance, kGradPoints, secs, kGradSeconds) +
             detail);
}

void NormalizationSuite() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const std::size_t d_a = 1 + rng.UniformInt(16), d_v = 1 + rng.UniformInt(16);
    const std::size_t L = 1 + rng.UniformInt(12);
    const dca::FeatureSequence xa(dca::Modality::kAudio, rng.NormalMatrix(d_a, L, 2.0));
    const dca::FeatureSequence xv(dca::Modality::kVisual, rng.NormalMatrix(d_v, L, 2.0));
    dca::FusionParams p;
    p.variant = dca::Variant::kCaDca;
    p.w_cross = rng.NormalMatrix(d_a, d_v);
    p.w_gate_a = rng.NormalMatrix(d_a, 2);
    p.w_gate_v = rng.NormalMatrix(d_v, 2);
    const dca::CrossAttention ca = dca::CrossAttend(xa, xv, p);
    for (std::size_t j = 0; j < L; ++j) {
      double col = 0.0, row = 0.0;
      for (std::size_t i = 0; i < L; ++i) {
        col += ca.maps.a_audio(i, j);
        row += ca.maps.a_visual(j, i);
      }
      worst = std::max({worst, std::abs(col - 1.0), std::abs(row - 1.0)});
    }
    for (const auto& [x, att, w] :
         {std::tuple{&xa, &ca.att_a, &*p.w_gate_a},
          std::tuple{&xv, &ca.att_v, &*p.w_gate_v}}) {
      const dca::GatedFeatures g = dca::DynamicGate(*x, *att, *w, p.temperature);
      for (std::size_t l = 0; l < L; ++l)
        worst = std::max(worst, std::abs(g.scores.g(l, 0) + g.scores.g(l, 1) - 1.0));
    }
  }
  Report(worst <= kSumTolerance, "normalization",
         Fmt("100 instances, max |sum-1| = %.1e (<= %.0e)", worst, kSumTolerance));
}

void ReductionTest() {
  double worst = 0.0, min_gap = INFINITY;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const std::size_t d_a = 2 + rng.UniformInt(8), d_v = 2 + rng.UniformInt(8);
    const std::size_t L = 1 + rng.UniformInt(10);
    Matrix a = rng.NormalMatrix(d_a, L), v = rng.NormalMatrix(d_v, L);
    // A constant feature row stays positive through tanh, so one gate weight
    // sets the logit gap for every clip.
    for (std::size_t l = 0; l < L; ++l) a(0, l) = v(0, l) = 2.0;
    const dca::FeatureSequence xa(dca::Modality::kAudio, a);
    const dca::FeatureSequence xv(dca::Modality::kVisual, v);
    dca::FusionParams p;
    p.variant = dca::Variant::kCaDca;
    p.w_cross = rng.NormalMatrix(d_a, d_v, 0.5);
    const dca::CrossAttention ca = dca::CrossAttend(xa, xv, p);
    auto saturating = [&](const Matrix& att) {
      double lo = INFINITY;
      for (std::size_t l = 0; l < L; ++l) lo = std::min(lo, att(0, l));
      Matrix w(att.rows(), 2, 0.0);
      w(0, 1) = kReductionGap / lo;
      return w;
    };
    p.w_gate_a = saturating(ca.att_a.data());
    p.w_gate_v = saturating(ca.att_v.data());
    for (const auto& [x, att, w] :
         {std::tuple{&xa, &ca.att_a, &*p.w_gate_a},
          std::tuple{&xv, &ca.att_v, &*p.w_gate_v}}) {
      const Matrix logits = dca::MatMul(dca::Transpose(att->data()), *w);
      for (std::size_t l = 0; l < L; ++l)
        min_gap = std::min(min_gap, logits(l, 1) - logits(l, 0));
    }
    const auto [ga, gv] = dca::DcaFuse(xa, xv, p);
    worst = std::max({worst, dca::MaxAbsDiff(ga.data(), dca::Relu(ca.att_a.data())),
                      dca::MaxAbsDiff(gv.data(), dca::Relu(ca.att_v.data()))});
  }
  Report(worst <= kReductionTolerance && min_gap >= kReductionGap - 1e-9,
         "dca_to_ca_reduction",
         Fmt("100 instances, logit gap >= %.2f, T=0.1, max diff %.1e (<= %.0e)",
             min_gap, worst, kReductionTolerance));
}

dca::ScoreSet RandomScoreSet(Rng& rng, std::size_t n, bool ties) {
  std::vector<dca::TrialScore> trials;
  for (std::size_t i = 0; i < n; ++i) {
    const bool target = i == 0 || (i > 1 && rng.Bernoulli(0.3));
    double score = rng.Normal() + (target ? 1.5 : 0.0);
    if (ties) score = std::round(score * 4.0) / 4.0;
    trials.push_back({"e" + std::to_string(i), "t",
                      target ? dca::TrialLabel::kTarget : dca::TrialLabel::kNontarget,
                      score});
  }
  return dca::ScoreSet(std::move(trials));
}

void MetricOracles() {
  double worst_eer = 0.0, worst_dcf = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const dca::ScoreSet s = RandomScoreSet(rng, 200, seed % 2 == 1);
    worst_eer = std::max(worst_eer,
                         std::abs(dca::ComputeEer(s).eer - dca::testing::OracleEer(s)));
    worst_dcf = std::max(worst_dcf, std::abs(dca::ComputeMinDcf(s).min_dcf -
                                             dca::testing::OracleMinDcf(s)));
  }
  std::vector<dca::TrialScore> hand;
  const double t[] = {0.9, 0.8, 0.3}, n[] = {0.7, 0.2, 0.1};
  for (int i = 0; i < 3; ++i) {
    hand.push_back({"t" + std::to_string(i), "x", dca::TrialLabel::kTarget, t[i]});
    hand.push_back({"n" + std::to_string(i), "x", dca::TrialLabel::kNontarget, n[i]});
  }
  const dca::ScoreSet h(hand);
  const double eer = dca::ComputeEer(h).eer, dcf = dca::ComputeMinDcf(h).min_dcf;
  const bool hand_ok = eer == 1.0 / 3.0 && dcf == 1.0 / 3.0;
  Report(worst_eer <= kMetricTolerance && worst_dcf <= kMetricTolerance && hand_ok,
         "metric_oracles",
         Fmt("100 sets x 200 trials: max |dEER| %.1e, max |dDCF| %.1e (<= %.0e); "
             "hand case EER %.17g minDCF %.17g",
             worst_eer, worst_dcf, kMetricTolerance, eer, dcf));
}

void Directional() {
  const auto start = std::chrono::steady_clock::now();
  dca::RunOptions opt;
  opt.ladder = {"ca", "ca_dca"};
  opt.threads = dca::ThreadsFromEnv();
  const json report = dca::RunExperiment(Benchmark(0.3), opt);
  const double secs = Seconds(start);
  const double ca = MeanEer(report, "ca"), dca_eer = MeanEer(report, "ca_dca");
  Report(dca_eer <= ca && ca <= kTrainabilityFloor &&
             dca_eer <= kTrainabilityFloor && secs < kDirectionalSeconds,
         "directional_ca_vs_ca_dca",
         Fmt("corrupt 0.3 visual sev 1.0, 3 seeds: mean EER ca %.2f%%, ca_dca "
             "%.2f%% (need ca_dca <= ca, both <= %.0f%%), %.1fs (< %.0fs)",
             100 * ca, 100 * dca_eer, 100 * kTrainabilityFloor, secs,
             kDirectionalSeconds));
}

void CorruptionFree() {
  dca::RunOptions opt;
  opt.threads = dca::ThreadsFromEnv();
  opt.ladder = {"score_fusion", "concat", "self_attention", "ca", "ca_dca"};
  const json mixed = dca::RunExperiment(Benchmark(0.0), opt);
  // Joint attention needs equal modality dims; run it at d_a = d_v = 12.
  dca::ExperimentConfig square = Benchmark(0.0);
  square.d_a = 12;
  opt.ladder = {"jca", "jca_dca"};
  const json joint = dca::RunExperiment(square, opt);
  double worst = 0.0;
  std::string detail;
  for (const json* r : {&mixed, &joint}) {
    for (const json& e : (*r)["entries"]) {
      const double m = e["eer"]["mean"].get<double>();
      worst = std::max(worst, m);
      detail += Fmt("%s %.2f%% ", e["name"].get<std::string>().c_str(), 100 * m);
    }
  }
  const double gap = 100.0 * (MeanEer(mixed, "ca_dca") - MeanEer(mixed, "ca"));
  Report(worst <= kCleanCeiling && gap <= kCleanMaxGapPoints,
         "corruption_free_sanity",
         Fmt("worst mean EER %.2f%% (<= %.0f%%), ca_dca - ca = %+.2f pts (<= %.0f); ",
             100 * worst, 100 * kCleanCeiling, gap, kCleanMaxGapPoints) +
             detail);
}

int RunCli(const std::string& args) {
  const std::string cmd = std::string(DCA_CLI) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

void Determinism() {
  const fs::path dir = fs::temp_directory_path() / "dca_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << dca::ToJson(Benchmark(0.3)).dump(2);
  for (const char* run : {"a", "b"}) {
    if (RunCli("ablate --quiet --config " + (dir / "config.json").string() +
               " --out " + (dir / run).string()) != 0) {
      Report(false, "ablate_determinism", "ablate exited with an error");
      return;
    }
  }
  auto load = [&](const char* run) {
    std::ifstream in(dir / run / "report.json");
    return json::parse(in);
  };
  const json a = load("a"), b = load("b");
  bool same = dca::StripTimings(a).dump() == dca::StripTimings(b).dump();
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir / "a")) {
    if (!entry.is_regular_file() || entry.path().filename() == "report.json") continue;
    const fs::path other = dir / "b" / fs::relative(entry.path(), dir / "a");
    same = same && fs::exists(other) &&
           dca::ReadFileBytes(entry.path().string()) ==
               dca::ReadFileBytes(other.string());
    ++files;
  }
  Report(same, "ablate_determinism",
         Fmt("full ladder x 3 seeds twice: reports equal modulo timings, %zu "
             "score/DET/config files byte-identical",
             files));
}

void RoundTrips() {
  bool avf_ok = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const std::size_t d_a = 1 + rng.UniformInt(32), d_v = 1 + rng.UniformInt(32);
    const std::size_t L = 1 + rng.UniformInt(16);
    const dca::FeatureSequence a(dca::Modality::kAudio, rng.NormalMatrix(d_a, L));
    const dca::FeatureSequence v(dca::Modality::kVisual, rng.NormalMatrix(d_v, L));
    const std::string bytes = dca::EncodeAvf(a, v);
    const dca::FeaturePair back = dca::DecodeAvf(bytes);
    for (std::size_t i = 0; i < a.data().size(); ++i)
      avf_ok &= back.first.data().data()[i] ==
                static_cast<double>(static_cast<float>(a.data().data()[i]));
    for (std::size_t i = 0; i < v.data().size(); ++i)
      avf_ok &= back.second.data().data()[i] ==
                static_cast<double>(static_cast<float>(v.data().data()[i]));
    avf_ok &= dca::EncodeAvf(back.first, back.second) == bytes;
  }

  dca::ExperimentConfig c = Benchmark(0.3);
  c.epochs = 2;
  const dca::RunData data = dca::PrepareRunData(c, c.seed);
  const dca::Checkpoint ckpt = dca::Train(c, data.train).checkpoint;
  const fs::path path = fs::temp_directory_path() / "dca_acceptance.dcac";
  dca::SaveCheckpoint(path.string(), ckpt);
  const dca::Checkpoint back = dca::LoadCheckpoint(path.string());
  bool ckpt_ok = dca::SerializeCheckpoint(back) == dca::SerializeCheckpoint(ckpt) &&
                 dca::ReadFileBytes(path.string()) == dca::SerializeCheckpoint(ckpt);
  const dca::ScoreSet s1 = dca::ScoreTrials(ckpt, data.trials, data.eval);
  const dca::ScoreSet s2 = dca::ScoreTrials(back, data.trials, data.eval);
  for (std::size_t i = 0; i < s1.size(); ++i)
    ckpt_ok &= s1.trials()[i].score == s2.trials()[i].score;
  Report(avf_ok && ckpt_ok, "round_trips",
         Fmt("AVF1 50 pairs exact at f32: %s; checkpoint bytes and scores "
             "identical after reload: %s",
             avf_ok ? "yes" : "no", ckpt_ok ? "yes" : "no"));
}

}  // namespace

int main() {
  Criterion("gradient_suite", GradientSuite);
  Criterion("normalization", NormalizationSuite);
  Criterion("dca_to_ca_reduction", ReductionTest);
  Criterion("metric_oracles", MetricOracles);
  Criterion("directional_ca_vs_ca_dca", Directional);
  Criterion("corruption_free_sanity", CorruptionFree);
  Criterion("ablate_determinism", Determinism);
  Criterion("round_trips", RoundTrips);
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
