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

#include "dca/config.h"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "dca/error.h"

namespace dca {

using nlohmann::json;

const char* PoolingModeName(PoolingMode mode) {
  return mode == PoolingMode::kJoint ? "joint" : "per_modality";
}

PoolingMode ParsePoolingMode(const std::string& name) {
  if (name == "joint") return PoolingMode::kJoint;
  if (name == "per_modality") return PoolingMode::kPerModality;
  Fail(ErrorCode::kInvalidParameter, "unknown pooling mode '" + name + "'");
}

const char* AvNormalizationName(AvNormalization mode) {
  return mode == AvNormalization::kPrinted ? "printed" : "columnwise";
}

AvNormalization ParseAvNormalization(const std::string& name) {
  if (name == "printed") return AvNormalization::kPrinted;
  if (name == "columnwise") return AvNormalization::kColumnwise;
  Fail(ErrorCode::kInvalidParameter,
       "unknown av_normalization '" + name + "'");
}

void ExperimentConfig::Validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) Fail(ErrorCode::kInvalidParameter, "config: " + what);
  };
  require(d_a > 0 && d_v > 0 && clips > 0, "d_a, d_v and clips must be positive");
  require(n_speakers > 0, "n_speakers must be positive");
  require(learning_rate > 0.0 && std::isfinite(learning_rate),
          "learning_rate must be positive");
  require(lr_schedule == "constant", "only the constant lr_schedule exists");
  require(batch_size > 0, "batch_size must be positive");
  require(temperature > 0.0 && std::isfinite(temperature),
          "temperature must be positive");
  require(aam_scale > 0.0, "aam_scale must be positive");
  require(aam_margin >= 0.0 && aam_margin <= 0.5, "aam_margin must lie in [0, 0.5]");
  require(score_fusion_weight >= 0.0 && score_fusion_weight <= 1.0,
          "score_fusion_weight must lie in [0, 1]");
  require(seeds > 0, "seeds must be positive");
  require(corruption.prob >= 0.0 && corruption.prob <= 1.0,
          "corruption.prob must lie in [0, 1]");
  require(corruption.severity >= 0.0, "corruption.severity must be >= 0");
  require(utterances_per_speaker > 0 && d_latent > 0,
          "synthetic sizes must be positive");
  require(noise_sigma >= 0.0, "noise_sigma must be >= 0");
  require(synthetic() || (!eval_manifest.empty() && !trials.empty()),
          "train_manifest needs eval_manifest and trials");
  if (synthetic()) {
    require(train_per_speaker > 0 && train_per_speaker < utterances_per_speaker,
            "train_per_speaker must leave utterances for evaluation");
  }
  std::set<std::string> seen;
  for (const std::string& name : variants) {
    if (name != "score_fusion") ParseVariant(name);
    require(seen.insert(name).second, "variant '" + name + "' listed twice");
  }
}

SynthSpec ExperimentConfig::MakeSynthSpec(std::uint64_t data_seed) const {
  SynthSpec spec;
  spec.n_speakers = n_speakers;
  spec.utterances_per_speaker = utterances_per_speaker;
  spec.d_latent = d_latent;
  spec.d_a = d_a;
  spec.d_v = d_v;
  spec.clips = clips;
  spec.noise_sigma = noise_sigma;
  spec.corrupt_prob = corruption.prob;
  spec.corrupt_modality = corruption.modality;
  spec.corrupt_severity = corruption.severity;
  spec.seed = data_seed;
  return spec;
}

json ToJson(const ExperimentConfig& c) {
  return json{
      {"variant", VariantName(c.variant)},
      {"variants", c.variants},
      {"d_a", c.d_a},
      {"d_v", c.d_v},
      {"clips", c.clips},
      {"n_speakers", c.n_speakers},
      {"learning_rate", c.learning_rate},
      {"lr_schedule", c.lr_schedule},
      {"batch_size", c.batch_size},
      {"epochs", c.epochs},
      {"temperature", c.temperature},
      {"aam_scale", c.aam_scale},
      {"aam_margin", c.aam_margin},
      {"av_normalization", AvNormalizationName(c.av_normalization)},
      {"pooling", PoolingModeName(c.pooling)},
      {"score_fusion_weight", c.score_fusion_weight},
      {"seed", c.seed},
      {"seeds", c.seeds},
      {"corruption",
       {{"prob", c.corruption.prob},
        {"modality", CorruptTargetName(c.corruption.modality)},
        {"severity", c.corruption.severity}}},
      {"utterances_per_speaker", c.utterances_per_speaker},
      {"d_latent", c.d_latent},
      {"noise_sigma", c.noise_sigma},
      {"train_per_speaker", c.train_per_speaker},
      {"n_target_trials", c.n_target_trials},
      {"n_nontarget_trials", c.n_nontarget_trials},
      {"train_manifest", c.train_manifest},
      {"eval_manifest", c.eval_manifest},
      {"trials", c.trials},
      {"output_dir", c.output_dir},
  };
}

ExperimentConfig ConfigFromJson(const json& j) {
  if (!j.is_object()) Fail(ErrorCode::kParse, "config must be a JSON object");
  ExperimentConfig c;
  const json defaults = ToJson(c);
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) {
      Fail(ErrorCode::kParse, "config: unknown key '" + key + "'");
    }
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    if (j.contains("variant")) c.variant = ParseVariant(j.at("variant"));
    get("variants", c.variants);
    get("d_a", c.d_a);
    get("d_v", c.d_v);
    get("clips", c.clips);
    get("n_speakers", c.n_speakers);
    get("learning_rate", c.learning_rate);
    get("lr_schedule", c.lr_schedule);
    get("batch_size", c.batch_size);
    get("epochs", c.epochs);
    get("temperature", c.temperature);
    get("aam_scale", c.aam_scale);
    get("aam_margin", c.aam_margin);
    if (j.contains("av_normalization"))
      c.av_normalization = ParseAvNormalization(j.at("av_normalization"));
    if (j.contains("pooling")) c.pooling = ParsePoolingMode(j.at("pooling"));
    get("score_fusion_weight", c.score_fusion_weight);
    get("seed", c.seed);
    get("seeds", c.seeds);
    if (j.contains("corruption")) {
      const json& cj = j.at("corruption");
      for (const auto& [key, value] : cj.items()) {
        if (key != "prob" && key != "modality" && key != "severity") {
          Fail(ErrorCode::kParse, "config: unknown key 'corruption." + key + "'");
        }
      }
      if (cj.contains("prob")) cj.at("prob").get_to(c.corruption.prob);
      if (cj.contains("modality"))
        c.corruption.modality = ParseCorruptTarget(cj.at("modality"));
      if (cj.contains("severity")) cj.at("severity").get_to(c.corruption.severity);
    }
    get("utterances_per_speaker", c.utterances_per_speaker);
    get("d_latent", c.d_latent);
    get("noise_sigma", c.noise_sigma);
    get("train_per_speaker", c.train_per_speaker);
    get("n_target_trials", c.n_target_trials);
    get("n_nontarget_trials", c.n_nontarget_trials);
    get("train_manifest", c.train_manifest);
    get("eval_manifest", c.eval_manifest);
    get("trials", c.trials);
    get("output_dir", c.output_dir);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  c.Validate();
  return c;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, path + ": " + e.what());
  }
  return ConfigFromJson(j);
}

std::string ConfigHash(const ExperimentConfig& config) {
  const std::string text = ToJson(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::vector<std::string> DefaultLadder(const ExperimentConfig& config) {
  std::vector<std::string> ladder = {"score_fusion", "concat", "self_attention",
                                     "ca"};
  if (config.d_a == config.d_v) ladder.push_back("jca");
  ladder.push_back("ca_dca");
  if (config.d_a == config.d_v) ladder.push_back("jca_dca");
  return ladder;
}

}  // namespace dca
