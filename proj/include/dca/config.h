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

#ifndef DCA_CONFIG_H_
#define DCA_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "dca/attention.h"
#include "dca/synthdata.h"

namespace dca {

enum class PoolingMode {
  kJoint,        // one ASP over the row-concatenated fused sequence
  kPerModality,  // one ASP per modality, embeddings concatenated
};

const char* PoolingModeName(PoolingMode mode);
PoolingMode ParsePoolingMode(const std::string& name);
const char* AvNormalizationName(AvNormalization mode);
AvNormalization ParseAvNormalization(const std::string& name);

struct CorruptionConfig {
  double prob = 0.0;
  CorruptTarget modality = CorruptTarget::kVisual;
  double severity = 1.0;
};

// Everything needed to reproduce one experiment. With no manifests set,
// data is synthesized from the synthetic-data fields and `seed`.
struct ExperimentConfig {
  Variant variant = Variant::kCaDca;   // trained by `train`
  std::vector<std::string> variants;  // ladder run by `ablate`; empty = all

  std::size_t d_a = 16;
  std::size_t d_v = 12;
  std::size_t clips = 10;
  std::size_t n_speakers = 8;

  double learning_rate = 1e-3;
  std::string lr_schedule = "constant";
  std::size_t batch_size = 16;
  std::size_t epochs = 30;
  double temperature = 0.1;
  double aam_scale = 30.0;
  double aam_margin = 0.2;
  AvNormalization av_normalization = AvNormalization::kPrinted;
  PoolingMode pooling = PoolingMode::kJoint;
  double score_fusion_weight = 0.5;

  std::uint64_t seed = 0;
  std::size_t seeds = 3;

  CorruptionConfig corruption;
  std::size_t utterances_per_speaker = 20;
  std::size_t d_latent = 8;
  double noise_sigma = 1.0;
  std::size_t train_per_speaker = 10;
  std::size_t n_target_trials = 300;
  std::size_t n_nontarget_trials = 1000;

  std::string train_manifest;
  std::string eval_manifest;
  std::string trials;
  std::string output_dir;

  // Throws invalid-parameter.
  void Validate() const;
  bool synthetic() const { return train_manifest.empty(); }
  SynthSpec MakeSynthSpec(std::uint64_t data_seed) const;
};

nlohmann::json ToJson(const ExperimentConfig& config);
// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig ConfigFromJson(const nlohmann::json& j);
ExperimentConfig LoadConfig(const std::string& path);
// Hex FNV-1a 64 of the canonical JSON serialization.
std::string ConfigHash(const ExperimentConfig& config);

// The Table-1 style ladder: score-level fusion, then every fusion variant
// (joint variants only when d_a == d_v).
std::vector<std::string> DefaultLadder(const ExperimentConfig& config);

}  // namespace dca

#endif  // DCA_CONFIG_H_
