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

#ifndef DCA_SYNTHDATA_H_
#define DCA_SYNTHDATA_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dca/dataset.h"

namespace dca {

enum class CorruptTarget { kAudio, kVisual, kEither };

const char* CorruptTargetName(CorruptTarget target);
CorruptTarget ParseCorruptTarget(const std::string& name);

// Gaussian latent-factor model: a speaker latent z ~ N(0, I) is mixed into
// each modality by a fixed map P with N(0, 1/d_latent) entries, so every
// clip is P z + noise_sigma * eps. A corrupted utterance keeps
// max(0, 1 - severity) of one modality's clean clips and adds
// severity * sigma_c * eps', where sigma_c is that modality's RMS clip scale.
struct SynthSpec {
  std::size_t n_speakers = 8;
  std::size_t utterances_per_speaker = 20;
  std::size_t d_latent = 8;
  std::size_t d_a = 16;
  std::size_t d_v = 12;
  std::size_t clips = 10;
  double noise_sigma = 1.0;
  double corrupt_prob = 0.0;
  CorruptTarget corrupt_modality = CorruptTarget::kVisual;
  double corrupt_severity = 1.0;
  std::uint64_t seed = 0;

  // Throws invalid-parameter.
  void Validate() const;
};

struct CorruptionAnnotation {
  std::string utterance_id;
  bool corrupted = false;
  std::optional<Modality> modality;
};

struct SynthDataset {
  std::vector<Utterance> utterances;
  std::vector<CorruptionAnnotation> annotations;
  std::vector<std::string> speakers;
};

// Clean features and corruption draws use separate streams derived from
// spec.seed, so corruption settings never change the clean features.
SynthDataset Generate(const SynthSpec& spec);

// Samples distinct same-speaker pairs as targets and cross-speaker pairs as
// nontargets without repeating a pair. Throws insufficient-data when more
// pairs are requested than exist.
std::vector<Trial> MakeTrials(const std::vector<Utterance>& utterances,
                              std::size_t n_target, std::size_t n_nontarget,
                              std::uint64_t seed);

// Splits each speaker's utterances: the first `per_speaker_train` (in
// dataset order) go to training, the rest to evaluation.
void SplitPerSpeaker(const std::vector<Utterance>& utterances,
                     std::size_t per_speaker_train,
                     std::vector<Utterance>* train,
                     std::vector<Utterance>* eval);

}  // namespace dca

#endif  // DCA_SYNTHDATA_H_
