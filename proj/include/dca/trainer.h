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

#ifndef DCA_TRAINER_H_
#define DCA_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "dca/config.h"
#include "dca/dataset.h"
#include "dca/metrics.h"
#include "dca/model.h"

namespace dca {

struct AdamState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::uint64_t step = 0;
};

// `config.variant` is the variant the parameters belong to.
struct Checkpoint {
  ExperimentConfig config;
  std::string config_hash;
  ModelParams params;
  AdamState adam;
  std::string rng_state;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<double> losses;  // mean batch loss per optimizer step
};

// Adam (beta1 0.9, beta2 0.999, eps 1e-8) over mini-batches of utterances
// reshuffled every epoch; a partial final batch is kept. Labels are the
// utterances' speaker_index. Throws training-diverged on a non-finite loss.
TrainResult Train(const ExperimentConfig& config,
                  const std::vector<Utterance>& data);

// Checks utterance dims against the checkpoint configuration.
UtteranceEmbedding EmbedUtterance(const Checkpoint& ckpt, const Utterance& utt);

// Cosine-scores every trial in order. Throws missing-utterance naming the
// first id without features. `threads` > 1 embeds utterances concurrently.
ScoreSet ScoreTrials(const Checkpoint& ckpt, const std::vector<Trial>& trials,
                     const std::vector<Utterance>& features,
                     std::size_t threads = 1);

// Serialized checkpoint container:
//   "DCAC" | u16 version | u32 len + config JSON | u32 len + config hash |
//   u64 step | u32 len + RNG state | u32 tensor count |
//   tensors (parameters, then Adam first moments, then second moments),
//   each as u32 rows | u32 cols | rows*cols f64.
// All integers and floats are little-endian.
std::string SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint DeserializeCheckpoint(const std::string& bytes);
void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::string& path);

}  // namespace dca

#endif  // DCA_TRAINER_H_
