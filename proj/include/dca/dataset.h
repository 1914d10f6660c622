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

#ifndef DCA_DATASET_H_
#define DCA_DATASET_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "dca/attention.h"
#include "dca/metrics.h"

namespace dca {

// One audio-visual recording as L clip-level feature pairs.
struct Utterance {
  std::string id;
  std::string speaker_id;
  std::size_t speaker_index = 0;
  FeatureSequence audio;
  FeatureSequence visual;
};

struct Trial {
  std::string enroll_id;
  std::string test_id;
  TrialLabel label = TrialLabel::kNontarget;
};

// Trial list lines: "<enroll_id> <test_id> <0|1>".
std::vector<Trial> ParseTrials(std::istream& in);
std::vector<Trial> ReadTrialFile(const std::string& path);
void WriteTrialFile(const std::string& path, const std::vector<Trial>& trials);

// Maps speaker ids to dense indices in order of first appearance and
// rewrites each utterance's speaker_index accordingly. Returns the ids.
std::vector<std::string> IndexSpeakers(std::vector<Utterance>& utterances);

}  // namespace dca

#endif  // DCA_DATASET_H_
