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

#ifndef DCA_FEATURE_IO_H_
#define DCA_FEATURE_IO_H_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dca/attention.h"
#include "dca/dataset.h"

namespace dca {

// AVF1 feature file:
//   "AVF1" | u16 version (1) | u32 d_a | u32 d_v | u32 L |
//   d_a*L f32 audio values | d_v*L f32 visual values
// Little-endian; each matrix is stored clip by clip (column-major), so
// the d values of clip 0 come first. Values are widened to f64 on load.
using FeaturePair = std::pair<FeatureSequence, FeatureSequence>;

std::string EncodeAvf(const FeatureSequence& audio, const FeatureSequence& visual);
// Throws format on a bad magic or version and corrupt-file (with the byte
// offset) on truncation or trailing bytes.
FeaturePair DecodeAvf(const std::string& bytes);
void WriteAvf(const std::string& path, const FeatureSequence& audio,
              const FeatureSequence& visual);
FeaturePair LoadFeatures(const std::string& path);

struct ManifestEntry {
  std::string utterance_id;
  std::string speaker_id;
  std::string path;
};

// Tab-separated "utterance_id speaker_id path" lines after a header line
// "# d_a=<n> d_v=<n> L=<n>". Relative paths resolve against the manifest's
// directory.
struct Manifest {
  std::size_t d_a = 0;
  std::size_t d_v = 0;
  std::size_t clips = 0;
  std::vector<ManifestEntry> entries;
};

// Throws parse errors (line-numbered), invalid-parameter for duplicate
// ids and io when a referenced feature file is missing.
Manifest ReadManifest(const std::string& path);
void WriteManifest(const std::string& path, const Manifest& manifest);

// Reads every feature file of the manifest and checks its dims; speaker
// indices follow first appearance.
std::vector<Utterance> LoadUtterances(const std::string& manifest_path);

}  // namespace dca

#endif  // DCA_FEATURE_IO_H_
