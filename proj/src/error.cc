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

#include "dca/error.h"

namespace dca {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidShape: return "invalid-shape";
    case ErrorCode::kInvalidParameter: return "invalid-parameter";
    case ErrorCode::kNumericDomain: return "numeric-domain";
    case ErrorCode::kIndex: return "index";
    case ErrorCode::kDegenerateEmbedding: return "degenerate-embedding";
    case ErrorCode::kTrainingDiverged: return "training-diverged";
    case ErrorCode::kInsufficientTrials: return "insufficient-trials";
    case ErrorCode::kMisalignedTrials: return "misaligned-trials";
    case ErrorCode::kMissingUtterance: return "missing-utterance";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kCorruptFile: return "corrupt-file";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace dca
