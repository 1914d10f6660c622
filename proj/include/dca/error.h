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

#ifndef DCA_ERROR_H_
#define DCA_ERROR_H_

#include <stdexcept>
#include <string>

namespace dca {

enum class ErrorCode {
  kInvalidShape,
  kInvalidParameter,
  kNumericDomain,
  kIndex,
  kDegenerateEmbedding,
  kTrainingDiverged,
  kInsufficientTrials,
  kMisalignedTrials,
  kMissingUtterance,
  kInsufficientData,
  kFormat,
  kCorruptFile,
  kParse,
  kIo,
};

// Stable machine-readable name, e.g. "invalid-shape".
const char* ErrorCodeName(ErrorCode code);

// Every failure raised by this library is a dca::Error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dca

#endif  // DCA_ERROR_H_
