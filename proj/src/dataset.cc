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

#include "dca/dataset.h"

#include <fstream>
#include <map>
#include <sstream>

#include "dca/error.h"

namespace dca {

std::vector<Trial> ParseTrials(std::istream& in) {
  std::vector<Trial> trials;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    Trial t;
    std::string label, extra;
    if (!(fields >> t.enroll_id >> t.test_id >> label) || (fields >> extra) ||
        (label != "0" && label != "1")) {
      Fail(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                  ": expected '<enroll> <test> <0|1>'");
    }
    t.label = label == "1" ? TrialLabel::kTarget : TrialLabel::kNontarget;
    trials.push_back(std::move(t));
  }
  return trials;
}

std::vector<Trial> ReadTrialFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open trial file " + path);
  try {
    return ParseTrials(in);
  } catch (const Error& e) {
    Fail(e.code(), path + ": " + e.what());
  }
}

void WriteTrialFile(const std::string& path, const std::vector<Trial>& trials) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  for (const Trial& t : trials) {
    out << t.enroll_id << ' ' << t.test_id << ' '
        << (t.label == TrialLabel::kTarget ? 1 : 0) << '\n';
  }
}

std::vector<std::string> IndexSpeakers(std::vector<Utterance>& utterances) {
  std::map<std::string, std::size_t> index;
  std::vector<std::string> ids;
  for (Utterance& u : utterances) {
    auto [it, inserted] = index.emplace(u.speaker_id, ids.size());
    if (inserted) ids.push_back(u.speaker_id);
    u.speaker_index = it->second;
  }
  return ids;
}

}  // namespace dca
