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

#ifndef DCA_METRICS_H_
#define DCA_METRICS_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace dca {

enum class TrialLabel { kNontarget = 0, kTarget = 1 };

struct TrialScore {
  std::string enroll_id;
  std::string test_id;
  TrialLabel label = TrialLabel::kNontarget;
  double score = 0.0;
};

// Ordered trials with unique (enroll, test) pairs and finite scores.
class ScoreSet {
 public:
  ScoreSet() = default;
  explicit ScoreSet(std::vector<TrialScore> trials);

  const std::vector<TrialScore>& trials() const { return trials_; }
  std::size_t size() const { return trials_.size(); }
  std::size_t num_targets() const { return num_targets_; }
  std::size_t num_nontargets() const { return trials_.size() - num_targets_; }

 private:
  std::vector<TrialScore> trials_;
  std::size_t num_targets_ = 0;
};

// A trial is accepted when score >= threshold.
struct DetPoint {
  double threshold;
  double far;
  double frr;
};

// One point per distinct score in increasing order, bracketed by the
// -inf (accept all) and +inf (reject all) endpoints. Throws
// insufficient-trials unless both classes are present.
std::vector<DetPoint> DetCurve(const ScoreSet& scores);

struct EerResult {
  double eer;  // fraction
  double threshold;
};

// FAR = FRR crossing, linearly interpolated between the two DET points
// that bracket it.
EerResult ComputeEer(const ScoreSet& scores);

struct DcfParams {
  double p_target = 0.05;
  double c_miss = 1.0;
  double c_fa = 1.0;
};

struct DcfResult {
  double min_dcf;  // normalized by min(c_miss p_target, c_fa (1 - p_target))
  double threshold;
};

DcfResult ComputeMinDcf(const ScoreSet& scores, const DcfParams& params = {});

// weight * a + (1 - weight) * b per trial. Throws misaligned-trials unless
// both sets list the same trials in the same order.
ScoreSet FuseScores(const ScoreSet& a, const ScoreSet& b, double weight);

// Score file lines: "<enroll_id> <test_id> <0|1> <score>".
ScoreSet ParseScores(std::istream& in);
ScoreSet ReadScoreFile(const std::string& path);
void WriteScores(std::ostream& out, const ScoreSet& scores);
void WriteScoreFile(const std::string& path, const ScoreSet& scores);

// CSV with header "threshold,far,frr".
void WriteDetCsv(std::ostream& out, const std::vector<DetPoint>& det);
void WriteDetCsvFile(const std::string& path,
                     const std::vector<DetPoint>& det);

}  // namespace dca

#endif  // DCA_METRICS_H_
