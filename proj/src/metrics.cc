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

#include "dca/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include "dca/error.h"

namespace dca {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void RequireBothClasses(const ScoreSet& scores) {
  if (scores.num_targets() == 0 || scores.num_nontargets() == 0) {
    Fail(ErrorCode::kInsufficientTrials,
         "need at least one target and one nontarget trial, got " +
             std::to_string(scores.num_targets()) + " targets and " +
             std::to_string(scores.num_nontargets()) + " nontargets");
  }
}

std::string FormatDouble(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ScoreSet::ScoreSet(std::vector<TrialScore> trials) : trials_(std::move(trials)) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const TrialScore& t : trials_) {
    if (!std::isfinite(t.score)) {
      Fail(ErrorCode::kNumericDomain, "non-finite score for trial " +
                                          t.enroll_id + " " + t.test_id);
    }
    if (!seen.emplace(t.enroll_id, t.test_id).second) {
      Fail(ErrorCode::kInvalidParameter,
           "duplicate trial " + t.enroll_id + " " + t.test_id);
    }
    if (t.label == TrialLabel::kTarget) ++num_targets_;
  }
}

std::vector<DetPoint> DetCurve(const ScoreSet& scores) {
  RequireBothClasses(scores);
  std::vector<double> targets, nontargets, all;
  for (const TrialScore& t : scores.trials()) {
    (t.label == TrialLabel::kTarget ? targets : nontargets).push_back(t.score);
    all.push_back(t.score);
  }
  std::sort(targets.begin(), targets.end());
  std::sort(nontargets.begin(), nontargets.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  const double n_t = static_cast<double>(targets.size());
  const double n_n = static_cast<double>(nontargets.size());
  std::vector<DetPoint> det;
  det.reserve(all.size() + 2);
  det.push_back({-kInf, 1.0, 0.0});
  for (double threshold : all) {
    const auto rejected_targets =
        std::lower_bound(targets.begin(), targets.end(), threshold) -
        targets.begin();
    const auto rejected_nontargets =
        std::lower_bound(nontargets.begin(), nontargets.end(), threshold) -
        nontargets.begin();
    det.push_back({threshold,
                   static_cast<double>(nontargets.size() - rejected_nontargets) / n_n,
                   static_cast<double>(rejected_targets) / n_t});
  }
  det.push_back({kInf, 0.0, 1.0});
  return det;
}

EerResult ComputeEer(const ScoreSet& scores) {
  const std::vector<DetPoint> det = DetCurve(scores);
  std::size_t k = 1;
  while (det[k].frr < det[k].far) ++k;  // the +inf endpoint always stops it
  const DetPoint& lo = det[k - 1];
  const DetPoint& hi = det[k];
  const double gap_lo = lo.far - lo.frr;  // > 0
  const double gap_hi = hi.far - hi.frr;  // <= 0
  const double t = gap_lo / (gap_lo - gap_hi);
  const double eer = lo.far + t * (hi.far - lo.far);
  double threshold;
  if (t == 1.0 || !std::isfinite(lo.threshold)) {
    threshold = hi.threshold;
  } else if (t == 0.0 || !std::isfinite(hi.threshold)) {
    threshold = lo.threshold;
  } else {
    threshold = lo.threshold + t * (hi.threshold - lo.threshold);
  }
  return {eer, threshold};
}

DcfResult ComputeMinDcf(const ScoreSet& scores, const DcfParams& params) {
  if (!(params.p_target > 0.0 && params.p_target < 1.0)) {
    Fail(ErrorCode::kInvalidParameter, "p_target must lie in (0, 1)");
  }
  if (!(params.c_miss > 0.0) || !(params.c_fa > 0.0)) {
    Fail(ErrorCode::kInvalidParameter, "detection costs must be positive");
  }
  const std::vector<DetPoint> det = DetCurve(scores);
  const double norm = std::min(params.c_miss * params.p_target,
                               params.c_fa * (1.0 - params.p_target));
  DcfResult best{kInf, det.front().threshold};
  for (const DetPoint& p : det) {
    const double cost = params.c_miss * p.frr * params.p_target +
                        params.c_fa * p.far * (1.0 - params.p_target);
    if (cost < best.min_dcf) best = {cost, p.threshold};
  }
  best.min_dcf /= norm;
  return best;
}

ScoreSet FuseScores(const ScoreSet& a, const ScoreSet& b, double weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) {
    Fail(ErrorCode::kInvalidParameter, "fusion weight must lie in [0, 1]");
  }
  if (a.size() != b.size()) {
    Fail(ErrorCode::kMisalignedTrials,
         "score sets have " + std::to_string(a.size()) + " and " +
             std::to_string(b.size()) + " trials");
  }
  std::vector<TrialScore> fused;
  fused.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const TrialScore& x = a.trials()[i];
    const TrialScore& y = b.trials()[i];
    if (x.enroll_id != y.enroll_id || x.test_id != y.test_id ||
        x.label != y.label) {
      Fail(ErrorCode::kMisalignedTrials,
           "trial " + std::to_string(i) + " differs: " + x.enroll_id + " " +
               x.test_id + " vs " + y.enroll_id + " " + y.test_id);
    }
    TrialScore t = x;
    t.score = weight * x.score + (1.0 - weight) * y.score;
    fused.push_back(std::move(t));
  }
  return ScoreSet(std::move(fused));
}

ScoreSet ParseScores(std::istream& in) {
  std::vector<TrialScore> trials;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    TrialScore t;
    std::string label, score, extra;
    if (!(fields >> t.enroll_id >> t.test_id >> label >> score) ||
        (fields >> extra)) {
      Fail(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                  ": expected 4 fields '<enroll> <test> "
                                  "<0|1> <score>'");
    }
    if (label == "1") {
      t.label = TrialLabel::kTarget;
    } else if (label == "0") {
      t.label = TrialLabel::kNontarget;
    } else {
      Fail(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                  ": label must be 0 or 1, got '" + label +
                                  "'");
    }
    std::size_t used = 0;
    try {
      t.score = std::stod(score, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != score.size() || !std::isfinite(t.score)) {
      Fail(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                  ": bad score '" + score + "'");
    }
    trials.push_back(std::move(t));
  }
  return ScoreSet(std::move(trials));
}

ScoreSet ReadScoreFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open score file " + path);
  try {
    return ParseScores(in);
  } catch (const Error& e) {
    Fail(e.code(), path + ": " + e.what());
  }
}

void WriteScores(std::ostream& out, const ScoreSet& scores) {
  for (const TrialScore& t : scores.trials()) {
    out << t.enroll_id << ' ' << t.test_id << ' '
        << (t.label == TrialLabel::kTarget ? 1 : 0) << ' '
        << FormatDouble(t.score) << '\n';
  }
}

void WriteScoreFile(const std::string& path, const ScoreSet& scores) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  WriteScores(out, scores);
}

void WriteDetCsv(std::ostream& out, const std::vector<DetPoint>& det) {
  out << "threshold,far,frr\n";
  for (const DetPoint& p : det) {
    out << FormatDouble(p.threshold) << ',' << FormatDouble(p.far) << ','
        << FormatDouble(p.frr) << '\n';
  }
}

void WriteDetCsvFile(const std::string& path,
                     const std::vector<DetPoint>& det) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  WriteDetCsv(out, det);
}

}  // namespace dca
