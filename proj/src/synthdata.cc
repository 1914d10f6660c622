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

#include "dca/synthdata.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "dca/error.h"
#include "dca/random.h"

namespace dca {

namespace {

constexpr std::uint64_t kFeatureStream = 1;
constexpr std::uint64_t kCorruptionStream = 2;

std::string SpeakerId(std::size_t s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "spk%03zu", s);
  return buf;
}

std::string UtteranceId(std::size_t s, std::size_t u) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "spk%03zu-utt%03zu", s, u);
  return buf;
}

Matrix Clips(const Matrix& signal, std::size_t clips, double sigma, Rng& rng) {
  Matrix out(signal.rows(), clips);
  for (std::size_t r = 0; r < signal.rows(); ++r)
    for (std::size_t l = 0; l < clips; ++l)
      out(r, l) = signal(r, 0) + sigma * rng.Normal();
  return out;
}

double RmsScale(const std::vector<Matrix>& signals, double sigma) {
  double sq = 0.0;
  std::size_t n = 0;
  for (const Matrix& s : signals) {
    for (double v : s.data()) sq += v * v;
    n += s.size();
  }
  return std::sqrt(sq / static_cast<double>(n) + sigma * sigma);
}

Matrix Corrupt(const Matrix& clean, double severity, double scale, Rng& rng) {
  const double retained = std::max(0.0, 1.0 - severity);
  Matrix out(clean.rows(), clean.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.mutable_data()[i] =
        retained * clean.data()[i] + severity * scale * rng.Normal();
  }
  return out;
}

}  // namespace

const char* CorruptTargetName(CorruptTarget target) {
  switch (target) {
    case CorruptTarget::kAudio: return "audio";
    case CorruptTarget::kVisual: return "visual";
    case CorruptTarget::kEither: return "either";
  }
  return "unknown";
}

CorruptTarget ParseCorruptTarget(const std::string& name) {
  for (CorruptTarget t :
       {CorruptTarget::kAudio, CorruptTarget::kVisual, CorruptTarget::kEither}) {
    if (name == CorruptTargetName(t)) return t;
  }
  Fail(ErrorCode::kInvalidParameter, "unknown corruption target '" + name + "'");
}

void SynthSpec::Validate() const {
  if (n_speakers == 0 || utterances_per_speaker == 0 || d_latent == 0 ||
      d_a == 0 || d_v == 0 || clips == 0) {
    Fail(ErrorCode::kInvalidParameter, "synthetic dimensions must be positive");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    Fail(ErrorCode::kInvalidParameter, "noise_sigma must be >= 0");
  }
  if (!(corrupt_prob >= 0.0 && corrupt_prob <= 1.0)) {
    Fail(ErrorCode::kInvalidParameter, "corrupt_prob must lie in [0, 1]");
  }
  if (!(corrupt_severity >= 0.0) || !std::isfinite(corrupt_severity)) {
    Fail(ErrorCode::kInvalidParameter, "corrupt_severity must be >= 0");
  }
}

SynthDataset Generate(const SynthSpec& spec) {
  spec.Validate();
  Rng features(DeriveSeed(spec.seed, kFeatureStream));
  Rng corruption(DeriveSeed(spec.seed, kCorruptionStream));

  const double mix_std = 1.0 / std::sqrt(static_cast<double>(spec.d_latent));
  const Matrix mix_a = features.NormalMatrix(spec.d_a, spec.d_latent, mix_std);
  const Matrix mix_v = features.NormalMatrix(spec.d_v, spec.d_latent, mix_std);
  std::vector<Matrix> signal_a, signal_v;
  for (std::size_t s = 0; s < spec.n_speakers; ++s) {
    const Matrix z = features.NormalMatrix(spec.d_latent, 1);
    signal_a.push_back(MatMul(mix_a, z));
    signal_v.push_back(MatMul(mix_v, z));
  }
  const double scale_a = RmsScale(signal_a, spec.noise_sigma);
  const double scale_v = RmsScale(signal_v, spec.noise_sigma);

  SynthDataset data;
  for (std::size_t s = 0; s < spec.n_speakers; ++s) {
    data.speakers.push_back(SpeakerId(s));
    for (std::size_t u = 0; u < spec.utterances_per_speaker; ++u) {
      Matrix audio = Clips(signal_a[s], spec.clips, spec.noise_sigma, features);
      Matrix visual = Clips(signal_v[s], spec.clips, spec.noise_sigma, features);

      CorruptionAnnotation note{UtteranceId(s, u), false, std::nullopt};
      if (corruption.Bernoulli(spec.corrupt_prob)) {
        Modality m = Modality::kVisual;
        if (spec.corrupt_modality == CorruptTarget::kAudio) {
          m = Modality::kAudio;
        } else if (spec.corrupt_modality == CorruptTarget::kEither) {
          m = corruption.Bernoulli(0.5) ? Modality::kAudio : Modality::kVisual;
        }
        if (m == Modality::kAudio) {
          audio = Corrupt(audio, spec.corrupt_severity, scale_a, corruption);
        } else {
          visual = Corrupt(visual, spec.corrupt_severity, scale_v, corruption);
        }
        note.corrupted = true;
        note.modality = m;
      }
      data.utterances.push_back(
          Utterance{note.utterance_id, SpeakerId(s), s,
                    FeatureSequence(Modality::kAudio, std::move(audio)),
                    FeatureSequence(Modality::kVisual, std::move(visual))});
      data.annotations.push_back(std::move(note));
    }
  }
  return data;
}

std::vector<Trial> MakeTrials(const std::vector<Utterance>& utterances,
                              std::size_t n_target, std::size_t n_nontarget,
                              std::uint64_t seed) {
  std::vector<std::pair<std::size_t, std::size_t>> same, different;
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    for (std::size_t j = i + 1; j < utterances.size(); ++j) {
      (utterances[i].speaker_id == utterances[j].speaker_id ? same : different)
          .emplace_back(i, j);
    }
  }
  if (n_target > same.size() || n_nontarget > different.size()) {
    Fail(ErrorCode::kInsufficientData,
         "requested " + std::to_string(n_target) + " target / " +
             std::to_string(n_nontarget) + " nontarget trials but only " +
             std::to_string(same.size()) + " / " +
             std::to_string(different.size()) + " distinct pairs exist");
  }
  Rng rng(seed);
  rng.Shuffle(same);
  rng.Shuffle(different);
  std::vector<Trial> trials;
  trials.reserve(n_target + n_nontarget);
  for (std::size_t k = 0; k < n_target; ++k) {
    trials.push_back({utterances[same[k].first].id,
                      utterances[same[k].second].id, TrialLabel::kTarget});
  }
  for (std::size_t k = 0; k < n_nontarget; ++k) {
    trials.push_back({utterances[different[k].first].id,
                      utterances[different[k].second].id,
                      TrialLabel::kNontarget});
  }
  rng.Shuffle(trials);
  return trials;
}

void SplitPerSpeaker(const std::vector<Utterance>& utterances,
                     std::size_t per_speaker_train,
                     std::vector<Utterance>* train,
                     std::vector<Utterance>* eval) {
  std::map<std::string, std::size_t> seen;
  for (const Utterance& u : utterances) {
    (seen[u.speaker_id]++ < per_speaker_train ? train : eval)->push_back(u);
  }
}

}  // namespace dca
