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

#ifndef DCA_ATTENTION_H_
#define DCA_ATTENTION_H_

#include <cstddef>
#include <optional>
#include <string>
#include <utility>

#include "dca/matrix.h"
#include "dca/tape.h"

namespace dca {

enum class Modality { kAudio, kVisual };

// One modality's clip-level features: column l is the feature vector of
// clip l.
class FeatureSequence {
 public:
  FeatureSequence(Modality modality, Matrix data);

  Modality modality() const { return modality_; }
  std::size_t dim() const { return data_.rows(); }
  std::size_t clips() const { return data_.cols(); }
  const Matrix& data() const { return data_; }

 private:
  Modality modality_;
  Matrix data_;
};

// Fusion strategies. The two unimodal entries are the single-branch
// pipelines used for score-level fusion.
enum class Variant {
  kConcat,
  kSelfAttention,
  kCa,
  kJca,
  kCaDca,
  kJcaDca,
  kAudioOnly,
  kVisualOnly,
};

const char* VariantName(Variant variant);
// Throws invalid-parameter for an unknown name.
Variant ParseVariant(const std::string& name);
bool IsDynamic(Variant variant);
bool IsJoint(Variant variant);

// How the visual attention weights are normalized. kPrinted follows the
// published formula (softmax of Z^T along its second index, so rows of
// A_v sum to one); kColumnwise applies a column softmax to Z^T instead.
enum class AvNormalization { kPrinted, kColumnwise };

struct SelfAttentionWeights {
  Matrix query;
  Matrix key;
  Matrix value;
};

struct FusionParams {
  Variant variant = Variant::kCaDca;
  double temperature = 0.1;
  AvNormalization av_normalization = AvNormalization::kPrinted;

  std::optional<Matrix> w_cross;   // d_a x d_v
  std::optional<Matrix> w_gate_a;  // d_a x 2
  std::optional<Matrix> w_gate_v;  // d_v x 2
  std::optional<Matrix> w_joint_a;  // d x d, JCA only
  std::optional<Matrix> w_joint_v;  // d x d, JCA only
  std::optional<SelfAttentionWeights> w_self;

  // Checks the temperature, that exactly the weights `variant` needs are
  // present, and their shapes. Throws invalid-parameter or invalid-shape.
  void Validate(std::size_t d_a, std::size_t d_v) const;
};

// Row count of the fused sequence a variant hands to pooling.
std::size_t FusedDim(Variant variant, std::size_t d_a, std::size_t d_v);

struct AttentionMaps {
  Matrix a_audio;
  Matrix a_visual;
};

// Per-clip probabilities over {unattended, cross-attended}.
struct GateScores {
  Matrix g;  // L x 2
};

struct CrossAttention {
  FeatureSequence att_a;
  FeatureSequence att_v;
  AttentionMaps maps;
};

struct GatedFeatures {
  FeatureSequence gated;
  GateScores scores;
};

// Z = X_a^T W X_v.
Matrix CrossCorrelation(const FeatureSequence& xa, const FeatureSequence& xv,
                        const Matrix& w);

// Vanilla cross-attention: attention weights from Z, attended maps X A,
// and tanh(X + X A) per modality.
CrossAttention CrossAttend(const FeatureSequence& xa,
                           const FeatureSequence& xv,
                           const FusionParams& params);

// Cross-attention against the joint sequence J = [X_a, X_v] (columns
// concatenated, so d_a must equal d_v). Correlations Z_a = X_a^T W_ja J
// and Z_v = X_v^T W_jv J are normalized over the 2L joint columns and the
// attended maps are J A^T.
CrossAttention JointCrossAttend(const FeatureSequence& xa,
                                const FeatureSequence& xv,
                                const FusionParams& params);

// Conditional gate: G = softmax(X_att^T W_gate / T) per clip, and the
// output ReLU(X * G0 + X_att * G1) with each gate column replicated over
// the feature dimension.
GatedFeatures DynamicGate(const FeatureSequence& x,
                          const FeatureSequence& xatt, const Matrix& w_gate,
                          double temperature);

// Cross-attention (vanilla or joint, per params.variant) followed by the
// per-modality gate.
std::pair<FeatureSequence, FeatureSequence> DcaFuse(
    const FeatureSequence& xa, const FeatureSequence& xv,
    const FusionParams& params);

// Single-head scaled dot-product self-attention over the clip axis of the
// row-concatenated features, with a tanh residual.
Matrix SelfAttentionFuse(const FeatureSequence& xa, const FeatureSequence& xv,
                         const FusionParams& params);

// Audio rows first, then visual rows.
Matrix ConcatFuse(const FeatureSequence& xa, const FeatureSequence& xv);

// The fused (FusedDim x L) sequence produced by params.variant.
Matrix FuseSequence(const FeatureSequence& xa, const FeatureSequence& xv,
                    const FusionParams& params);

// --- Differentiable building blocks ---------------------------------------

struct FusionVars {
  std::optional<Var> w_cross, w_gate_a, w_gate_v, w_joint_a, w_joint_v;
  std::optional<Var> w_query, w_key, w_value;
};

// Puts every present weight of params on the tape, as leaves when
// `trainable` and as constants otherwise.
FusionVars BindFusionParams(Tape& tape, const FusionParams& params,
                            bool trainable);

struct CrossAttentionVars {
  Var att_a, att_v, a_audio, a_visual;
};

struct GateVars {
  Var gated, scores;
};

Var CrossCorrelation(Var xa, Var xv, Var w);
CrossAttentionVars CrossAttend(Var xa, Var xv, Var w_cross,
                               AvNormalization av_normalization);
CrossAttentionVars JointCrossAttend(Var xa, Var xv, Var w_joint_a,
                                    Var w_joint_v);
GateVars DynamicGate(Var x, Var xatt, Var w_gate, double temperature);
Var SelfAttentionFuse(Var xa, Var xv, Var w_query, Var w_key, Var w_value);

// Fused sequence on the tape for any variant.
Var FuseSequence(const FusionParams& params, const FusionVars& vars, Var xa,
                 Var xv);

}  // namespace dca

#endif  // DCA_ATTENTION_H_
