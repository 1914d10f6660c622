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

#include "dca/attention.h"

#include <cmath>

#include "dca/error.h"

namespace dca {

namespace {

void RequireSameClips(std::size_t a, std::size_t b) {
  if (a != b) {
    Fail(ErrorCode::kInvalidShape, "audio has " + std::to_string(a) +
                                       " clips but visual has " +
                                       std::to_string(b));
  }
}

void RequireShape(const Matrix& m, std::size_t rows, std::size_t cols,
                  const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    Fail(ErrorCode::kInvalidShape, std::string(name) + " must be " +
                                       ShapeString(rows, cols) + ", got " +
                                       m.ShapeString());
  }
}

const Matrix& Require(const std::optional<Matrix>& m, const char* name) {
  if (!m) Fail(ErrorCode::kInvalidParameter, std::string("missing ") + name);
  return *m;
}

Var Require(const std::optional<Var>& v, const char* name) {
  if (!v) Fail(ErrorCode::kInvalidParameter, std::string("missing ") + name);
  return *v;
}

void RequireJointDims(std::size_t d_a, std::size_t d_v) {
  if (d_a != d_v) {
    Fail(ErrorCode::kInvalidParameter,
         "joint cross-attention needs d_a == d_v, got " + std::to_string(d_a) +
             " and " + std::to_string(d_v));
  }
}

}  // namespace

FeatureSequence::FeatureSequence(Modality modality, Matrix data)
    : modality_(modality), data_(std::move(data)) {
  if (data_.empty()) {
    Fail(ErrorCode::kInvalidShape, "feature sequence must be non-empty");
  }
}

const char* VariantName(Variant variant) {
  switch (variant) {
    case Variant::kConcat: return "concat";
    case Variant::kSelfAttention: return "self_attention";
    case Variant::kCa: return "ca";
    case Variant::kJca: return "jca";
    case Variant::kCaDca: return "ca_dca";
    case Variant::kJcaDca: return "jca_dca";
    case Variant::kAudioOnly: return "audio_only";
    case Variant::kVisualOnly: return "visual_only";
  }
  return "unknown";
}

Variant ParseVariant(const std::string& name) {
  for (Variant v : {Variant::kConcat, Variant::kSelfAttention, Variant::kCa,
                    Variant::kJca, Variant::kCaDca, Variant::kJcaDca,
                    Variant::kAudioOnly, Variant::kVisualOnly}) {
    if (name == VariantName(v)) return v;
  }
  Fail(ErrorCode::kInvalidParameter, "unknown fusion variant '" + name + "'");
}

bool IsDynamic(Variant variant) {
  return variant == Variant::kCaDca || variant == Variant::kJcaDca;
}

bool IsJoint(Variant variant) {
  return variant == Variant::kJca || variant == Variant::kJcaDca;
}

std::size_t FusedDim(Variant variant, std::size_t d_a, std::size_t d_v) {
  switch (variant) {
    case Variant::kAudioOnly: return d_a;
    case Variant::kVisualOnly: return d_v;
    default: return d_a + d_v;
  }
}

void FusionParams::Validate(std::size_t d_a, std::size_t d_v) const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    Fail(ErrorCode::kInvalidParameter, "gate temperature must be positive");
  }
  const bool needs_cross = variant == Variant::kCa || variant == Variant::kCaDca;
  const bool needs_joint = IsJoint(variant);
  const bool needs_gate = IsDynamic(variant);
  const bool needs_self = variant == Variant::kSelfAttention;
  auto check = [&](bool present, bool needed, const char* name) {
    if (present != needed) {
      Fail(ErrorCode::kInvalidParameter,
           std::string(name) + (needed ? " is required" : " is not used") +
               " by variant " + VariantName(variant));
    }
  };
  check(w_cross.has_value(), needs_cross, "w_cross");
  check(w_gate_a.has_value(), needs_gate, "w_gate_a");
  check(w_gate_v.has_value(), needs_gate, "w_gate_v");
  check(w_joint_a.has_value(), needs_joint, "w_joint_a");
  check(w_joint_v.has_value(), needs_joint, "w_joint_v");
  check(w_self.has_value(), needs_self, "w_self");

  if (needs_joint) RequireJointDims(d_a, d_v);
  if (w_cross) RequireShape(*w_cross, d_a, d_v, "w_cross");
  if (w_gate_a) RequireShape(*w_gate_a, d_a, 2, "w_gate_a");
  if (w_gate_v) RequireShape(*w_gate_v, d_v, 2, "w_gate_v");
  if (w_joint_a) RequireShape(*w_joint_a, d_a, d_a, "w_joint_a");
  if (w_joint_v) RequireShape(*w_joint_v, d_v, d_v, "w_joint_v");
  if (w_self) {
    const std::size_t d = d_a + d_v;
    RequireShape(w_self->query, d, d, "w_self.query");
    RequireShape(w_self->key, d, d, "w_self.key");
    RequireShape(w_self->value, d, d, "w_self.value");
  }
}

FusionVars BindFusionParams(Tape& tape, const FusionParams& params,
                            bool trainable) {
  auto bind = [&](const Matrix& m) {
    return trainable ? tape.Leaf(m) : tape.Constant(m);
  };
  FusionVars vars;
  if (params.w_cross) vars.w_cross = bind(*params.w_cross);
  if (params.w_gate_a) vars.w_gate_a = bind(*params.w_gate_a);
  if (params.w_gate_v) vars.w_gate_v = bind(*params.w_gate_v);
  if (params.w_joint_a) vars.w_joint_a = bind(*params.w_joint_a);
  if (params.w_joint_v) vars.w_joint_v = bind(*params.w_joint_v);
  if (params.w_self) {
    vars.w_query = bind(params.w_self->query);
    vars.w_key = bind(params.w_self->key);
    vars.w_value = bind(params.w_self->value);
  }
  return vars;
}

Var CrossCorrelation(Var xa, Var xv, Var w) {
  RequireSameClips(xa.cols(), xv.cols());
  RequireShape(w.value(), xa.rows(), xv.rows(), "cross-correlation weight");
  return MatMul(MatMul(Transpose(xa), w), xv);
}

CrossAttentionVars CrossAttend(Var xa, Var xv, Var w_cross,
                               AvNormalization av_normalization) {
  Var z = CrossCorrelation(xa, xv, w_cross);
  // A_a[i,j] = e^{Z[i,j]} / sum_k e^{Z[k,j]}.
  Var a_audio = SoftmaxCols(z);
  Var zt = Transpose(z);
  Var a_visual = av_normalization == AvNormalization::kPrinted
                     ? SoftmaxRows(zt)
                     : SoftmaxCols(zt);
  Var att_a = Tanh(Add(xa, MatMul(xa, a_audio)));
  Var att_v = Tanh(Add(xv, MatMul(xv, a_visual)));
  return {att_a, att_v, a_audio, a_visual};
}

CrossAttentionVars JointCrossAttend(Var xa, Var xv, Var w_joint_a,
                                    Var w_joint_v) {
  RequireJointDims(xa.rows(), xv.rows());
  RequireSameClips(xa.cols(), xv.cols());
  RequireShape(w_joint_a.value(), xa.rows(), xa.rows(), "w_joint_a");
  RequireShape(w_joint_v.value(), xv.rows(), xv.rows(), "w_joint_v");
  Var joint = ConcatCols(xa, xv);  // d x 2L
  Var a_audio = SoftmaxRows(MatMul(MatMul(Transpose(xa), w_joint_a), joint));
  Var a_visual = SoftmaxRows(MatMul(MatMul(Transpose(xv), w_joint_v), joint));
  Var att_a = Tanh(Add(xa, MatMul(joint, Transpose(a_audio))));
  Var att_v = Tanh(Add(xv, MatMul(joint, Transpose(a_visual))));
  return {att_a, att_v, a_audio, a_visual};
}

GateVars DynamicGate(Var x, Var xatt, Var w_gate, double temperature) {
  if (!x.value().SameShape(xatt.value())) {
    Fail(ErrorCode::kInvalidShape,
         "gate inputs differ in shape: " + x.value().ShapeString() + " vs " +
             xatt.value().ShapeString());
  }
  RequireShape(w_gate.value(), x.rows(), 2, "gate weight");
  Var logits = MatMul(Transpose(xatt), w_gate);  // L x 2
  Var scores = SoftmaxRows(logits, temperature);
  Var unattended = ReplicateColumn(scores, 0, x.rows());
  Var attended = ReplicateColumn(scores, 1, x.rows());
  Var gated =
      Relu(Add(Hadamard(x, unattended), Hadamard(xatt, attended)));
  return {gated, scores};
}

Var SelfAttentionFuse(Var xa, Var xv, Var w_query, Var w_key, Var w_value) {
  RequireSameClips(xa.cols(), xv.cols());
  Var c = ConcatRows(xa, xv);
  const std::size_t d = c.rows();
  RequireShape(w_query.value(), d, d, "w_self.query");
  RequireShape(w_key.value(), d, d, "w_self.key");
  RequireShape(w_value.value(), d, d, "w_self.value");
  Var q = MatMul(w_query, c);
  Var k = MatMul(w_key, c);
  Var v = MatMul(w_value, c);
  // Column j holds the weights of every clip as a key for query clip j.
  Var weights =
      SoftmaxCols(Scale(MatMul(Transpose(k), q), 1.0 / std::sqrt(double(d))));
  return Tanh(Add(c, MatMul(v, weights)));
}

Var FuseSequence(const FusionParams& params, const FusionVars& vars, Var xa,
                 Var xv) {
  RequireSameClips(xa.cols(), xv.cols());
  switch (params.variant) {
    case Variant::kAudioOnly:
      return xa;
    case Variant::kVisualOnly:
      return xv;
    case Variant::kConcat:
      return ConcatRows(xa, xv);
    case Variant::kSelfAttention:
      return SelfAttentionFuse(xa, xv, Require(vars.w_query, "w_self"),
                               Require(vars.w_key, "w_self"),
                               Require(vars.w_value, "w_self"));
    case Variant::kCa:
    case Variant::kJca:
    case Variant::kCaDca:
    case Variant::kJcaDca:
      break;
  }
  CrossAttentionVars ca =
      IsJoint(params.variant)
          ? JointCrossAttend(xa, xv, Require(vars.w_joint_a, "w_joint_a"),
                             Require(vars.w_joint_v, "w_joint_v"))
          : CrossAttend(xa, xv, Require(vars.w_cross, "w_cross"),
                        params.av_normalization);
  if (!IsDynamic(params.variant)) return ConcatRows(ca.att_a, ca.att_v);
  GateVars ga = DynamicGate(xa, ca.att_a, Require(vars.w_gate_a, "w_gate_a"),
                            params.temperature);
  GateVars gv = DynamicGate(xv, ca.att_v, Require(vars.w_gate_v, "w_gate_v"),
                            params.temperature);
  return ConcatRows(ga.gated, gv.gated);
}

// --- Value-level API --------------------------------------------------------

Matrix CrossCorrelation(const FeatureSequence& xa, const FeatureSequence& xv,
                        const Matrix& w) {
  Tape tape;
  return CrossCorrelation(tape.Constant(xa.data()), tape.Constant(xv.data()),
                          tape.Constant(w))
      .value();
}

CrossAttention CrossAttend(const FeatureSequence& xa,
                           const FeatureSequence& xv,
                           const FusionParams& params) {
  Tape tape;
  CrossAttentionVars out =
      CrossAttend(tape.Constant(xa.data()), tape.Constant(xv.data()),
                  tape.Constant(Require(params.w_cross, "w_cross")),
                  params.av_normalization);
  return {FeatureSequence(Modality::kAudio, out.att_a.value()),
          FeatureSequence(Modality::kVisual, out.att_v.value()),
          {out.a_audio.value(), out.a_visual.value()}};
}

CrossAttention JointCrossAttend(const FeatureSequence& xa,
                                const FeatureSequence& xv,
                                const FusionParams& params) {
  const Matrix& wa = Require(params.w_joint_a, "w_joint_a");
  const Matrix& wv = Require(params.w_joint_v, "w_joint_v");
  Tape tape;
  CrossAttentionVars out =
      JointCrossAttend(tape.Constant(xa.data()), tape.Constant(xv.data()),
                       tape.Constant(wa), tape.Constant(wv));
  return {FeatureSequence(Modality::kAudio, out.att_a.value()),
          FeatureSequence(Modality::kVisual, out.att_v.value()),
          {out.a_audio.value(), out.a_visual.value()}};
}

GatedFeatures DynamicGate(const FeatureSequence& x,
                          const FeatureSequence& xatt, const Matrix& w_gate,
                          double temperature) {
  Tape tape;
  GateVars out = DynamicGate(tape.Constant(x.data()), tape.Constant(xatt.data()),
                             tape.Constant(w_gate), temperature);
  return {FeatureSequence(x.modality(), out.gated.value()),
          {out.scores.value()}};
}

std::pair<FeatureSequence, FeatureSequence> DcaFuse(
    const FeatureSequence& xa, const FeatureSequence& xv,
    const FusionParams& params) {
  if (!IsDynamic(params.variant)) {
    Fail(ErrorCode::kInvalidParameter,
         std::string("dca_fuse needs a dynamic variant, got ") +
             VariantName(params.variant));
  }
  CrossAttention ca = IsJoint(params.variant) ? JointCrossAttend(xa, xv, params)
                                              : CrossAttend(xa, xv, params);
  GatedFeatures ga = DynamicGate(xa, ca.att_a,
                                 Require(params.w_gate_a, "w_gate_a"),
                                 params.temperature);
  GatedFeatures gv = DynamicGate(xv, ca.att_v,
                                 Require(params.w_gate_v, "w_gate_v"),
                                 params.temperature);
  return {ga.gated, gv.gated};
}

Matrix SelfAttentionFuse(const FeatureSequence& xa, const FeatureSequence& xv,
                         const FusionParams& params) {
  if (!params.w_self) Fail(ErrorCode::kInvalidParameter, "missing w_self");
  Tape tape;
  return SelfAttentionFuse(tape.Constant(xa.data()), tape.Constant(xv.data()),
                           tape.Constant(params.w_self->query),
                           tape.Constant(params.w_self->key),
                           tape.Constant(params.w_self->value))
      .value();
}

Matrix ConcatFuse(const FeatureSequence& xa, const FeatureSequence& xv) {
  RequireSameClips(xa.clips(), xv.clips());
  return ConcatRows(xa.data(), xv.data());
}

Matrix FuseSequence(const FeatureSequence& xa, const FeatureSequence& xv,
                    const FusionParams& params) {
  params.Validate(xa.dim(), xv.dim());
  Tape tape;
  FusionVars vars = BindFusionParams(tape, params, false);
  return FuseSequence(params, vars, tape.Constant(xa.data()),
                      tape.Constant(xv.data()))
      .value();
}

}  // namespace dca
