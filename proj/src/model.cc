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

#include "dca/model.h"

#include <algorithm>
#include <cmath>

#include "dca/error.h"
#include "dca/grad_check.h"

namespace dca {

namespace {

// Row ranges pooled separately.
std::vector<std::pair<std::size_t, std::size_t>> PoolGroups(
    Variant variant, std::size_t d_a, std::size_t d_v, PoolingMode pooling) {
  const std::size_t fused = FusedDim(variant, d_a, d_v);
  if (pooling == PoolingMode::kPerModality && fused == d_a + d_v) {
    return {{0, d_a}, {d_a, d_v}};
  }
  return {{0, fused}};
}

Matrix InitWeight(std::size_t rows, std::size_t cols, std::size_t fan_in,
                  Rng* rng) {
  if (rng == nullptr) return Matrix(rows, cols);
  return rng->UniformMatrix(rows, cols, 1.0 / std::sqrt(double(fan_in)));
}

ModelParams BuildModel(const ModelShape& s, Rng* rng) {
  if (s.d_a == 0 || s.d_v == 0 || s.n_speakers == 0) {
    Fail(ErrorCode::kInvalidParameter, "model dimensions must be positive");
  }
  ModelParams p;
  p.d_a = s.d_a;
  p.d_v = s.d_v;
  p.pooling = s.pooling;
  p.fusion.variant = s.variant;
  p.fusion.temperature = s.temperature;
  p.fusion.av_normalization = s.av_normalization;
  const Variant v = s.variant;
  // Right-multiplied weights (X^T W) contract over their rows, the others
  // over their columns.
  if (v == Variant::kCa || v == Variant::kCaDca) {
    p.fusion.w_cross = InitWeight(s.d_a, s.d_v, s.d_a, rng);
  }
  if (IsJoint(v)) {
    if (s.d_a != s.d_v) {
      Fail(ErrorCode::kInvalidParameter,
           "joint cross-attention needs d_a == d_v");
    }
    p.fusion.w_joint_a = InitWeight(s.d_a, s.d_a, s.d_a, rng);
    p.fusion.w_joint_v = InitWeight(s.d_v, s.d_v, s.d_v, rng);
  }
  if (IsDynamic(v)) {
    p.fusion.w_gate_a = InitWeight(s.d_a, 2, s.d_a, rng);
    p.fusion.w_gate_v = InitWeight(s.d_v, 2, s.d_v, rng);
  }
  if (v == Variant::kSelfAttention) {
    const std::size_t d = s.d_a + s.d_v;
    SelfAttentionWeights w{InitWeight(d, d, d, rng), InitWeight(d, d, d, rng),
                           InitWeight(d, d, d, rng)};
    p.fusion.w_self = std::move(w);
  }
  for (auto [begin, count] : PoolGroups(v, s.d_a, s.d_v, s.pooling)) {
    (void)begin;
    p.pools.push_back({InitWeight(count, count, count, rng),
                       InitWeight(count, 1, count, rng),
                       InitWeight(count, 1, count, rng)});
  }
  const std::size_t embed = EmbeddingDim(s);
  p.head.weights = InitWeight(s.n_speakers, embed, embed, rng);
  p.head.scale = s.aam_scale;
  p.head.margin = s.aam_margin;
  p.fusion.Validate(s.d_a, s.d_v);
  return p;
}

template <typename P, typename M>
void VisitImpl(P& p, const std::function<void(const std::string&, M&)>& f) {
  if (p.fusion.w_cross) f("fusion.w_cross", *p.fusion.w_cross);
  if (p.fusion.w_gate_a) f("fusion.w_gate_a", *p.fusion.w_gate_a);
  if (p.fusion.w_gate_v) f("fusion.w_gate_v", *p.fusion.w_gate_v);
  if (p.fusion.w_joint_a) f("fusion.w_joint_a", *p.fusion.w_joint_a);
  if (p.fusion.w_joint_v) f("fusion.w_joint_v", *p.fusion.w_joint_v);
  if (p.fusion.w_self) {
    f("fusion.w_query", p.fusion.w_self->query);
    f("fusion.w_key", p.fusion.w_self->key);
    f("fusion.w_value", p.fusion.w_self->value);
  }
  for (std::size_t i = 0; i < p.pools.size(); ++i) {
    const std::string prefix = "pool" + std::to_string(i) + ".";
    f(prefix + "w", p.pools[i].w);
    f(prefix + "b", p.pools[i].b);
    f(prefix + "v", p.pools[i].v);
  }
  f("head", p.head.weights);
}

}  // namespace

ModelShape ShapeFromConfig(const ExperimentConfig& config, Variant variant) {
  ModelShape s;
  s.variant = variant;
  s.d_a = config.d_a;
  s.d_v = config.d_v;
  s.n_speakers = config.n_speakers;
  s.temperature = config.temperature;
  s.av_normalization = config.av_normalization;
  s.pooling = config.pooling;
  s.aam_scale = config.aam_scale;
  s.aam_margin = config.aam_margin;
  return s;
}

std::size_t EmbeddingDim(const ModelShape& shape) {
  return 2 * FusedDim(shape.variant, shape.d_a, shape.d_v);
}

ModelParams InitModel(const ModelShape& shape, Rng& rng) {
  return BuildModel(shape, &rng);
}

ModelParams ZeroModel(const ModelShape& shape) {
  return BuildModel(shape, nullptr);
}

void VisitParameters(
    ModelParams& params,
    const std::function<void(const std::string&, Matrix&)>& f) {
  VisitImpl<ModelParams, Matrix>(params, f);
}

void VisitParameters(
    const ModelParams& params,
    const std::function<void(const std::string&, const Matrix&)>& f) {
  VisitImpl<const ModelParams, const Matrix>(params, f);
}

std::size_t ParameterCount(const ModelParams& params) {
  std::size_t n = 0;
  VisitParameters(params, [&](const std::string&, const Matrix&) { ++n; });
  return n;
}

ModelVars BindModel(Tape& tape, const ModelParams& params, bool trainable,
                    std::optional<std::pair<std::size_t, Var>> substitute) {
  ModelVars vars;
  vars.pools.resize(params.pools.size());
  VisitParameters(params, [&](const std::string& name, const Matrix& m) {
    Var v;
    if (substitute && substitute->first == vars.all.size()) {
      v = substitute->second;
    } else {
      v = trainable ? tape.Leaf(m) : tape.Constant(m);
    }
    vars.all.push_back(v);
    if (name == "fusion.w_cross") vars.fusion.w_cross = v;
    else if (name == "fusion.w_gate_a") vars.fusion.w_gate_a = v;
    else if (name == "fusion.w_gate_v") vars.fusion.w_gate_v = v;
    else if (name == "fusion.w_joint_a") vars.fusion.w_joint_a = v;
    else if (name == "fusion.w_joint_v") vars.fusion.w_joint_v = v;
    else if (name == "fusion.w_query") vars.fusion.w_query = v;
    else if (name == "fusion.w_key") vars.fusion.w_key = v;
    else if (name == "fusion.w_value") vars.fusion.w_value = v;
    else if (name == "head") vars.head = v;
    else {
      // poolN.{w,b,v}
      const std::size_t dot = name.find('.');
      const std::size_t index = std::stoul(name.substr(4, dot - 4));
      const char slot = name[dot + 1];
      vars.pools[index][slot == 'w' ? 0 : slot == 'b' ? 1 : 2] = v;
    }
  });
  return vars;
}

Var EmbedVar(const ModelParams& params, const ModelVars& vars, Var audio,
             Var visual) {
  if (audio.rows() != params.d_a || visual.rows() != params.d_v) {
    Fail(ErrorCode::kInvalidShape,
         "utterance dims " + std::to_string(audio.rows()) + "/" +
             std::to_string(visual.rows()) + " do not match model dims " +
             std::to_string(params.d_a) + "/" + std::to_string(params.d_v));
  }
  Var fused = FuseSequence(params.fusion, vars.fusion, audio, visual);
  const auto groups =
      PoolGroups(params.fusion.variant, params.d_a, params.d_v, params.pooling);
  std::optional<Var> embedding;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    Var part = groups.size() == 1
                   ? fused
                   : SliceRows(fused, groups[i].first, groups[i].second);
    Var pooled = AspPool(part, vars.pools[i][0], vars.pools[i][1],
                         vars.pools[i][2]);
    embedding = embedding ? ConcatRows(*embedding, pooled) : pooled;
  }
  return *embedding;
}

Var LossVar(const ModelParams& params, const ModelVars& vars, Var audio,
            Var visual, std::size_t label) {
  return AamSoftmaxLoss(EmbedVar(params, vars, audio, visual), label,
                        vars.head, params.head.scale, params.head.margin);
}

UtteranceEmbedding Embed(const ModelParams& params, const Utterance& utt) {
  Tape tape;
  ModelVars vars = BindModel(tape, params, false);
  Var e = EmbedVar(params, vars, tape.Constant(utt.audio.data()),
                   tape.Constant(utt.visual.data()));
  auto data = e.value().data();
  return {utt.id, std::vector<double>(data.begin(), data.end())};
}

double LossAndGradients(const ModelParams& params, const Utterance& utt,
                        std::vector<Matrix>* grads) {
  Tape tape;
  ModelVars vars = BindModel(tape, params, true);
  Var loss = LossVar(params, vars, tape.Constant(utt.audio.data()),
                     tape.Constant(utt.visual.data()), utt.speaker_index);
  tape.Backward(loss);
  grads->clear();
  for (Var v : vars.all) grads->push_back(tape.grad(v));
  return loss.value()(0, 0);
}

double ModelGradCheck(const ModelParams& params, const Utterance& utt,
                      double h) {
  std::vector<const Matrix*> tensors;
  VisitParameters(params, [&](const std::string&, const Matrix& m) {
    tensors.push_back(&m);
  });
  double worst = 0.0;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    ScalarGraph f = [&, i](Tape& tape, Var x) {
      ModelVars vars = BindModel(tape, params, false, std::make_pair(i, x));
      return LossVar(params, vars, tape.Constant(utt.audio.data()),
                     tape.Constant(utt.visual.data()), utt.speaker_index);
    };
    worst = std::max(worst, GradCheck(f, *tensors[i], h));
  }
  return worst;
}

}  // namespace dca
