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

#ifndef DCA_MODEL_H_
#define DCA_MODEL_H_

#include <cstddef>
#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dca/attention.h"
#include "dca/config.h"
#include "dca/dataset.h"
#include "dca/embedding.h"
#include "dca/random.h"
#include "dca/tape.h"

namespace dca {

// All trainable state of one verification pipeline:
// fusion -> attentive statistics pooling -> AAM-softmax head.
struct ModelParams {
  std::size_t d_a = 0;
  std::size_t d_v = 0;
  PoolingMode pooling = PoolingMode::kJoint;
  FusionParams fusion;
  std::vector<AspWeights> pools;  // one, or two for per-modality pooling
  ClassifierHead head;
};

struct ModelShape {
  Variant variant = Variant::kCaDca;
  std::size_t d_a = 0;
  std::size_t d_v = 0;
  std::size_t n_speakers = 0;
  double temperature = 0.1;
  AvNormalization av_normalization = AvNormalization::kPrinted;
  PoolingMode pooling = PoolingMode::kJoint;
  double aam_scale = 30.0;
  double aam_margin = 0.2;
};

ModelShape ShapeFromConfig(const ExperimentConfig& config, Variant variant);

std::size_t EmbeddingDim(const ModelShape& shape);

// Every weight uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
ModelParams InitModel(const ModelShape& shape, Rng& rng);
// Same structure with every weight zero.
ModelParams ZeroModel(const ModelShape& shape);

// Calls f(name, matrix) for every parameter in the fixed declared order
// used by the optimizer and the checkpoint format.
void VisitParameters(ModelParams& params,
                     const std::function<void(const std::string&, Matrix&)>& f);
void VisitParameters(
    const ModelParams& params,
    const std::function<void(const std::string&, const Matrix&)>& f);
std::size_t ParameterCount(const ModelParams& params);

struct ModelVars {
  FusionVars fusion;
  std::vector<std::array<Var, 3>> pools;  // w, b, v
  Var head;
  std::vector<Var> all;  // declared parameter order
};

// Binds every parameter (leaves when trainable). If `substitute` is set,
// parameter number substitute->first is replaced by the given Var.
ModelVars BindModel(Tape& tape, const ModelParams& params, bool trainable,
                    std::optional<std::pair<std::size_t, Var>> substitute = {});

Var EmbedVar(const ModelParams& params, const ModelVars& vars, Var audio,
             Var visual);
Var LossVar(const ModelParams& params, const ModelVars& vars, Var audio,
            Var visual, std::size_t label);

// Forward pass only.
UtteranceEmbedding Embed(const ModelParams& params, const Utterance& utt);

// Loss and its gradient for every parameter (declared order).
double LossAndGradients(const ModelParams& params, const Utterance& utt,
                        std::vector<Matrix>* grads);

// Worst grad_check error of the full loss over every parameter tensor.
double ModelGradCheck(const ModelParams& params, const Utterance& utt,
                      double h = 1e-5);

}  // namespace dca

#endif  // DCA_MODEL_H_
