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

#ifndef DCA_EMBEDDING_H_
#define DCA_EMBEDDING_H_

#include <cstddef>
#include <string>
#include <vector>

#include "dca/attention.h"
#include "dca/matrix.h"
#include "dca/tape.h"

namespace dca {

// Attentive statistics pooling weights for a d-row input; the hidden size
// equals d.
struct AspWeights {
  Matrix w;  // d x d
  Matrix b;  // d x 1
  Matrix v;  // d x 1
};

// Weighted mean followed by weighted standard deviation.
struct UtteranceEmbedding {
  std::string id;
  std::vector<double> vector;
};

struct ClassifierHead {
  Matrix weights;  // n_speakers x embed_dim; rows normalized at loss time
  double scale = 30.0;
  double margin = 0.2;
};

// Frame scores e_l = v^T tanh(W h_l + b), alpha = softmax(e) over clips,
// output [mu; sigma] with sigma = sqrt(max(E_alpha[h^2] - mu^2, 0)).
UtteranceEmbedding AspPool(const Matrix& h, const AspWeights& weights,
                           std::string id = {});
UtteranceEmbedding AspPool(const FeatureSequence& h, const AspWeights& weights,
                           std::string id = {});
Var AspPool(Var h, Var w, Var b, Var v);

// Cosine similarity. Throws degenerate-embedding for a zero vector and
// invalid-shape for a length mismatch.
double CosineScore(const UtteranceEmbedding& e1, const UtteranceEmbedding& e2);
double CosineScore(std::span<const double> a, std::span<const double> b);

// Target-class logit cos(theta + m) as a function of c = cos(theta). For
// theta + m beyond pi the curve continues linearly, c - (1 - cos m), which
// keeps it continuous and increasing in c.
double AamTargetLogit(double cosine, double margin);

// Additive angular margin softmax loss of a single (embed_dim x 1)
// embedding. Throws index for label >= n_speakers and invalid-parameter for
// scale <= 0 or margin outside [0, pi/2).
Var AamSoftmaxLoss(Var embedding, std::size_t label, Var head_weights,
                   double scale, double margin);
double AamSoftmaxLoss(std::span<const double> embedding, std::size_t label,
                      const ClassifierHead& head);

}  // namespace dca

#endif  // DCA_EMBEDDING_H_
